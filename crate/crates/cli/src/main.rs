//! `ontosoc` command-line tool.
//!
//! Exit codes: 0 success, 1 validation found violations, 2 any error
//! (usage, missing file, parse failure, bad query).

use std::collections::BTreeMap;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context, Result};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use ontosoc::hat::{derive, parse_triads, DecisionTable, DerivationConfig};
use ontosoc::load::{load_graphs, load_schema, read_file};
use ontosoc::rdf::{Graph, PrefixMap, Term};
use ontosoc::schema::{export_alignment, schema_to_graph};
use ontosoc::sparql::{evaluate, parse_query, to_json_results};
use ontosoc::turtle::{serialize_turtle, Document};
use ontosoc::validate::validate;
use ontosoc::vocab::{rdf, standard_prefixes};
use ontosoc_service::{AppState, ServiceConfig, DEFAULT_MAX_QUERY_BYTES, DEFAULT_PORT};
use serde_json::json;

#[derive(Parser)]
#[command(name = "ontosoc", version, about = "OntoSOC knowledge-base tool")]
struct Cli {
    /// Schema in Turtle; the builtin schema is used when absent.
    #[arg(long, global = true, env = "ONTOSOC_SCHEMA")]
    schema: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check data files against the schema.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run a SPARQL SELECT query over the merged data files.
    #[command(group(ArgGroup::new("source").required(true).args(["query", "file"])))]
    Query {
        #[arg(long)]
        query: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the activity-theory derivation and emit the resulting schema.
    DeriveSchema {
        /// Triad file: one comma-separated triad per line.
        #[arg(long)]
        triads: Option<PathBuf>,
        /// Keep/drop decision table.
        #[arg(long)]
        decisions: Option<PathBuf>,
        /// Where to write the schema; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the alignment triples to external vocabularies.
    ExportAlignment {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Triple, class and predicate counts.
    Stats {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Snapshot file, created on first start.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        no_validate: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_QUERY_BYTES)]
        max_query_bytes: usize,
        /// Turtle files loaded when the snapshot does not exist yet.
        seed: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let default_level = if matches!(cli.command, Command::Serve { .. }) { "info" } else { "warn" };
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default_level)),
        )
        .init();

    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let schema_path = cli.schema.as_deref();
    match cli.command {
        Command::Validate { files, format } => {
            let schema = load_schema(schema_path)?;
            let (graph, _) = load_graphs(&files)?;
            let report = validate(&graph, &schema);
            match format {
                Format::Text => emit(&report.to_text())?,
                Format::Json => emit_json(&report.to_json())?,
            }
            Ok(if report.conforms() { 0 } else { 1 })
        }
        Command::Query { query, file, files, format } => {
            let text = match (query, file) {
                (Some(q), None) => q,
                (None, Some(f)) => read_file(&f)?,
                _ => unreachable!("clap enforces exactly one query source"),
            };
            let query = parse_query(&text).map_err(|e| anyhow!("query: {e}"))?;
            let (graph, _) = load_graphs(&files)?;
            let table = evaluate(&query, &graph);
            match format {
                Format::Text => emit(&table.render(Some(&query.prefixes)))?,
                Format::Json => emit(&format!("{}\n", to_json_results(&table)))?,
            }
            Ok(0)
        }
        Command::DeriveSchema { triads, decisions, out } => {
            derive_schema(triads.as_deref(), decisions.as_deref(), out.as_deref())?;
            Ok(0)
        }
        Command::ExportAlignment { out } => {
            let schema = load_schema(schema_path)?;
            write_turtle(export_alignment(&schema), out.as_deref())?;
            Ok(0)
        }
        Command::Stats { files, format } => {
            let (graph, mut prefixes) = load_graphs(&files)?;
            for (label, ns) in standard_prefixes().iter() {
                if prefixes.get(label).is_none() {
                    prefixes.set(label, ns.clone());
                }
            }
            let stats = Stats::of(&graph, &prefixes);
            match format {
                Format::Text => emit(&stats.to_text())?,
                Format::Json => emit_json(&stats.to_json())?,
            }
            Ok(0)
        }
        Command::Serve { port, host, data, no_validate, max_query_bytes, seed } => {
            let config = ServiceConfig {
                addr: SocketAddr::new(host, port),
                data,
                schema: cli.schema,
                validate_on_write: !no_validate,
                max_query_bytes,
                seed,
            };
            serve(config)?;
            Ok(0)
        }
    }
}

fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn emit_json(value: &serde_json::Value) -> Result<()> {
    emit(&format!("{}\n", serde_json::to_string_pretty(value)?))
}

fn write_turtle(graph: Graph, out: Option<&Path>) -> Result<()> {
    let text = serialize_turtle(&Document::new(graph, standard_prefixes()));
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("{}", path.display())),
        None => emit(&text),
    }
}

fn derive_schema(triads: Option<&Path>, decisions: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let mut config = match triads {
        Some(path) => DerivationConfig::with_triads(
            parse_triads(&read_file(path)?).with_context(|| format!("{}", path.display()))?,
        ),
        None => DerivationConfig::default(),
    };
    if let Some(path) = decisions {
        config.decisions =
            read_file(path)?.parse::<DecisionTable>().with_context(|| format!("{}", path.display()))?;
    }
    let d = derive(&config)?;
    for w in &d.warnings {
        eprintln!("warning: {w}");
    }
    let summary = format!(
        "{}\ncandidates={} pairs={} reduction={:.0}% final={}\n",
        d.implications.render().trim_end(),
        d.stats.candidates,
        d.stats.pairs,
        d.stats.reduction_percent(),
        d.relations.len()
    );
    emit(&summary)?;
    if out.is_none() {
        emit("\n")?;
    }
    write_turtle(schema_to_graph(&d.schema), out)
}

struct Stats {
    triples: usize,
    classes: BTreeMap<String, usize>,
    predicates: BTreeMap<String, usize>,
}

impl Stats {
    fn of(graph: &Graph, prefixes: &PrefixMap) -> Stats {
        let show = |t: &Term| match t.as_iri().and_then(|i| prefixes.shorten(i)) {
            Some((label, local)) if !local.is_empty() => format!("{label}:{local}"),
            _ => t.to_string(),
        };
        let mut classes = BTreeMap::new();
        let mut predicates = BTreeMap::new();
        for t in graph.iter() {
            *predicates.entry(show(&t.predicate_term())).or_insert(0) += 1;
            if *t.predicate() == rdf::type_() {
                *classes.entry(show(t.object())).or_insert(0) += 1;
            }
        }
        Stats { triples: graph.len(), classes, predicates }
    }

    fn to_text(&self) -> String {
        let mut out = format!("triples\t{}\n", self.triples);
        for (c, n) in &self.classes {
            out.push_str(&format!("class\t{c}\t{n}\n"));
        }
        for (p, n) in &self.predicates {
            out.push_str(&format!("predicate\t{p}\t{n}\n"));
        }
        out
    }

    fn to_json(&self) -> serde_json::Value {
        json!({ "triples": self.triples, "classes": self.classes, "predicates": self.predicates })
    }
}

fn serve(config: ServiceConfig) -> Result<()> {
    let state = Arc::new(AppState::open(&config)?);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = ontosoc_service::bind(config.addr).await?;
        let addr = listener.local_addr()?;
        let snapshot = state.snapshot();
        eprintln!("listening on http://{addr} (triples={} epoch={})", snapshot.graph.len(), snapshot.epoch);
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        ontosoc_service::serve(listener, state, shutdown).await?;
        Ok(())
    })
}
