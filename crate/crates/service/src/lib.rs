//! HTTP front end for the knowledge base.
//!
//! | route | purpose |
//! |---|---|
//! | `GET /sparql?query=...` | SELECT query, SPARQL JSON results |
//! | `POST /graph` | merge a Turtle document, validated against the schema |
//! | `GET /health` | triple count and write epoch |
//!
//! Readers take an `Arc` of the current [`Snapshot`] and never wait for a
//! writer. Writers are serialized; each builds a new snapshot, persists it
//! and only then publishes it, so a query always sees one complete epoch.
//!
//! The snapshot file is Turtle preceded by a `# ontosoc-snapshot epoch=N`
//! comment line. It is replaced atomically (write to a sibling temp file,
//! sync, rename).

use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ontosoc::load::{load_graphs, load_schema, LoadError};
use ontosoc::rdf::Graph;
use ontosoc::schema::SchemaDef;
use ontosoc::sparql::{evaluate, parse_query, to_json_results};
use ontosoc::turtle::{parse_turtle, serialize_turtle, Document};
use ontosoc::validate::validate;
use ontosoc::vocab::standard_prefixes;
use serde_json::json;
use thiserror::Error;
use tokio::net::TcpListener;

pub const DEFAULT_PORT: u16 = 7474;
pub const DEFAULT_MAX_QUERY_BYTES: usize = 16 * 1024;
pub const SPARQL_RESULTS_JSON: &str = "application/sparql-results+json";
const SNAPSHOT_HEADER: &str = "# ontosoc-snapshot epoch=";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub addr: SocketAddr,
    /// Snapshot file. Without one the service runs purely in memory.
    pub data: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub validate_on_write: bool,
    pub max_query_bytes: usize,
    /// Turtle files used to populate the store when no snapshot exists yet.
    pub seed: Vec<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            addr: SocketAddr::from(([127, 0, 0, 1], DEFAULT_PORT)),
            data: None,
            schema: None,
            validate_on_write: true,
            max_query_bytes: DEFAULT_MAX_QUERY_BYTES,
            seed: Vec::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{}: {source}", path.display())]
    Snapshot { path: PathBuf, source: std::io::Error },
    #[error("{}: bad snapshot header: {line}", path.display())]
    SnapshotHeader { path: PathBuf, line: String },
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error("server error: {0}")]
    Serve(std::io::Error),
}

/// One published state of the store.
#[derive(Debug, Clone, Default)]
pub struct Snapshot {
    pub graph: Graph,
    pub epoch: u64,
    /// Violations present in this graph, as machine lines. A write is
    /// rejected only for violations not already in this set.
    known_violations: Arc<BTreeSet<String>>,
}

impl Snapshot {
    pub fn new(graph: Graph, epoch: u64) -> Self {
        Snapshot { graph, epoch, known_violations: Arc::default() }
    }
}

#[derive(Debug, Error)]
pub enum WriteError {
    #[error("{} new violation(s)", .0.lines().count())]
    Invalid(String),
    #[error("snapshot write failed: {0}")]
    Persist(std::io::Error),
}

pub struct AppState {
    current: RwLock<Arc<Snapshot>>,
    writer: Mutex<()>,
    schema: SchemaDef,
    data: Option<PathBuf>,
    validate_on_write: bool,
    max_query_bytes: usize,
}

impl AppState {
    /// Loads the schema and the snapshot (or the seed files when there is
    /// no snapshot yet, writing them out as epoch 0).
    pub fn open(config: &ServiceConfig) -> Result<AppState, ServiceError> {
        let schema = load_schema(config.schema.as_deref())?;
        let existing = match &config.data {
            Some(path) if path.exists() => Some(read_snapshot(path)?),
            _ => None,
        };
        let snapshot = match existing {
            Some(s) => s,
            None => {
                let (graph, _) = load_graphs(&config.seed)?;
                let s = Snapshot::new(graph, 0);
                if let Some(path) = &config.data {
                    write_snapshot(path, &s).map_err(|source| ServiceError::Snapshot { path: path.clone(), source })?;
                }
                s
            }
        };
        Ok(AppState::from_parts(snapshot, schema, config))
    }

    pub fn from_parts(mut snapshot: Snapshot, schema: SchemaDef, config: &ServiceConfig) -> AppState {
        if config.validate_on_write {
            snapshot.known_violations = Arc::new(violation_lines(&snapshot.graph, &schema));
            if !snapshot.known_violations.is_empty() {
                tracing::warn!(count = snapshot.known_violations.len(), "store starts with violations");
            }
        }
        AppState {
            current: RwLock::new(Arc::new(snapshot)),
            writer: Mutex::new(()),
            schema,
            data: config.data.clone(),
            validate_on_write: config.validate_on_write,
            max_query_bytes: config.max_query_bytes,
        }
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Merges `incoming`, returning how many triples were new and the epoch
    /// now published. Nothing is written and the epoch stays put when every
    /// triple is already there.
    pub fn merge(&self, incoming: &Graph) -> Result<(usize, u64), WriteError> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let current = self.snapshot();
        let mut graph = current.graph.clone();
        let added = graph.extend_from(incoming);
        if added == 0 {
            return Ok((0, current.epoch));
        }
        let mut next = Snapshot::new(graph, current.epoch + 1);
        if self.validate_on_write {
            let lines = violation_lines(&next.graph, &self.schema);
            let fresh: Vec<&String> = lines.difference(&current.known_violations).collect();
            if !fresh.is_empty() {
                return Err(WriteError::Invalid(fresh.into_iter().map(|l| format!("{l}\n")).collect()));
            }
            next.known_violations = Arc::new(lines);
        }
        if let Some(path) = &self.data {
            write_snapshot(path, &next).map_err(WriteError::Persist)?;
        }
        let epoch = next.epoch;
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(next);
        Ok((added, epoch))
    }
}

fn violation_lines(graph: &Graph, schema: &SchemaDef) -> BTreeSet<String> {
    validate(graph, schema).violations.iter().map(|v| v.machine_line()).collect()
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, ServiceError> {
    let text = std::fs::read_to_string(path).map_err(|source| ServiceError::Snapshot { path: path.into(), source })?;
    let epoch = match text.lines().next() {
        Some(first) if first.starts_with(SNAPSHOT_HEADER) => first[SNAPSHOT_HEADER.len()..]
            .trim()
            .parse()
            .map_err(|_| ServiceError::SnapshotHeader { path: path.into(), line: first.to_string() })?,
        _ => 0,
    };
    let doc = parse_turtle(&text, None)
        .map_err(|cause| ServiceError::Load(LoadError::Parse { path: path.into(), cause }))?;
    Ok(Snapshot::new(doc.graph, epoch))
}

pub fn write_snapshot(path: &Path, snapshot: &Snapshot) -> std::io::Result<()> {
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let body = serialize_turtle(&Document::new(snapshot.graph.clone(), standard_prefixes()));
    let mut file = std::fs::File::create(&tmp)?;
    writeln!(file, "{SNAPSHOT_HEADER}{}", snapshot.epoch)?;
    file.write_all(body.as_bytes())?;
    file.sync_all()?;
    drop(file);
    std::fs::rename(&tmp, path)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        // Directory fsync makes the rename durable; not every platform allows it.
        let _ = std::fs::File::open(dir).and_then(|d| d.sync_all());
    }
    Ok(())
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sparql", get(sparql))
        .route("/graph", post(post_graph))
        .route("/health", get(health))
        .with_state(state)
}

fn json_error(status: StatusCode, message: impl Into<String>, position: Option<(usize, usize)>) -> Response {
    let mut body = json!({ "error": message.into() });
    if let Some((line, column)) = position {
        body["line"] = json!(line);
        body["column"] = json!(column);
    }
    (status, Json(body)).into_response()
}

async fn sparql(
    State(state): State<Arc<AppState>>,
    params: Result<Query<HashMap<String, String>>, QueryRejection>,
) -> Response {
    let params = match params {
        Ok(Query(p)) => p,
        Err(e) => return json_error(StatusCode::BAD_REQUEST, e.body_text(), None),
    };
    let Some(text) = params.get("query") else {
        return json_error(StatusCode::BAD_REQUEST, "missing query parameter", None);
    };
    if text.len() > state.max_query_bytes {
        return json_error(
            StatusCode::URI_TOO_LONG,
            format!("query is {} bytes; the limit is {}", text.len(), state.max_query_bytes),
            None,
        );
    }
    let query = match parse_query(text) {
        Ok(q) => q,
        Err(e) => return json_error(StatusCode::BAD_REQUEST, e.to_string(), Some(e.position())),
    };
    let snapshot = state.snapshot();
    let body = to_json_results(&evaluate(&query, &snapshot.graph));
    ([(header::CONTENT_TYPE, SPARQL_RESULTS_JSON)], body).into_response()
}

async fn post_graph(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let Ok(text) = std::str::from_utf8(&body) else {
        return json_error(StatusCode::BAD_REQUEST, "body is not UTF-8", None);
    };
    let doc = match parse_turtle(text, None) {
        Ok(doc) => doc,
        Err(e) => return json_error(StatusCode::BAD_REQUEST, e.to_string(), Some((e.line, e.column))),
    };
    let worker = state.clone();
    let outcome = tokio::task::spawn_blocking(move || worker.merge(&doc.graph)).await;
    match outcome {
        Ok(Ok((added, epoch))) => {
            tracing::info!(added, epoch, "graph merged");
            Json(json!({ "added": added, "epoch": epoch })).into_response()
        }
        Ok(Err(WriteError::Invalid(report))) => (
            StatusCode::UNPROCESSABLE_ENTITY,
            [(header::CONTENT_TYPE, "text/tab-separated-values; charset=utf-8")],
            report,
        )
            .into_response(),
        Ok(Err(e @ WriteError::Persist(_))) => {
            tracing::error!(error = %e, "snapshot write failed");
            json_error(StatusCode::INSUFFICIENT_STORAGE, e.to_string(), None)
        }
        Err(e) => json_error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string(), None),
    }
}

async fn health(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let s = state.snapshot();
    Json(json!({ "triples": s.graph.len(), "epoch": s.epoch }))
}

/// Binds the configured address. Port 0 picks a free port; the bound
/// address is available from the returned listener.
pub async fn bind(addr: SocketAddr) -> Result<TcpListener, ServiceError> {
    TcpListener::bind(addr).await.map_err(|source| ServiceError::Bind { addr, source })
}

pub async fn serve(
    listener: TcpListener,
    state: Arc<AppState>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> Result<(), ServiceError> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await.map_err(ServiceError::Serve)
}
