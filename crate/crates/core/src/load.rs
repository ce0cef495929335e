//! Reading data and schema files from disk.
//!
//! Data files are merged into one graph. Blank node labels are kept as
//! written, so `_:a` in two files denotes the same node.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::rdf::{Graph, PrefixMap};
use crate::schema::{builtin_schema, schema_from_graph, SchemaDef, SchemaError};
use crate::turtle::{parse_turtle, ParseError};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{}: {cause}", path.display())]
    Io { path: PathBuf, cause: std::io::Error },
    #[error("{}:{cause}", path.display())]
    Parse { path: PathBuf, cause: ParseError },
    #[error("{}: {cause}", path.display())]
    Schema { path: PathBuf, cause: SchemaError },
}

impl LoadError {
    pub fn path(&self) -> &Path {
        match self {
            LoadError::Io { path, .. } | LoadError::Parse { path, .. } | LoadError::Schema { path, .. } => path,
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|cause| LoadError::Io { path: path.to_path_buf(), cause })
}

/// Parses every file and merges the triples. Prefixes are merged too; a
/// later file wins when two files bind the same prefix differently.
pub fn load_graphs<P: AsRef<Path>>(paths: &[P]) -> Result<(Graph, PrefixMap), LoadError> {
    let mut graph = Graph::new();
    let mut prefixes = PrefixMap::new();
    for path in paths {
        let path = path.as_ref();
        let text = read_file(path)?;
        let doc = parse_turtle(&text, None).map_err(|cause| LoadError::Parse { path: path.to_path_buf(), cause })?;
        graph.extend_from(&doc.graph);
        for (prefix, ns) in doc.prefixes.iter() {
            prefixes.set(prefix, ns.clone());
        }
    }
    Ok((graph, prefixes))
}

/// Loads a schema from a Turtle file, or returns the builtin one.
pub fn load_schema(path: Option<&Path>) -> Result<SchemaDef, LoadError> {
    let Some(path) = path else { return Ok(builtin_schema()) };
    let (graph, _) = load_graphs(&[path])?;
    schema_from_graph(&graph).map_err(|cause| LoadError::Schema { path: path.to_path_buf(), cause })
}
