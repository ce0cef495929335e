//! Turtle subset: `@prefix`/`@base` (and their SPARQL-style forms), the `a`
//! keyword, `;` and `,` lists, IRIs, prefixed names, string literals with
//! language tags or datatypes, integers and decimals, labelled blank nodes
//! and comments. Collections and `[ ]` blank nodes are rejected.

mod parser;
mod serializer;

use crate::rdf::{Graph, Iri, PrefixMap};

pub use parser::{parse_turtle, ParseError};
pub(crate) use parser::Cursor;
pub use serializer::serialize_turtle;

/// A parsed Turtle file.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub graph: Graph,
    pub prefixes: PrefixMap,
    pub base: Option<Iri>,
}

impl Document {
    pub fn new(graph: Graph, prefixes: PrefixMap) -> Self {
        Document { graph, prefixes, base: None }
    }
}
