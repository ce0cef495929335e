//! RDF terms, triples, prefix maps and the indexed in-memory graph.

mod canon;
mod graph;
mod prefix;
mod term;

pub use canon::{canonical_labels, canonicalize, graph_equal};
pub use graph::{Graph, IndexOrder, Pattern, Triple, TripleError};
pub use prefix::{PrefixError, PrefixMap};
pub use term::{BlankNode, Iri, Literal, LiteralAnnotation, Term, TermError, TermKind};
pub(crate) use term::escape_string;
