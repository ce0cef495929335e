//! Knowledge-base engine for the OntoSOC sociocultural activity ontology.
//!
//! * [`rdf`]: terms, triples and the indexed in-memory [`rdf::Graph`].
//! * [`turtle`]: Turtle subset parser and serializer.
//! * [`schema`]: the ontology as data and its OWL/RDFS rendering.
//! * [`hat`]: the activity-theory derivation pipeline that produces the
//!   ontology's core relations from the six-pole activity model.
//! * [`validate`]: domain/range, disjointness and subclass entailment checks.
//! * [`sparql`]: a SPARQL SELECT subset with OPTIONAL, FILTER and ORDER BY.
//! * [`load`]: reading data and schema files.

pub mod rdf;
pub mod turtle;
pub mod vocab;
pub mod schema;
pub mod hat;
pub mod load;
pub mod validate;
pub mod sparql;
