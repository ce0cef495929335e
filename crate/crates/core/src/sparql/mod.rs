//! SELECT queries over a [`Graph`](crate::rdf::Graph): PREFIX/BASE, a
//! projection list or `*`, basic graph patterns, OPTIONAL, equality and
//! inequality FILTERs, ORDER BY, LIMIT and OFFSET.
//!
//! Everything else (UNION, paths, CONSTRUCT, ASK, aggregates, ...) is
//! rejected at parse time with [`QueryError::Unsupported`].
//!
//! Inside a group, all triple patterns are joined first and OPTIONAL groups
//! are then left-joined in the order written, wherever they appear.

mod ast;
mod eval;
mod parser;

pub use ast::{CompareOp, Constraint, GroupPattern, OrderKey, Projection, Query, TermPattern, TriplePattern, Variable};
pub use eval::{compare_terms, evaluate, evaluate_bgp, evaluate_group, to_json_results, Binding, SolutionTable};
pub use parser::{parse_query, QueryError};
