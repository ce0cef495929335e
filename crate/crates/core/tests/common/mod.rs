#![allow(dead_code)]

use std::path::PathBuf;

use ontosoc::rdf::{Graph, Iri, Literal, Term, Triple};
use ontosoc::turtle::parse_turtle;
use ontosoc::vocab::xsd;
use proptest::prelude::*;

pub const EX: &str = "http://example.org/";

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn read(rel: &str) -> String {
    let path = workspace_root().join(rel);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn load(rel: &str) -> Graph {
    parse_turtle(&read(rel), None).unwrap_or_else(|e| panic!("{rel}: {e}")).graph
}

pub const CORPUS: [&str; 3] = ["corpus/naakosenda.ttl", "corpus/cde_saare.ttl", "corpus/club_2_0.ttl"];

pub fn corpus() -> Graph {
    let mut g = Graph::new();
    for f in CORPUS {
        g.extend_from(&load(f));
    }
    g
}

pub fn ex(local: &str) -> Iri {
    Iri::new(format!("{EX}{local}")).unwrap()
}

pub fn literal() -> impl Strategy<Value = Literal> {
    let text = "[a-zA-Z0-9 _\"'\\\\\n\t\u{e9}\u{1F600}-]{0,8}";
    prop_oneof![
        text.prop_map(Literal::string),
        (text, "[a-z]{2}(-[a-z]{2})?").prop_map(|(s, l)| Literal::lang_tagged(s, &l).unwrap()),
        any::<i32>().prop_map(|n| Literal::integer(n.into())),
        ("[0-9]{1,3}", "[0-9]{1,3}").prop_map(|(a, b)| Literal::typed(format!("{a}.{b}"), xsd::decimal())),
        (text, "[a-z]{1,4}").prop_map(|(s, dt)| Literal::typed(s, ex(&format!("dt_{dt}")))),
    ]
}

/// Node from a small universe so that random graphs share terms.
pub fn node(universe: usize) -> impl Strategy<Value = Term> {
    prop_oneof![
        4 => (0..universe).prop_map(|i| Term::Iri(ex(&format!("n{i}")))),
        1 => (0..3usize).prop_map(|i| Term::blank(format!("b{i}")).unwrap()),
    ]
}

pub fn predicate(universe: usize) -> impl Strategy<Value = Iri> {
    (0..universe).prop_map(|i| ex(&format!("p{i}")))
}

pub fn object(universe: usize) -> impl Strategy<Value = Term> {
    prop_oneof![3 => node(universe), 1 => literal().prop_map(Term::Literal)]
}

pub fn triple(nodes: usize, preds: usize) -> impl Strategy<Value = Triple> {
    (node(nodes), predicate(preds), object(nodes))
        .prop_map(|(s, p, o)| Triple::new(s, Term::Iri(p), o).unwrap())
}

pub fn graph(max: usize, nodes: usize, preds: usize) -> impl Strategy<Value = Graph> {
    prop::collection::vec(triple(nodes, preds), 0..=max).prop_map(|ts| ts.into_iter().collect())
}
