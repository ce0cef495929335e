mod common;

use std::collections::BTreeMap;

use common::*;
use ontosoc::rdf::{canonicalize, graph_equal, BlankNode, Graph, IndexOrder, Pattern, Term, Triple};
use ontosoc::turtle::{parse_turtle, serialize_turtle, Document};
use ontosoc::vocab::standard_prefixes;
use proptest::prelude::*;

fn relabel(g: &Graph, salt: &str) -> Graph {
    let map = |t: &Term| match t {
        Term::Blank(b) => Term::Blank(BlankNode::new(format!("{salt}{}", b.label())).unwrap()),
        other => other.clone(),
    };
    g.iter()
        .map(|t| Triple::new(map(t.subject()), t.predicate_term(), map(t.object())).unwrap())
        .collect()
}

fn brute_force(g: &Graph, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> Vec<Triple> {
    let mut out: Vec<Triple> = g
        .iter()
        .filter(|t| {
            s.is_none_or(|s| s == t.subject())
                && p.is_none_or(|p| *p == t.predicate_term())
                && o.is_none_or(|o| o == t.object())
        })
        .collect();
    out.sort_by_key(Triple::lexical_key);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn turtle_round_trip_preserves_the_graph(g in graph(40, 8, 4)) {
        let doc = Document::new(g.clone(), standard_prefixes());
        let text = serialize_turtle(&doc);
        let back = parse_turtle(&text, None).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert!(graph_equal(&back.graph, &g), "{}", text);
        prop_assert_eq!(serialize_turtle(&Document::new(back.graph, standard_prefixes())), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn every_index_answers_like_a_scan(
        g in graph(60, 5, 3),
        s in proptest::option::of(node(5)),
        p in proptest::option::of(predicate(3)),
        o in proptest::option::of(object(5)),
    ) {
        let p = p.map(Term::Iri);
        let expected = brute_force(&g, s.as_ref(), p.as_ref(), o.as_ref());
        let pattern = || Pattern::new(s.as_ref(), p.as_ref(), o.as_ref());
        prop_assert_eq!(&g.matches(pattern()), &expected);
        for order in [IndexOrder::Spo, IndexOrder::Pos, IndexOrder::Osp] {
            let mut got = g.matches_with(pattern(), order);
            got.sort_by_key(Triple::lexical_key);
            prop_assert_eq!(&got, &expected, "{:?}", order);
        }
    }

    #[test]
    fn insert_and_remove_keep_counts(g in graph(60, 5, 3), extra in triple(5, 3)) {
        let mut h = g.clone();
        let was_new = h.insert(extra.clone());
        prop_assert_eq!(was_new, !g.contains(&extra));
        prop_assert_eq!(h.len(), g.len() + usize::from(was_new));
        prop_assert!(!h.insert(extra.clone()));
        if was_new {
            prop_assert!(h.remove(&extra));
            prop_assert_eq!(&h, &g);
        }
    }

    #[test]
    fn blank_renaming_is_invisible_to_graph_equal(g in graph(30, 4, 2)) {
        let renamed = relabel(&g, "z");
        prop_assert!(graph_equal(&g, &renamed));
        prop_assert_eq!(canonicalize(&g), canonicalize(&renamed));
    }

    #[test]
    fn graph_equal_detects_an_extra_triple(g in graph(30, 4, 2), extra in triple(4, 2)) {
        let mut h = g.clone();
        if h.insert(extra) {
            prop_assert!(!graph_equal(&g, &h));
        }
    }
}

#[test]
fn corpus_files_round_trip() {
    for file in CORPUS {
        let doc = parse_turtle(&read(file), None).unwrap();
        let text = serialize_turtle(&doc);
        let back = parse_turtle(&text, None).unwrap();
        assert_eq!(back.graph, doc.graph, "{file}");
    }
}

#[test]
fn corpus_term_statistics() {
    let g = corpus();
    let mut per_predicate: BTreeMap<String, usize> = BTreeMap::new();
    for t in g.iter() {
        *per_predicate.entry(t.predicate().to_string()).or_default() += 1;
    }
    let count = |local: &str| per_predicate[&format!("<http://maroua-univ/ns/ontosoc#{local}>")];
    for p in ["isUsedBy", "isPlayedBy", "isCreatedBy", "isRealizeBy", "isMemberOf", "isOrganisedBy"] {
        assert_eq!(count(p), 3, "{p}");
    }
    assert_eq!(brute_force(&g, None, None, None).len(), g.len());
}
