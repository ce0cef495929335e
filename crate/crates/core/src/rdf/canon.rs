//! Blank-node canonical relabeling and graph comparison up to blank renaming.
//!
//! Colors start uniform and are refined from the signature of each blank
//! node's incident triples (neighbouring blanks rendered by their current
//! color) until the partition is stable. Remaining ties are broken by
//! individualizing the lowest-labelled member of the smallest tied class and
//! refining again. Colors are ranks of sorted signatures, so the final
//! labelling `_:c<rank>` follows the lexical order of signatures.
//!
//! Exact for graphs whose tied blanks are automorphic, which covers every
//! graph this crate produces; it is not a general isomorphism decision
//! procedure.

use std::collections::{BTreeMap, BTreeSet};

use super::{BlankNode, Graph, Term, Triple};

fn render(term: &Term, focus: &BlankNode, colors: &BTreeMap<BlankNode, usize>) -> String {
    match term {
        Term::Blank(b) if b == focus => "*".to_string(),
        Term::Blank(b) => format!("_:{}", colors[b]),
        other => other.to_string(),
    }
}

fn refine(
    colors: &BTreeMap<BlankNode, usize>,
    incident: &BTreeMap<BlankNode, Vec<Triple>>,
) -> BTreeMap<BlankNode, usize> {
    let signatures: BTreeMap<&BlankNode, (usize, Vec<String>)> = incident
        .iter()
        .map(|(b, triples)| {
            let mut sig: Vec<String> = triples
                .iter()
                .map(|t| {
                    format!(
                        "{} {} {}",
                        render(t.subject(), b, colors),
                        t.predicate(),
                        render(t.object(), b, colors)
                    )
                })
                .collect();
            sig.sort();
            (b, (colors[b], sig))
        })
        .collect();
    let ranks: BTreeSet<&(usize, Vec<String>)> = signatures.values().collect();
    let ranks: BTreeMap<&(usize, Vec<String>), usize> =
        ranks.into_iter().enumerate().map(|(i, s)| (s, i)).collect();
    signatures
        .iter()
        .map(|(b, sig)| ((*b).clone(), ranks[sig]))
        .collect()
}

fn distinct(colors: &BTreeMap<BlankNode, usize>) -> usize {
    colors.values().collect::<BTreeSet<_>>().len()
}

fn stable_coloring(
    mut colors: BTreeMap<BlankNode, usize>,
    incident: &BTreeMap<BlankNode, Vec<Triple>>,
) -> BTreeMap<BlankNode, usize> {
    loop {
        let next = refine(&colors, incident);
        let done = distinct(&next) == distinct(&colors);
        colors = next;
        if done {
            return colors;
        }
    }
}

/// Maps each blank node of `g` to its canonical label.
pub fn canonical_labels(g: &Graph) -> BTreeMap<BlankNode, BlankNode> {
    let mut incident: BTreeMap<BlankNode, Vec<Triple>> = BTreeMap::new();
    for t in g.iter() {
        for term in [t.subject(), t.object()] {
            if let Term::Blank(b) = term {
                let entry = incident.entry(b.clone()).or_default();
                if entry.last() != Some(&t) {
                    entry.push(t.clone());
                }
            }
        }
    }
    let mut colors: BTreeMap<BlankNode, usize> = incident.keys().map(|b| (b.clone(), 0)).collect();
    colors = stable_coloring(colors, &incident);
    while distinct(&colors) < colors.len() {
        let mut classes: BTreeMap<usize, Vec<&BlankNode>> = BTreeMap::new();
        for (b, c) in &colors {
            classes.entry(*c).or_default().push(b);
        }
        let (_, tied) = classes
            .iter()
            .filter(|(_, members)| members.len() > 1)
            .min_by_key(|(color, members)| (members.len(), **color))
            .expect("a tied class exists");
        let chosen = tied[0].clone();
        let top = colors.len();
        colors.insert(chosen, top);
        colors = stable_coloring(colors, &incident);
    }
    colors
        .into_iter()
        .map(|(b, c)| {
            let label = BlankNode::new(format!("c{c}")).expect("canonical label is valid");
            (b, label)
        })
        .collect()
}

/// Copy of `g` with every blank node renamed to its canonical label.
pub fn canonicalize(g: &Graph) -> Graph {
    let labels = canonical_labels(g);
    let rename = |term: &Term| match term {
        Term::Blank(b) => Term::Blank(labels[b].clone()),
        other => other.clone(),
    };
    g.iter()
        .map(|t| {
            Triple::new(rename(t.subject()), t.predicate_term(), rename(t.object()))
                .expect("renaming blanks preserves well-formedness")
        })
        .collect()
}

/// True iff the graphs have the same triples after canonical blank relabeling.
pub fn graph_equal(a: &Graph, b: &Graph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    canonicalize(a) == canonicalize(b)
}
