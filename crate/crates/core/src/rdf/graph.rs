use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{Iri, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error("literal {0} cannot be the subject of a triple")]
    LiteralSubject(Term),
    #[error("predicate must be an IRI, found {0}")]
    NonIriPredicate(Term),
}

/// A well-formed RDF triple: IRI-or-blank subject, IRI predicate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    subject: Term,
    predicate: Iri,
    object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self, TripleError> {
        if subject.is_literal() {
            return Err(TripleError::LiteralSubject(subject));
        }
        let predicate = match predicate {
            Term::Iri(iri) => iri,
            other => return Err(TripleError::NonIriPredicate(other)),
        };
        Ok(Triple { subject, predicate, object })
    }

    /// Builds a triple whose subject is an IRI; cannot fail.
    pub fn from_iris(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple { subject: Term::Iri(subject), predicate, object: object.into() }
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Iri {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn predicate_term(&self) -> Term {
        Term::Iri(self.predicate.clone())
    }

    /// Sort key: the N-Triples strings of (subject, predicate, object).
    pub fn lexical_key(&self) -> (String, String, String) {
        (self.subject.to_string(), self.predicate.to_string(), self.object.to_string())
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// A triple pattern: `None` slots are wildcards.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Pattern<'a> {
    pub subject: Option<&'a Term>,
    pub predicate: Option<&'a Term>,
    pub object: Option<&'a Term>,
}

impl<'a> Pattern<'a> {
    pub fn new(subject: Option<&'a Term>, predicate: Option<&'a Term>, object: Option<&'a Term>) -> Self {
        Pattern { subject, predicate, object }
    }

    pub fn any() -> Self {
        Self::default()
    }

    pub fn matches(&self, t: &Triple) -> bool {
        self.subject.is_none_or(|s| s == t.subject())
            && self.predicate.is_none_or(|p| p.as_iri() == Some(t.predicate()))
            && self.object.is_none_or(|o| o == t.object())
    }
}

/// The three permutation indexes kept by [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexOrder {
    Spo,
    Pos,
    Osp,
}

type Level = BTreeMap<Term, BTreeSet<Term>>;
type Index = BTreeMap<Term, Level>;

fn index_insert(index: &mut Index, a: &Term, b: &Term, c: &Term) -> bool {
    index
        .entry(a.clone())
        .or_default()
        .entry(b.clone())
        .or_default()
        .insert(c.clone())
}

fn index_remove(index: &mut Index, a: &Term, b: &Term, c: &Term) -> bool {
    let Some(level1) = index.get_mut(a) else { return false };
    let Some(level2) = level1.get_mut(b) else { return false };
    let removed = level2.remove(c);
    if level2.is_empty() {
        level1.remove(b);
    }
    if level1.is_empty() {
        index.remove(a);
    }
    removed
}

/// Walks an index with up to three leading bound keys, yielding `(a, b, c)`.
fn index_scan<'g>(
    index: &'g Index,
    a: Option<&Term>,
    b: Option<&Term>,
    c: Option<&Term>,
    out: &mut dyn FnMut(&'g Term, &'g Term, &'g Term),
) {
    let firsts: Box<dyn Iterator<Item = (&'g Term, &'g Level)>> = match a {
        Some(a) => Box::new(index.get_key_value(a).into_iter()),
        None => Box::new(index.iter()),
    };
    for (ka, level1) in firsts {
        let seconds: Box<dyn Iterator<Item = (&'g Term, &'g BTreeSet<Term>)>> = match b {
            Some(b) => Box::new(level1.get_key_value(b).into_iter()),
            None => Box::new(level1.iter()),
        };
        for (kb, level2) in seconds {
            match c {
                Some(c) => {
                    if let Some(kc) = level2.get(c) {
                        out(ka, kb, kc);
                    }
                }
                None => level2.iter().for_each(|kc| out(ka, kb, kc)),
            }
        }
    }
}

/// Indexed in-memory triple set.
///
/// Three nested indexes (SPO, POS, OSP) are kept in lock step with the
/// triple set. Pattern matching picks the index whose bound prefix is
/// longest and returns triples sorted lexically by the N-Triples strings of
/// (subject, predicate, object).
///
/// `Graph` is `Send + Sync`; share it behind `Arc`/`RwLock` for many readers
/// or one writer.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    spo: Index,
    pos: Index,
    osp: Index,
    len: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns true iff the triple was not already present.
    pub fn insert(&mut self, t: Triple) -> bool {
        let p = t.predicate_term();
        let inserted = index_insert(&mut self.spo, &t.subject, &p, &t.object);
        if inserted {
            index_insert(&mut self.pos, &p, &t.object, &t.subject);
            index_insert(&mut self.osp, &t.object, &t.subject, &p);
            self.len += 1;
        }
        inserted
    }

    /// Returns true iff the triple was present.
    pub fn remove(&mut self, t: &Triple) -> bool {
        let p = t.predicate_term();
        let removed = index_remove(&mut self.spo, &t.subject, &p, &t.object);
        if removed {
            index_remove(&mut self.pos, &p, &t.object, &t.subject);
            index_remove(&mut self.osp, &t.object, &t.subject, &p);
            self.len -= 1;
        }
        removed
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.spo
            .get(&t.subject)
            .and_then(|l1| l1.get(&Term::Iri(t.predicate.clone())))
            .is_some_and(|l2| l2.contains(&t.object))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Adds every triple of `other`; returns how many were new.
    pub fn extend_from(&mut self, other: &Graph) -> usize {
        other.iter().filter(|t| self.insert(t.clone())).count()
    }

    /// Iterates in SPO index order (structural, not lexical).
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().flat_map(|(s, l1)| {
            l1.iter().flat_map(move |(p, l2)| {
                l2.iter().map(move |o| Triple {
                    subject: s.clone(),
                    predicate: p.as_iri().expect("indexed predicate is an IRI").clone(),
                    object: o.clone(),
                })
            })
        })
    }

    /// All triples sorted lexically by (subject, predicate, object) strings.
    pub fn triples_sorted(&self) -> Vec<Triple> {
        let mut all: Vec<Triple> = self.iter().collect();
        all.sort_by_cached_key(Triple::lexical_key);
        all
    }

    /// Index chosen for a pattern: the one whose bound prefix is longest.
    pub fn best_index(pattern: &Pattern<'_>) -> IndexOrder {
        match (pattern.subject.is_some(), pattern.predicate.is_some(), pattern.object.is_some()) {
            (true, true, _) | (true, false, false) | (false, false, false) => IndexOrder::Spo,
            (false, true, _) => IndexOrder::Pos,
            (_, false, true) => IndexOrder::Osp,
        }
    }

    /// Triples matching every bound slot, in lexical (s, p, o) order.
    pub fn matches(&self, pattern: Pattern<'_>) -> Vec<Triple> {
        self.matches_with(pattern, Self::best_index(&pattern))
    }

    /// Same as [`Graph::matches`] but forces the given index. Slots that are
    /// not a prefix of the index order are filtered during the scan.
    pub fn matches_with(&self, pattern: Pattern<'_>, order: IndexOrder) -> Vec<Triple> {
        // A non-IRI predicate can never match.
        if pattern.predicate.is_some_and(|p| !p.is_iri()) {
            return Vec::new();
        }
        let mut found = Vec::new();
        let (s, p, o) = (pattern.subject, pattern.predicate, pattern.object);
        let mut push = |s: &Term, p: &Term, o: &Term| {
            found.push(Triple {
                subject: s.clone(),
                predicate: p.as_iri().expect("indexed predicate is an IRI").clone(),
                object: o.clone(),
            })
        };
        match order {
            IndexOrder::Spo => {
                let c = if p.is_some() { o } else { None };
                index_scan(&self.spo, s, p, c, &mut |s, p, o| push(s, p, o))
            }
            IndexOrder::Pos => {
                let c = if o.is_some() { s } else { None };
                index_scan(&self.pos, p, o, c, &mut |p, o, s| push(s, p, o))
            }
            IndexOrder::Osp => {
                let c = if s.is_some() { p } else { None };
                index_scan(&self.osp, o, s, c, &mut |o, s, p| push(s, p, o))
            }
        }
        found.retain(|t| pattern.matches(t));
        found.sort_by_cached_key(Triple::lexical_key);
        found
    }

    /// Distinct subject terms.
    pub fn subjects(&self) -> impl Iterator<Item = &Term> {
        self.spo.keys()
    }

    /// Distinct object terms.
    pub fn objects(&self) -> impl Iterator<Item = &Term> {
        self.osp.keys()
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Term> {
        self.pos.keys()
    }

    #[cfg(test)]
    pub(crate) fn indexes_consistent(&self) -> bool {
        let count = |idx: &Index| idx.values().flat_map(|l1| l1.values()).map(BTreeSet::len).sum::<usize>();
        count(&self.spo) == self.len
            && count(&self.pos) == self.len
            && count(&self.osp) == self.len
            && self.iter().all(|t| {
                let p = t.predicate_term();
                self.pos.get(&p).and_then(|l| l.get(&t.object)).is_some_and(|l| l.contains(&t.subject))
                    && self.osp.get(&t.object).and_then(|l| l.get(&t.subject)).is_some_and(|l| l.contains(&p))
            })
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        for t in iter {
            g.insert(t);
        }
        g
    }
}

/// Exact equality of triple sets, blank labels included. For equality up to
/// blank-node renaming use [`super::graph_equal`].
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.spo == other.spo
    }
}

impl Eq for Graph {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Literal;

    fn iri(s: &str) -> Term {
        Term::iri(format!("http://example.org/{s}")).unwrap()
    }

    fn t(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(iri(s), iri(p), iri(o)).unwrap()
    }

    #[test]
    fn insert_is_set_semantics() {
        let mut g = Graph::new();
        assert!(g.insert(t("a", "p", "b")));
        assert_eq!(g.len(), 1);
        assert!(!g.insert(t("a", "p", "b")));
        assert_eq!(g.len(), 1);
        assert!(g.insert(t("a", "p", "c")));
        assert_eq!(g.len(), 2);
        assert!(g.indexes_consistent());
    }

    #[test]
    fn membership_triple_inserts() {
        let mut g = Graph::new();
        let tangoche = Term::iri("http://example.org/Tangoche").unwrap();
        let member = Term::iri("http://maroua-univ/ns/ontosoc#isMemberOf").unwrap();
        let naakosenda = Term::iri("http://example.org/Naakosenda").unwrap();
        assert!(g.insert(Triple::new(tangoche, member, naakosenda).unwrap()));
    }

    #[test]
    fn remove_round_trip() {
        let mut g = Graph::new();
        assert!(!g.remove(&t("a", "p", "b")));
        g.insert(t("a", "p", "b"));
        assert!(g.remove(&t("a", "p", "b")));
        assert_eq!(g.len(), 0);
        assert!(g.spo.is_empty() && g.pos.is_empty() && g.osp.is_empty());
        g.insert(t("a", "p", "b"));
        let single: Graph = [t("a", "p", "b")].into_iter().collect();
        assert_eq!(g, single);
    }

    #[test]
    fn malformed_triples_rejected() {
        let lit = Term::Literal(Literal::string("x"));
        assert!(matches!(
            Triple::new(lit.clone(), iri("p"), iri("o")),
            Err(TripleError::LiteralSubject(_))
        ));
        assert!(matches!(
            Triple::new(iri("s"), lit, iri("o")),
            Err(TripleError::NonIriPredicate(_))
        ));
        assert!(matches!(
            Triple::new(iri("s"), Term::blank("b").unwrap(), iri("o")),
            Err(TripleError::NonIriPredicate(_))
        ));
    }

    #[test]
    fn match_by_subject_and_empty() {
        let g: Graph = [t("a", "p", "b"), t("c", "p", "b")].into_iter().collect();
        assert_eq!(g.matches(Pattern::new(Some(&iri("a")), None, None)), vec![t("a", "p", "b")]);
        assert!(Graph::new().matches(Pattern::any()).is_empty());
    }

    #[test]
    fn match_results_are_lexically_ordered() {
        let g: Graph = [t("b", "p", "x"), t("a", "q", "x"), t("a", "p", "y")].into_iter().collect();
        let all = g.matches(Pattern::any());
        assert_eq!(all, vec![t("a", "p", "y"), t("a", "q", "x"), t("b", "p", "x")]);
        let by_object = g.matches(Pattern::new(None, None, Some(&iri("x"))));
        assert_eq!(by_object, vec![t("a", "q", "x"), t("b", "p", "x")]);
    }

    #[test]
    fn index_selection() {
        let a = iri("a");
        assert_eq!(Graph::best_index(&Pattern::new(Some(&a), None, None)), IndexOrder::Spo);
        assert_eq!(Graph::best_index(&Pattern::new(None, Some(&a), Some(&a))), IndexOrder::Pos);
        assert_eq!(Graph::best_index(&Pattern::new(Some(&a), None, Some(&a))), IndexOrder::Osp);
        assert_eq!(Graph::best_index(&Pattern::new(None, None, Some(&a))), IndexOrder::Osp);
        assert_eq!(Graph::best_index(&Pattern::new(Some(&a), Some(&a), Some(&a))), IndexOrder::Spo);
    }
}
