//! Instance validation against a [`SchemaDef`].
//!
//! [`validate`] runs [`infer_types`] and then both checks. The two check
//! functions expect an already-inferred graph: they read `rdf:type` triples
//! as given and do not compute the subclass closure themselves.
//!
//! Typing is closed. A node used with a schema property must carry the
//! expected class (directly or through a subclass), otherwise the triple is
//! reported with an empty `found` set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde_json::{json, Value};

use crate::rdf::{Graph, Iri, Pattern, Term, Triple};
use crate::schema::{PropertyDef, SchemaDef};
use crate::vocab::{ontosoc, owl, rdf, rdfs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    Domain,
    Range,
    Disjointness,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::Domain => "domain",
            ViolationKind::Range => "range",
            ViolationKind::Disjointness => "disjointness",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single conformance failure.
///
/// Domain and range violations carry the offending triple. Disjointness
/// violations use `(instance, rdf:type, second class)` as their triple,
/// `expected` holds the first class of the axiom and `found` both classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub triple: Triple,
    pub expected: Iri,
    pub found: BTreeSet<Iri>,
    pub message: String,
}

impl Violation {
    fn sort_key(&self) -> ((String, String, String), ViolationKind, String) {
        (self.triple.lexical_key(), self.kind, self.expected.to_string())
    }

    /// One tab-separated line: kind, subject, predicate, object, expected,
    /// found (comma-separated, `-` when empty).
    pub fn machine_line(&self) -> String {
        let found = if self.found.is_empty() {
            "-".to_string()
        } else {
            self.found.iter().map(Iri::to_string).collect::<Vec<_>>().join(",")
        };
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.kind,
            self.triple.subject(),
            self.triple.predicate(),
            self.triple.object(),
            self.expected,
            found
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.as_str(),
            "subject": self.triple.subject().to_string(),
            "predicate": self.triple.predicate().as_str(),
            "object": self.triple.object().to_string(),
            "expected": self.expected.as_str(),
            "found": self.found.iter().map(Iri::as_str).collect::<Vec<_>>(),
            "message": self.message,
        })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.kind, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Triples whose predicate resolved to a schema property.
    pub checked_triples: usize,
    /// Type triples added by subclass entailment.
    pub entailed_types: usize,
    /// Triples with a predicate the schema does not know (schema vocabulary
    /// and `rdf:type` are not counted here).
    pub skipped_triples: usize,
}

impl ValidationReport {
    pub fn conforms(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    pub fn summary(&self) -> String {
        let n = self.violations.len();
        format!(
            "{n} violation{} (checked={} entailed={} skipped={})",
            if n == 1 { "" } else { "s" },
            self.checked_triples,
            self.entailed_types,
            self.skipped_triples
        )
    }

    /// Human-readable listing followed by the summary line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.violations {
            let _ = writeln!(out, "{v}");
        }
        let _ = writeln!(out, "{}", self.summary());
        out
    }

    /// One [`Violation::machine_line`] per violation.
    pub fn to_machine(&self) -> String {
        self.violations.iter().map(|v| v.machine_line() + "\n").collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "conforms": self.conforms(),
            "violations": self.violations.iter().map(Violation::to_json).collect::<Vec<_>>(),
            "checkedTriples": self.checked_triples,
            "entailedTypes": self.entailed_types,
            "skippedTriples": self.skipped_triples,
        })
    }
}

/// Adds `(x, rdf:type, D)` for every `(x, rdf:type, C)` with `C` a subclass
/// of `D`. Types the schema does not declare are left alone.
pub fn infer_types(graph: &Graph, schema: &SchemaDef) -> Graph {
    let mut out = graph.clone();
    let type_term = Term::Iri(rdf::type_());
    for t in graph.matches(Pattern::new(None, Some(&type_term), None)) {
        let Some(class) = t.object().as_iri() else { continue };
        let Ok(closure) = schema.superclass_closure(class) else { continue };
        for sup in closure {
            out.insert(type_triple(t.subject(), sup));
        }
    }
    out
}

/// `node` is already the subject of a triple, so it is never a literal.
fn type_triple(node: &Term, class: Iri) -> Triple {
    Triple::new(node.clone(), Term::Iri(rdf::type_()), Term::Iri(class)).expect("subject position")
}

/// Predicates of the modelling vocabulary; triples using them describe the
/// schema itself and are never checked as instance data.
pub fn is_schema_vocabulary(predicate: &Iri) -> bool {
    let p = predicate.as_str();
    (p.starts_with(rdf::NS) && p != rdf::TYPE)
        || p.starts_with(rdfs::NS)
        || p.starts_with(owl::NS)
        || p == ontosoc::COMPATIBILITY_OF
        || p == ontosoc::ACCEPTS_SIGNATURE_OF
}

/// Asserted `rdf:type` objects per node.
fn type_index(graph: &Graph) -> BTreeMap<Term, BTreeSet<Iri>> {
    let type_term = Term::Iri(rdf::type_());
    let mut index: BTreeMap<Term, BTreeSet<Iri>> = BTreeMap::new();
    for t in graph.matches(Pattern::new(None, Some(&type_term), None)) {
        if let Some(class) = t.object().as_iri() {
            index.entry(t.subject().clone()).or_default().insert(class.clone());
        }
    }
    index
}

/// Candidate signatures for a triple using `def`: its own first, then any
/// it accepts from other properties.
fn signatures<'a>(def: &'a PropertyDef, schema: &'a SchemaDef) -> Vec<&'a PropertyDef> {
    std::iter::once(def)
        .chain(def.accepts_signature_of.iter().filter_map(|iri| schema.lookup_property(iri)))
        .collect()
}

struct Outcome {
    checked: usize,
    skipped: usize,
    violations: Vec<Violation>,
}

fn domain_range(graph: &Graph, schema: &SchemaDef) -> Outcome {
    let types = type_index(graph);
    let empty = BTreeSet::new();
    let types_of = |term: &Term| types.get(term).unwrap_or(&empty);
    let mut out = Outcome { checked: 0, skipped: 0, violations: Vec::new() };

    for t in graph.iter() {
        let predicate = t.predicate();
        if *predicate == rdf::type_() || is_schema_vocabulary(predicate) {
            continue;
        }
        let Some(def) = schema.lookup_property(predicate) else {
            out.skipped += 1;
            continue;
        };
        out.checked += 1;

        let subject_types = types_of(t.subject());
        let object_types = if t.object().is_literal() { &empty } else { types_of(t.object()) };
        let domain_ok = |sig: &PropertyDef| subject_types.contains(&sig.domain);
        let range_ok = |sig: &PropertyDef| !t.object().is_literal() && object_types.contains(&sig.range);

        let candidates = signatures(def, schema);
        if candidates.iter().any(|sig| domain_ok(sig) && range_ok(sig)) {
            continue;
        }
        if !domain_ok(def) {
            out.violations.push(Violation {
                kind: ViolationKind::Domain,
                triple: t.clone(),
                expected: def.domain.clone(),
                found: subject_types.clone(),
                message: format!(
                    "subject {} of {} is not a {} (found {})",
                    t.subject(),
                    def.iri,
                    def.domain,
                    describe(subject_types)
                ),
            });
        }
        if !range_ok(def) {
            let found = if t.object().is_literal() { "a literal".to_string() } else { describe(object_types) };
            out.violations.push(Violation {
                kind: ViolationKind::Range,
                triple: t.clone(),
                expected: def.range.clone(),
                found: object_types.clone(),
                message: format!("object {} of {} is not a {} (found {found})", t.object(), def.iri, def.range),
            });
        }
    }
    out
}

fn describe(classes: &BTreeSet<Iri>) -> String {
    if classes.is_empty() {
        "no type".to_string()
    } else {
        classes.iter().map(Iri::to_string).collect::<Vec<_>>().join(", ")
    }
}

/// Signature check for every triple whose predicate the schema knows.
/// Expects `graph` to have been through [`infer_types`].
pub fn check_domain_range(graph: &Graph, schema: &SchemaDef) -> Vec<Violation> {
    let mut v = domain_range(graph, schema).violations;
    sort_violations(&mut v);
    v
}

/// One violation per instance per disjoint pair among its types. Expects an
/// inferred graph.
pub fn check_disjointness(graph: &Graph, schema: &SchemaDef) -> Vec<Violation> {
    let mut out = Vec::new();
    for (instance, classes) in type_index(graph) {
        for axiom in schema.disjointness() {
            let (a, b) = axiom.classes();
            if classes.contains(a) && classes.contains(b) {
                out.push(Violation {
                    kind: ViolationKind::Disjointness,
                    triple: type_triple(&instance, b.clone()),
                    expected: a.clone(),
                    found: BTreeSet::from([a.clone(), b.clone()]),
                    message: format!("{instance} is both a {a} and a {b}, which are disjoint ({})", owl::DISJOINT_WITH),
                });
            }
        }
    }
    sort_violations(&mut out);
    out
}

fn sort_violations(v: &mut [Violation]) {
    v.sort_by_cached_key(Violation::sort_key);
}

pub fn validate(graph: &Graph, schema: &SchemaDef) -> ValidationReport {
    let inferred = infer_types(graph, schema);
    let Outcome { checked, skipped, mut violations } = domain_range(&inferred, schema);
    violations.extend(check_disjointness(&inferred, schema));
    sort_violations(&mut violations);
    ValidationReport {
        violations,
        checked_triples: checked,
        entailed_types: inferred.len() - graph.len(),
        skipped_triples: skipped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{builtin_schema, schema_to_graph};
    use crate::turtle::parse_turtle;

    const PREFIXES: &str = "@prefix os: <http://maroua-univ/ns/ontosoc#> . @prefix ex: <http://example.org/> .\n";

    fn graph(body: &str) -> Graph {
        parse_turtle(&format!("{PREFIXES}{body}"), None).unwrap().graph
    }

    #[test]
    fn membership_conforms() {
        let g = graph("ex:Tangoche a os:Individual . ex:Naakosenda a os:Community . ex:Tangoche os:isMemberOf ex:Naakosenda .");
        let r = validate(&g, &builtin_schema());
        assert!(r.conforms(), "{}", r.to_text());
        assert_eq!(r.checked_triples, 1);
    }

    #[test]
    fn membership_in_a_locality_is_a_range_violation() {
        let g = graph("ex:Tangoche a os:Individual . ex:Mokolo a os:Locality . ex:Tangoche os:isMemberOf ex:Mokolo .");
        let v = check_domain_range(&infer_types(&g, &builtin_schema()), &builtin_schema());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::Range);
        assert_eq!(v[0].expected, ontosoc::term("Community"));
        assert_eq!(v[0].found, BTreeSet::from([ontosoc::term("Locality")]));
        assert!(v[0].message.contains("isMemberOf"));
    }

    #[test]
    fn empty_graph() {
        let r = validate(&Graph::new(), &builtin_schema());
        assert_eq!((r.violations.len(), r.checked_triples, r.entailed_types), (0, 0, 0));
    }

    #[test]
    fn subclass_entailment() {
        let schema = builtin_schema();
        let g = graph("ex:e a os:CulturalActivity .");
        let inferred = infer_types(&g, &schema);
        assert!(inferred.contains(&Triple::from_iris(
            Iri::new("http://example.org/e").unwrap(),
            rdf::type_(),
            Term::Iri(ontosoc::term("Activity"))
        )));
        assert_eq!(inferred.len(), 2);
        assert_eq!(infer_types(&inferred, &schema), inferred);
        let untyped = graph("ex:a ex:p ex:b .");
        assert_eq!(infer_types(&untyped, &schema), untyped);
    }

    #[test]
    fn disjointness_counts() {
        let schema = builtin_schema();
        let check = |body: &str| check_disjointness(&infer_types(&graph(body), &schema), &schema).len();
        assert_eq!(check("ex:x a os:Community , os:Activity ."), 1);
        assert_eq!(check("ex:x a os:CulturalActivity , os:Activity ."), 0);
        assert_eq!(check("ex:x a os:Community , os:Activity , os:Locality ."), 3);
        assert_eq!(check("ex:x a os:CulturalActivity , os:Town ."), 1);
    }

    #[test]
    fn closed_typing_and_literals() {
        let schema = builtin_schema();
        let r = validate(&graph("ex:a os:isMemberOf ex:b ."), &schema);
        assert_eq!((r.count(ViolationKind::Domain), r.count(ViolationKind::Range)), (1, 1));
        assert!(r.violations.iter().all(|v| v.found.is_empty()));
        let r = validate(&graph("ex:a a os:Individual . ex:a os:isMemberOf \"club\" ."), &schema);
        assert_eq!(r.count(ViolationKind::Range), 1);
    }

    #[test]
    fn unknown_predicates_are_skipped() {
        let r = validate(&graph("ex:a ex:knows ex:b . ex:a a ex:Thing ."), &builtin_schema());
        assert!(r.conforms());
        assert_eq!((r.checked_triples, r.skipped_triples), (0, 1));
    }

    #[test]
    fn alias_and_compatibility_properties() {
        let schema = builtin_schema();
        let ok = graph(
            "ex:d a os:Activity . ex:t a os:Role . ex:p a os:Individual . ex:r a os:Resource . ex:l a os:Locality .
             ex:d os:isRealizeBy ex:t . ex:t os:isPlayedBy ex:p . ex:t os:isUsedBy ex:r . ex:r os:isUsedBy ex:p .
             ex:d os:isOccurredIn ex:l . ex:l os:isBorderedBy ex:l .",
        );
        let r = validate(&ok, &schema);
        assert!(r.conforms(), "{}", r.to_text());
        let bad = graph("ex:t a os:Role . ex:p a os:Individual . ex:t os:isUsedBy ex:p .");
        let r = validate(&bad, &schema);
        assert_eq!(r.violations.len(), 1, "{}", r.to_text());
        assert_eq!(r.violations[0].kind, ViolationKind::Domain);
    }

    #[test]
    fn schema_graph_is_clean() {
        let schema = builtin_schema();
        let r = validate(&schema_to_graph(&schema), &schema);
        assert!(r.conforms(), "{}", r.to_text());
        assert_eq!(r.checked_triples, 0);
    }

    #[test]
    fn report_formats() {
        let g = graph("ex:Tangoche a os:Individual . ex:Mokolo a os:Locality . ex:Tangoche os:isMemberOf ex:Mokolo .");
        let r = validate(&g, &builtin_schema());
        assert_eq!(
            r.to_machine(),
            "range\t<http://example.org/Tangoche>\t<http://maroua-univ/ns/ontosoc#isMemberOf>\t<http://example.org/Mokolo>\t<http://maroua-univ/ns/ontosoc#Community>\t<http://maroua-univ/ns/ontosoc#Locality>\n"
        );
        assert!(r.to_text().ends_with("1 violation (checked=1 entailed=0 skipped=0)\n"));
        assert_eq!(r.to_json()["violations"][0]["kind"], "range");
    }
}
