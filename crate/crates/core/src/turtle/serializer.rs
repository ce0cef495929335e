use std::collections::BTreeMap;
use std::fmt::Write;

use crate::rdf::{escape_string, Iri, Literal, LiteralAnnotation, PrefixMap, Term};
use crate::vocab::{rdf, xsd};

use super::Document;

fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(first) => {
            (first.is_ascii_alphanumeric() || first == '_')
                && local.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        }
    }
}

fn is_safe_label(label: &str) -> bool {
    label.is_empty()
        || (label.starts_with(|c: char| c.is_ascii_alphabetic())
            && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'))
}

fn write_iri(out: &mut String, iri: &Iri, prefixes: &PrefixMap) {
    match prefixes.shorten(iri) {
        Some((label, local)) if is_safe_label(label) && is_safe_local(local) => {
            let _ = write!(out, "{label}:{local}");
        }
        _ => {
            let _ = write!(out, "{iri}");
        }
    }
}

fn is_integer_lexical(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
}

fn write_literal(out: &mut String, lit: &Literal, prefixes: &PrefixMap) {
    if lit.datatype() == Some(&xsd::integer()) && is_integer_lexical(lit.lexical()) {
        out.push_str(lit.lexical());
        return;
    }
    out.push('"');
    let _ = escape_string(lit.lexical(), out);
    out.push('"');
    match lit.annotation() {
        LiteralAnnotation::Language(lang) => {
            let _ = write!(out, "@{lang}");
        }
        LiteralAnnotation::Datatype(dt) if *dt == xsd::string() => {}
        LiteralAnnotation::Datatype(dt) => {
            out.push_str("^^");
            write_iri(out, dt, prefixes);
        }
    }
}

fn write_term(out: &mut String, term: &Term, prefixes: &PrefixMap) {
    match term {
        Term::Iri(iri) => write_iri(out, iri, prefixes),
        Term::Blank(b) => {
            let _ = write!(out, "{b}");
        }
        Term::Literal(lit) => write_literal(out, lit, prefixes),
    }
}

/// Emits prefix declarations (in map order), then one block per subject.
/// Subjects, predicates and objects are each sorted by their N-Triples
/// string, so output is byte-stable for a given graph and prefix map.
pub fn serialize_turtle(doc: &Document) -> String {
    let mut out = String::new();
    if let Some(base) = &doc.base {
        let _ = writeln!(out, "@base {base} .");
    }
    for (label, ns) in doc.prefixes.iter() {
        let _ = writeln!(out, "@prefix {label}: {ns} .");
    }

    // Keyed by N-Triples text so the output order is lexical.
    type Objects = BTreeMap<String, Term>;
    type Predicates = BTreeMap<String, (Iri, Objects)>;
    let mut by_subject: BTreeMap<String, (Term, Predicates)> = BTreeMap::new();
    for t in doc.graph.iter() {
        let (_, preds) = by_subject
            .entry(t.subject().to_string())
            .or_insert_with(|| (t.subject().clone(), BTreeMap::new()));
        let (_, objects) = preds
            .entry(t.predicate().to_string())
            .or_insert_with(|| (t.predicate().clone(), BTreeMap::new()));
        objects.insert(t.object().to_string(), t.object().clone());
    }

    let prefixes = &doc.prefixes;
    for (subject, preds) in by_subject.values() {
        out.push('\n');
        write_term(&mut out, subject, prefixes);
        let count = preds.len();
        for (i, (predicate, objects)) in preds.values().enumerate() {
            out.push_str(if i == 0 { " " } else { "    " });
            if *predicate == rdf::type_() {
                out.push('a');
            } else {
                write_iri(&mut out, predicate, prefixes);
            }
            for (j, object) in objects.values().enumerate() {
                out.push_str(if j == 0 { " " } else { ", " });
                write_term(&mut out, object, prefixes);
            }
            out.push_str(if i + 1 == count { " .\n" } else { " ;\n" });
        }
    }
    out
}
