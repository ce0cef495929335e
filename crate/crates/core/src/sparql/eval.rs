use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::rdf::{Graph, LiteralAnnotation, Pattern, PrefixMap, Term};
use crate::vocab::xsd;

use super::ast::{CompareOp, Constraint, GroupPattern, Query, TermPattern, TriplePattern, Variable};

/// A (partial) solution mapping.
pub type Binding = BTreeMap<Variable, Term>;

/// Query results: one column per header variable, `None` for unbound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionTable {
    pub header: Vec<Variable>,
    pub rows: Vec<Vec<Option<Term>>>,
}

impl SolutionTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|v| v.name() == name)
    }

    /// Value of `name` in row `row`, if both exist and the variable is bound.
    pub fn get(&self, row: usize, name: &str) -> Option<&Term> {
        let col = self.column(name)?;
        self.rows.get(row)?.get(col)?.as_ref()
    }

    /// Aligned text table. IRIs are shortened with `prefixes` when given;
    /// unbound cells are left blank.
    pub fn render(&self, prefixes: Option<&PrefixMap>) -> String {
        let show = |t: &Term| match (t, prefixes) {
            (Term::Iri(iri), Some(p)) => match p.shorten(iri) {
                Some((label, local)) if !local.is_empty() => format!("{label}:{local}"),
                _ => t.to_string(),
            },
            _ => t.to_string(),
        };
        let mut lines: Vec<Vec<String>> = vec![self.header.iter().map(Variable::to_string).collect()];
        for row in &self.rows {
            lines.push(row.iter().map(|c| c.as_ref().map(&show).unwrap_or_default()).collect());
        }
        let widths: Vec<usize> = (0..self.header.len())
            .map(|i| lines.iter().map(|l| l[i].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for line in &lines {
            let cells: Vec<String> = line.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        let n = self.rows.len();
        out.push_str(&format!("{n} row{}\n", if n == 1 { "" } else { "s" }));
        out
    }
}

/// The standard SPARQL JSON results document.
pub fn to_json_results(table: &SolutionTable) -> String {
    let vars: Vec<&str> = table.header.iter().map(Variable::name).collect();
    let bindings: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (var, cell) in table.header.iter().zip(row) {
                if let Some(term) = cell {
                    obj.insert(var.name().to_string(), term_json(term));
                }
            }
            Value::Object(obj)
        })
        .collect();
    json!({ "head": { "vars": vars }, "results": { "bindings": bindings } }).to_string()
}

fn term_json(term: &Term) -> Value {
    match term {
        Term::Iri(iri) => json!({ "type": "uri", "value": iri.as_str() }),
        Term::Blank(b) => json!({ "type": "bnode", "value": b.label() }),
        Term::Literal(lit) => match lit.annotation() {
            LiteralAnnotation::Language(lang) => {
                json!({ "type": "literal", "value": lit.lexical(), "xml:lang": &**lang })
            }
            LiteralAnnotation::Datatype(dt) if *dt == xsd::string() => {
                json!({ "type": "literal", "value": lit.lexical() })
            }
            LiteralAnnotation::Datatype(dt) => {
                json!({ "type": "literal", "value": lit.lexical(), "datatype": dt.as_str() })
            }
        },
    }
}

/// Total order used by ORDER BY: unbound < blank < IRI < literal, then by
/// value, then by full N-Triples form.
pub fn compare_terms(a: Option<&Term>, b: Option<&Term>) -> Ordering {
    fn rank(t: Option<&Term>) -> u8 {
        match t {
            None => 0,
            Some(Term::Blank(_)) => 1,
            Some(Term::Iri(_)) => 2,
            Some(Term::Literal(_)) => 3,
        }
    }
    rank(a).cmp(&rank(b)).then_with(|| match (a, b) {
        (Some(x), Some(y)) => x.value().cmp(y.value()).then_with(|| x.to_string().cmp(&y.to_string())),
        _ => Ordering::Equal,
    })
}

fn resolve<'a>(slot: &'a TermPattern, binding: &'a Binding) -> Option<&'a Term> {
    match slot {
        TermPattern::Term(t) => Some(t),
        TermPattern::Var(v) => binding.get(v),
    }
}

/// Extends `binding` with every match of `pattern` in `graph`.
fn extend(graph: &Graph, pattern: &TriplePattern, binding: &Binding, out: &mut Vec<Binding>) {
    let s = resolve(&pattern.subject, binding);
    let p = resolve(&pattern.predicate, binding);
    let o = resolve(&pattern.object, binding);
    if s.is_some_and(Term::is_literal) || p.is_some_and(|p| !p.is_iri()) {
        return;
    }
    'triples: for t in graph.matches(Pattern::new(s, p, o)) {
        let mut next = binding.clone();
        let predicate = t.predicate_term();
        for (slot, value) in [(&pattern.subject, t.subject()), (&pattern.predicate, &predicate), (&pattern.object, t.object())] {
            if let TermPattern::Var(v) = slot {
                match next.get(v) {
                    Some(existing) if existing != value => continue 'triples,
                    Some(_) => {}
                    None => {
                        next.insert(v.clone(), value.clone());
                    }
                }
            }
        }
        out.push(next);
    }
}

/// Left-to-right join of a basic graph pattern, bag semantics.
pub fn evaluate_bgp(patterns: &[TriplePattern], graph: &Graph) -> Vec<Binding> {
    let mut solutions = vec![Binding::new()];
    for pattern in patterns {
        let mut next = Vec::new();
        for b in &solutions {
            extend(graph, pattern, b, &mut next);
        }
        solutions = next;
        if solutions.is_empty() {
            break;
        }
    }
    solutions
}

/// Unbound operands make the constraint false.
fn holds(c: &Constraint, b: &Binding) -> bool {
    match (resolve(&c.left, b), resolve(&c.right, b)) {
        (Some(l), Some(r)) => match c.op {
            CompareOp::Eq => l == r,
            CompareOp::Ne => l != r,
        },
        _ => false,
    }
}

fn compatible(a: &Binding, b: &Binding) -> bool {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().all(|(k, v)| large.get(k).is_none_or(|w| w == v))
}

fn merge(a: &Binding, b: &Binding) -> Binding {
    let mut m = a.clone();
    m.extend(b.iter().map(|(k, v)| (k.clone(), v.clone())));
    m
}

/// Solutions of `group` before its own filters are applied.
fn evaluate_unfiltered(group: &GroupPattern, graph: &Graph) -> Vec<Binding> {
    let mut solutions = evaluate_bgp(&group.required, graph);
    for opt in &group.optionals {
        let right = evaluate_unfiltered(opt, graph);
        let mut next = Vec::with_capacity(solutions.len());
        for left in &solutions {
            let before = next.len();
            for r in right.iter().filter(|r| compatible(left, r)) {
                let merged = merge(left, r);
                if opt.filters.iter().all(|c| holds(c, &merged)) {
                    next.push(merged);
                }
            }
            if next.len() == before {
                next.push(left.clone());
            }
        }
        solutions = next;
    }
    solutions
}

/// All solutions of a group pattern, filters applied. Filters inside an
/// OPTIONAL group act as its join condition.
pub fn evaluate_group(group: &GroupPattern, graph: &Graph) -> Vec<Binding> {
    let mut solutions = evaluate_unfiltered(group, graph);
    solutions.retain(|b| group.filters.iter().all(|c| holds(c, b)));
    solutions
}

pub fn evaluate(query: &Query, graph: &Graph) -> SolutionTable {
    let mut solutions = evaluate_group(&query.pattern, graph);
    if !query.order_by.is_empty() {
        solutions.sort_by(|a, b| {
            query
                .order_by
                .iter()
                .map(|key| {
                    let ord = compare_terms(a.get(&key.var), b.get(&key.var));
                    if key.ascending { ord } else { ord.reverse() }
                })
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        });
    }
    let header = query.header();
    let rows = solutions
        .into_iter()
        .skip(query.offset.unwrap_or(0))
        .take(query.limit.unwrap_or(usize::MAX))
        .map(|b| header.iter().map(|v| b.get(v).cloned()).collect())
        .collect();
    SolutionTable { header, rows }
}
