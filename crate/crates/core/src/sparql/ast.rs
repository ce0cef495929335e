use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::rdf::{Iri, PrefixMap, Term};

/// A query variable, stored without its `?`/`$` sigil.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(Arc<str>);

impl Variable {
    /// Accepts names made of letters, digits and `_`.
    pub fn new(name: &str) -> Option<Self> {
        let valid = !name.is_empty() && name.chars().all(|c| c.is_alphanumeric() || c == '_');
        valid.then(|| Variable(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

/// One slot of a triple pattern or filter operand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermPattern {
    Var(Variable),
    Term(Term),
}

impl TermPattern {
    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            TermPattern::Var(v) => Some(v),
            TermPattern::Term(_) => None,
        }
    }
}

impl fmt::Display for TermPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermPattern::Var(v) => v.fmt(f),
            TermPattern::Term(t) => t.fmt(f),
        }
    }
}

impl From<Variable> for TermPattern {
    fn from(v: Variable) -> Self {
        TermPattern::Var(v)
    }
}

impl From<Term> for TermPattern {
    fn from(t: Term) -> Self {
        TermPattern::Term(t)
    }
}

/// The predicate slot is restricted to an IRI or a variable by
/// construction in the parser; the type stays uniform for evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: TermPattern,
    pub predicate: TermPattern,
    pub object: TermPattern,
}

impl TriplePattern {
    pub fn new(subject: impl Into<TermPattern>, predicate: impl Into<TermPattern>, object: impl Into<TermPattern>) -> Self {
        TriplePattern { subject: subject.into(), predicate: predicate.into(), object: object.into() }
    }

    pub fn slots(&self) -> [&TermPattern; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.slots().into_iter().filter_map(TermPattern::as_var)
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
}

impl fmt::Display for CompareOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
        })
    }
}

/// `left op right`. A `FILTER (a && b)` becomes two constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub left: TermPattern,
    pub op: CompareOp,
    pub right: TermPattern,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.left, self.op, self.right)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupPattern {
    pub required: Vec<TriplePattern>,
    pub optionals: Vec<GroupPattern>,
    pub filters: Vec<Constraint>,
}

impl GroupPattern {
    /// Variables in order of first appearance in the required patterns,
    /// then in the optional groups. Filters bind nothing.
    pub fn variables(&self) -> Vec<Variable> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.collect_variables(&mut seen, &mut out);
        out
    }

    fn collect_variables(&self, seen: &mut BTreeSet<Variable>, out: &mut Vec<Variable>) {
        for v in self.required.iter().flat_map(TriplePattern::variables) {
            if seen.insert(v.clone()) {
                out.push(v.clone());
            }
        }
        for opt in &self.optionals {
            opt.collect_variables(seen, out);
        }
    }

    fn write_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth + 1);
        writeln!(f, "{{")?;
        for tp in &self.required {
            writeln!(f, "{pad}{tp}")?;
        }
        for opt in &self.optionals {
            write!(f, "{pad}OPTIONAL ")?;
            opt.write_indented(f, depth + 1)?;
            writeln!(f)?;
        }
        for c in &self.filters {
            writeln!(f, "{pad}FILTER ({c})")?;
        }
        write!(f, "{}}}", "  ".repeat(depth))
    }
}

impl fmt::Display for GroupPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_indented(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    All,
    Vars(Vec<Variable>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderKey {
    pub var: Variable,
    pub ascending: bool,
}

/// A parsed SELECT query. Prefixed names are already expanded, so
/// `prefixes` only records the declarations for printing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub base: Option<Iri>,
    pub prefixes: PrefixMap,
    pub projection: Projection,
    pub pattern: GroupPattern,
    pub order_by: Vec<OrderKey>,
    pub limit: Option<usize>,
    pub offset: Option<usize>,
}

impl Query {
    /// Output columns: the projection list, or every pattern variable for `*`.
    pub fn header(&self) -> Vec<Variable> {
        match &self.projection {
            Projection::All => self.pattern.variables(),
            Projection::Vars(vars) => vars.clone(),
        }
    }

    /// Projected or ordered variables the pattern can never bind.
    pub fn warnings(&self) -> Vec<String> {
        let bound = self.pattern.variables();
        let mut out = Vec::new();
        if let Projection::Vars(vars) = &self.projection {
            for v in vars.iter().filter(|v| !bound.contains(v)) {
                out.push(format!("projected variable {v} does not occur in the pattern and is always unbound"));
            }
        }
        for key in self.order_by.iter().filter(|k| !bound.contains(&k.var)) {
            out.push(format!("ORDER BY variable {} does not occur in the pattern", key.var));
        }
        out
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(base) = &self.base {
            writeln!(f, "BASE {base}")?;
        }
        for (label, ns) in self.prefixes.iter() {
            writeln!(f, "PREFIX {label}: {ns}")?;
        }
        f.write_str("SELECT")?;
        match &self.projection {
            Projection::All => f.write_str(" *")?,
            Projection::Vars(vars) => {
                for v in vars {
                    write!(f, " {v}")?;
                }
            }
        }
        write!(f, "\nWHERE {}\n", self.pattern)?;
        if !self.order_by.is_empty() {
            f.write_str("ORDER BY")?;
            for key in &self.order_by {
                if key.ascending {
                    write!(f, " {}", key.var)?;
                } else {
                    write!(f, " DESC({})", key.var)?;
                }
            }
            writeln!(f)?;
        }
        if let Some(n) = self.limit {
            writeln!(f, "LIMIT {n}")?;
        }
        if let Some(n) = self.offset {
            writeln!(f, "OFFSET {n}")?;
        }
        Ok(())
    }
}
