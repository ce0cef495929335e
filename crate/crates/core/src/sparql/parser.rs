use std::fmt;

use crate::rdf::{Iri, Literal, PrefixMap, Term};
use crate::turtle::{Cursor, ParseError};
use crate::vocab::rdf;

use super::ast::{CompareOp, Constraint, GroupPattern, OrderKey, Projection, Query, TermPattern, TriplePattern, Variable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryError {
    Syntax(ParseError),
    UndeclaredPrefix { prefix: String, line: usize, column: usize },
    Unsupported { feature: String, line: usize, column: usize },
}

impl QueryError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            QueryError::Syntax(e) => (e.line, e.column),
            QueryError::UndeclaredPrefix { line, column, .. } | QueryError::Unsupported { line, column, .. } => {
                (*line, *column)
            }
        }
    }
}

impl fmt::Display for QueryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryError::Syntax(e) => write!(f, "syntax error at {e}"),
            QueryError::UndeclaredPrefix { prefix, line, column } => {
                write!(f, "{line}:{column}: undeclared prefix {prefix:?}")
            }
            QueryError::Unsupported { feature, line, column } => {
                write!(f, "{line}:{column}: unsupported feature: {feature}")
            }
        }
    }
}

impl std::error::Error for QueryError {}

impl From<ParseError> for QueryError {
    fn from(e: ParseError) -> Self {
        QueryError::Syntax(e)
    }
}

type Result<T> = std::result::Result<T, QueryError>;

/// Keywords of SPARQL features outside the supported subset, with the name
/// used in the error message.
const UNSUPPORTED_FORMS: [(&str, &str); 9] = [
    ("CONSTRUCT", "CONSTRUCT queries"),
    ("ASK", "ASK queries"),
    ("DESCRIBE", "DESCRIBE queries"),
    ("INSERT", "SPARQL Update"),
    ("DELETE", "SPARQL Update"),
    ("LOAD", "SPARQL Update"),
    ("CLEAR", "SPARQL Update"),
    ("DROP", "SPARQL Update"),
    ("CREATE", "SPARQL Update"),
];

const UNSUPPORTED_IN_GROUP: [(&str, &str); 7] = [
    ("UNION", "UNION"),
    ("MINUS", "MINUS"),
    ("GRAPH", "GRAPH patterns"),
    ("BIND", "BIND"),
    ("VALUES", "VALUES"),
    ("SERVICE", "SERVICE (federation)"),
    ("SELECT", "subqueries"),
];

const UNSUPPORTED_MODIFIERS: [(&str, &str); 3] =
    [("GROUP", "GROUP BY"), ("HAVING", "HAVING"), ("VALUES", "VALUES")];

struct QueryParser {
    cur: Cursor,
    base: Option<Iri>,
    prefixes: PrefixMap,
}

impl QueryParser {
    fn unsupported_at(&self, pos: usize, feature: impl Into<String>) -> QueryError {
        let (line, column) = self.cur.line_col(pos);
        QueryError::Unsupported { feature: feature.into(), line, column }
    }

    fn unsupported(&self, feature: impl Into<String>) -> QueryError {
        self.unsupported_at(self.cur.pos(), feature)
    }

    fn syntax(&self, message: impl Into<String>) -> QueryError {
        QueryError::Syntax(self.cur.error(message))
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if self.cur.starts_with_keyword(kw) {
            self.cur.advance(kw.chars().count());
            self.cur.skip_ws();
            true
        } else {
            false
        }
    }

    fn check_unsupported(&self, table: &[(&str, &str)]) -> Result<()> {
        match table.iter().find(|(kw, _)| self.cur.starts_with_keyword(kw)) {
            Some((_, feature)) => Err(self.unsupported(*feature)),
            None => Ok(()),
        }
    }

    fn query(mut self) -> Result<Query> {
        self.cur.skip_ws();
        loop {
            if self.keyword("PREFIX") {
                let label = self.cur.pname_prefix();
                self.cur.expect(':', "after the prefix label")?;
                self.cur.skip_ws();
                let ns = self.cur.iri_ref(self.base.as_ref())?;
                self.prefixes.set(&label, ns);
            } else if self.keyword("BASE") {
                self.base = Some(self.cur.iri_ref(self.base.as_ref())?);
            } else {
                break;
            }
            self.cur.skip_ws();
        }

        self.check_unsupported(&UNSUPPORTED_FORMS)?;
        if !self.keyword("SELECT") {
            return Err(self.syntax("expected SELECT"));
        }
        for kw in ["DISTINCT", "REDUCED"] {
            if self.cur.starts_with_keyword(kw) {
                return Err(self.unsupported(format!("SELECT {kw}")));
            }
        }
        let projection = self.projection()?;
        if self.cur.starts_with_keyword("FROM") {
            return Err(self.unsupported("FROM (dataset clauses)"));
        }
        self.keyword("WHERE");
        let pattern = self.group()?;
        self.cur.skip_ws();

        let mut order_by = Vec::new();
        let mut limit = None;
        let mut offset = None;
        loop {
            self.check_unsupported(&UNSUPPORTED_MODIFIERS)?;
            if self.keyword("ORDER") {
                if !self.keyword("BY") {
                    return Err(self.syntax("expected BY after ORDER"));
                }
                order_by = self.order_keys()?;
            } else if self.keyword("LIMIT") {
                limit = Some(self.count("LIMIT")?);
            } else if self.keyword("OFFSET") {
                offset = Some(self.count("OFFSET")?);
            } else {
                break;
            }
        }
        if !self.cur.at_end() {
            return Err(self.syntax("unexpected text after the query"));
        }
        Ok(Query { base: self.base, prefixes: self.prefixes, projection, pattern, order_by, limit, offset })
    }

    fn projection(&mut self) -> Result<Projection> {
        if self.cur.peek() == Some('*') {
            self.cur.advance(1);
            self.cur.skip_ws();
            return Ok(Projection::All);
        }
        let mut vars = Vec::new();
        loop {
            match self.cur.peek() {
                Some('?' | '$') => {
                    vars.push(self.variable()?);
                    self.cur.skip_ws();
                }
                Some('(') => return Err(self.unsupported("projection expressions")),
                _ => break,
            }
        }
        if vars.is_empty() {
            return Err(self.syntax("expected '*' or at least one variable after SELECT"));
        }
        Ok(Projection::Vars(vars))
    }

    fn variable(&mut self) -> Result<Variable> {
        let start = self.cur.pos();
        self.cur.bump();
        let mut name = String::new();
        while let Some(c) = self.cur.peek().filter(|c| c.is_alphanumeric() || *c == '_') {
            name.push(c);
            self.cur.bump();
        }
        Variable::new(&name).ok_or_else(|| QueryError::Syntax(self.cur.error_at(start, "empty variable name")))
    }

    fn group(&mut self) -> Result<GroupPattern> {
        self.cur.skip_ws();
        self.cur.expect('{', "to open a group pattern")?;
        let mut group = GroupPattern::default();
        loop {
            self.cur.skip_ws();
            match self.cur.peek() {
                None => return Err(self.syntax("unterminated group pattern: expected '}'")),
                Some('}') => {
                    self.cur.advance(1);
                    return Ok(group);
                }
                Some('.') => self.cur.advance(1),
                Some('{') => return Err(self.unsupported("nested group patterns")),
                _ => {
                    self.check_unsupported(&UNSUPPORTED_IN_GROUP)?;
                    if self.keyword("OPTIONAL") {
                        group.optionals.push(self.group()?);
                    } else if self.keyword("FILTER") {
                        group.filters.extend(self.filter()?);
                    } else {
                        self.triples_block(&mut group.required)?;
                    }
                }
            }
        }
    }

    fn triples_block(&mut self, out: &mut Vec<TriplePattern>) -> Result<()> {
        let subject = self.slot("subject")?;
        loop {
            self.cur.skip_ws();
            let predicate = self.verb()?;
            loop {
                self.cur.skip_ws();
                let object = self.slot("object")?;
                out.push(TriplePattern { subject: subject.clone(), predicate: predicate.clone(), object });
                self.cur.skip_ws();
                if self.cur.peek() == Some(',') {
                    self.cur.advance(1);
                } else {
                    break;
                }
            }
            let mut saw_semicolon = false;
            while self.cur.peek() == Some(';') {
                saw_semicolon = true;
                self.cur.advance(1);
                self.cur.skip_ws();
            }
            if !saw_semicolon || matches!(self.cur.peek(), Some('.' | '}') | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<TermPattern> {
        let start = self.cur.pos();
        match self.cur.peek() {
            Some('a') if !self.cur.peek_at(1).is_some_and(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '.')) => {
                self.cur.advance(1);
                return Ok(TermPattern::Term(Term::Iri(rdf::type_())));
            }
            Some('^' | '(' | '!') => return Err(self.unsupported("property paths")),
            _ => {}
        }
        let verb = self.slot("predicate")?;
        if let TermPattern::Term(t) = &verb {
            if !t.is_iri() {
                return Err(QueryError::Syntax(self.cur.error_at(start, "predicate must be an IRI or a variable")));
            }
        }
        let path_follows = match self.cur.peek() {
            Some('/' | '|' | '*' | '+') => true,
            Some('?') => !self.cur.peek_at(1).is_some_and(|c| c.is_alphanumeric() || c == '_'),
            _ => false,
        };
        if path_follows {
            return Err(self.unsupported("property paths"));
        }
        Ok(verb)
    }

    /// Variable, IRI, prefixed name or literal.
    fn slot(&mut self, role: &str) -> Result<TermPattern> {
        let start = self.cur.pos();
        match self.cur.peek() {
            None => Err(self.syntax(format!("unexpected end of query where the {role} was expected"))),
            Some('?' | '$') => self.variable().map(TermPattern::Var),
            Some('<') => Ok(TermPattern::Term(Term::Iri(self.cur.iri_ref(self.base.as_ref())?))),
            Some('_') if self.cur.peek_at(1) == Some(':') => {
                Err(self.unsupported("blank nodes in query patterns (use a variable)"))
            }
            Some('[') => Err(self.unsupported("blank node property lists")),
            Some('(') => Err(self.unsupported("collections")),
            Some('"' | '\'') => {
                let lexical = self.cur.string()?;
                let lit = match self.cur.peek() {
                    Some('@') => {
                        let at = self.cur.pos();
                        self.cur.advance(1);
                        let tag = self.cur.lang_tag();
                        Literal::lang_tagged(lexical, &tag)
                            .map_err(|e| QueryError::Syntax(self.cur.error_at(at, e.to_string())))?
                    }
                    Some('^') if self.cur.peek_at(1) == Some('^') => {
                        self.cur.advance(2);
                        match self.slot("datatype")? {
                            TermPattern::Term(Term::Iri(dt)) => Literal::typed(lexical, dt),
                            _ => return Err(self.syntax("datatype must be an IRI")),
                        }
                    }
                    _ => Literal::string(lexical),
                };
                Ok(TermPattern::Term(Term::Literal(lit)))
            }
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => {
                Ok(TermPattern::Term(Term::Literal(self.cur.number()?)))
            }
            Some(c) if c.is_alphabetic() || c == ':' => {
                let prefix = self.cur.pname_prefix();
                if self.cur.peek() != Some(':') {
                    return Err(QueryError::Syntax(
                        self.cur.error_at(start, format!("expected a prefixed name for the {role}, found `{prefix}`")),
                    ));
                }
                self.cur.advance(1);
                let local = self.cur.pname_local()?;
                if self.prefixes.get(&prefix).is_none() {
                    let (line, column) = self.cur.line_col(start);
                    return Err(QueryError::UndeclaredPrefix { prefix, line, column });
                }
                self.prefixes
                    .expand(&prefix, &local)
                    .map(|iri| TermPattern::Term(Term::Iri(iri)))
                    .map_err(|e| QueryError::Syntax(self.cur.error_at(start, e.to_string())))
            }
            Some(c) => Err(self.syntax(format!("unexpected '{c}' where the {role} was expected"))),
        }
    }

    fn filter(&mut self) -> Result<Vec<Constraint>> {
        if self.cur.peek() != Some('(') {
            return Err(self.unsupported("FILTER without parentheses (function calls)"));
        }
        self.parenthesized()
    }

    /// `( conjunction )`.
    fn parenthesized(&mut self) -> Result<Vec<Constraint>> {
        self.cur.expect('(', "to open an expression")?;
        self.cur.skip_ws();
        let out = self.conjunction()?;
        self.cur.skip_ws();
        self.cur.expect(')', "to close the expression")?;
        Ok(out)
    }

    fn conjunction(&mut self) -> Result<Vec<Constraint>> {
        let mut out = Vec::new();
        loop {
            self.cur.skip_ws();
            if self.cur.peek() == Some('(') {
                out.extend(self.parenthesized()?);
            } else {
                out.push(self.comparison()?);
            }
            self.cur.skip_ws();
            if self.cur.starts_with("&&") {
                self.cur.advance(2);
            } else if self.cur.starts_with("||") {
                return Err(self.unsupported("'||' in FILTER"));
            } else {
                return Ok(out);
            }
        }
    }

    fn comparison(&mut self) -> Result<Constraint> {
        if self.cur.peek() == Some('!') {
            return Err(self.unsupported("negation in FILTER"));
        }
        if self.cur.peek().is_some_and(char::is_alphabetic) {
            let mut probe = 0;
            while self.cur.peek_at(probe).is_some_and(|c| c.is_alphanumeric() || c == '_') {
                probe += 1;
            }
            if self.cur.peek_at(probe) == Some('(') {
                return Err(self.unsupported("function calls in FILTER"));
            }
        }
        let left = self.slot("left operand")?;
        self.cur.skip_ws();
        let op = if self.cur.starts_with("!=") {
            self.cur.advance(2);
            CompareOp::Ne
        } else if self.cur.peek() == Some('=') {
            self.cur.advance(1);
            CompareOp::Eq
        } else if matches!(self.cur.peek(), Some('<' | '>')) {
            return Err(self.unsupported("ordering comparisons in FILTER"));
        } else {
            return Err(self.syntax("expected '=' or '!=' in FILTER"));
        };
        self.cur.skip_ws();
        let right = self.slot("right operand")?;
        Ok(Constraint { left, op, right })
    }

    fn order_keys(&mut self) -> Result<Vec<OrderKey>> {
        let mut keys = Vec::new();
        loop {
            let ascending = if self.cur.starts_with_keyword("ASC") {
                true
            } else if self.cur.starts_with_keyword("DESC") {
                false
            } else {
                match self.cur.peek() {
                    Some('?' | '$') => {
                        keys.push(OrderKey { var: self.variable()?, ascending: true });
                        self.cur.skip_ws();
                        continue;
                    }
                    Some('(') => return Err(self.unsupported("ORDER BY expressions")),
                    _ => break,
                }
            };
            self.cur.advance(if ascending { 3 } else { 4 });
            self.cur.skip_ws();
            self.cur.expect('(', "after ASC/DESC")?;
            self.cur.skip_ws();
            if !matches!(self.cur.peek(), Some('?' | '$')) {
                return Err(self.unsupported("ORDER BY expressions"));
            }
            let var = self.variable()?;
            self.cur.skip_ws();
            self.cur.expect(')', "to close ASC/DESC")?;
            self.cur.skip_ws();
            keys.push(OrderKey { var, ascending });
        }
        if keys.is_empty() {
            return Err(self.syntax("expected at least one variable after ORDER BY"));
        }
        Ok(keys)
    }

    fn count(&mut self, clause: &str) -> Result<usize> {
        let mut digits = String::new();
        while let Some(c) = self.cur.peek().filter(char::is_ascii_digit) {
            digits.push(c);
            self.cur.bump();
        }
        let n = digits.parse().map_err(|_| self.syntax(format!("expected a non-negative integer after {clause}")))?;
        self.cur.skip_ws();
        Ok(n)
    }
}

/// Parses a SELECT query in the supported subset. Prefixed names are
/// expanded against the declared prefixes.
pub fn parse_query(text: &str) -> std::result::Result<Query, QueryError> {
    QueryParser { cur: Cursor::new(text), base: None, prefixes: PrefixMap::new() }.query()
}
