use std::fmt;

use crate::rdf::{BlankNode, Graph, Iri, Literal, PrefixMap, Term, Triple};
use crate::vocab::{rdf, xsd};

use super::Document;

/// A located Turtle (or query) syntax error. Line and column are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub snippet: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.snippet.is_empty() {
            write!(f, " (near `{}`)", self.snippet)?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// Character cursor with line/column bookkeeping shared by the Turtle and
/// SPARQL parsers.
pub(crate) struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Self {
        Cursor { chars: text.chars().collect(), pos: 0 }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    pub(crate) fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    pub(crate) fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    pub(crate) fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek_at(i) == Some(c))
    }

    pub(crate) fn starts_with_keyword(&self, kw: &str) -> bool {
        let n = kw.chars().count();
        kw.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i).is_some_and(|x| x.eq_ignore_ascii_case(&c)))
            && !self.peek_at(n).is_some_and(|c| c.is_alphanumeric() || c == '_' || c == ':')
    }

    pub(crate) fn advance(&mut self, n: usize) {
        self.pos = (self.pos + n).min(self.chars.len());
    }

    /// Skips whitespace and `#` comments.
    pub(crate) fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += 1;
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    pub(crate) fn line_col(&self, pos: usize) -> (usize, usize) {
        let pos = pos.min(self.chars.len());
        let mut line = 1;
        let mut col = 1;
        for &c in &self.chars[..pos] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    pub(crate) fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let (line, column) = self.line_col(pos);
        let start = self.chars[..pos.min(self.chars.len())]
            .iter()
            .rposition(|&c| c == '\n')
            .map_or(0, |i| i + 1);
        let snippet: String = self.chars[start..]
            .iter()
            .take_while(|&&c| c != '\n')
            .take(60)
            .collect();
        ParseError { line, column, message: message.into(), snippet: snippet.trim().to_string() }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    pub(crate) fn expect(&mut self, c: char, context: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(self.error(format!("expected '{c}' {context}, found '{x}'"))),
            None => Err(self.error(format!("unexpected end of input: expected '{c}' {context}"))),
        }
    }

    /// `<...>` with `\u`/`\U` escapes; the result is resolved against `base`.
    pub(crate) fn iri_ref(&mut self, base: Option<&Iri>) -> Result<Iri, ParseError> {
        let start = self.pos;
        self.expect('<', "to open an IRI")?;
        let mut raw = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error_at(start, "unterminated IRI")),
                Some('>') => break,
                Some('\\') => raw.push(self.unicode_escape(start)?),
                Some(c) if c.is_whitespace() => {
                    return Err(self.error_at(start, "whitespace inside IRI"));
                }
                Some(c) => raw.push(c),
            }
        }
        resolve_iri(&raw, base).map_err(|msg| self.error_at(start, msg))
    }

    fn unicode_escape(&mut self, start: usize) -> Result<char, ParseError> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error_at(start, "invalid escape in IRI")),
        };
        self.hex_char(width)
    }

    fn hex_char(&mut self, width: usize) -> Result<char, ParseError> {
        let at = self.pos;
        let hex: String = (0..width).filter_map(|_| self.bump()).collect();
        u32::from_str_radix(&hex, 16)
            .ok()
            .filter(|_| hex.len() == width)
            .and_then(char::from_u32)
            .ok_or_else(|| self.error_at(at, format!("invalid \\u escape {hex:?}")))
    }

    /// A quoted string in any of the four Turtle forms, escapes decoded.
    pub(crate) fn string(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        let quote = self.bump().expect("caller checked for a quote");
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.advance(2);
        }
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error_at(start, "unterminated string literal")),
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_char(4)?,
                        Some('U') => self.hex_char(8)?,
                        None => return Err(self.error_at(start, "unterminated string literal")),
                        Some(other) => {
                            return Err(self.error_at(self.pos - 1, format!("invalid escape '\\{other}'")));
                        }
                    };
                    value.push(c);
                }
                Some(c) if c == quote => {
                    if !long {
                        break;
                    }
                    if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
                        self.advance(2);
                        break;
                    }
                    value.push(c);
                }
                Some('\n' | '\r') if !long => {
                    return Err(self.error_at(start, "unterminated string literal"));
                }
                Some(c) => value.push(c),
            }
        }
        Ok(value)
    }

    /// Language tag after `@`.
    pub(crate) fn lang_tag(&mut self) -> String {
        let mut tag = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '-' {
                tag.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        tag
    }

    /// Prefix label before `:` (possibly empty). Leaves the cursor on `:`.
    pub(crate) fn pname_prefix(&mut self) -> String {
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '-' || (c == '.' && !label.is_empty()) {
                label.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        while label.ends_with('.') {
            label.pop();
            self.pos -= 1;
        }
        label
    }

    /// Local part after `:`; a trailing `.` is left for the statement terminator.
    pub(crate) fn pname_local(&mut self) -> Result<String, ParseError> {
        let mut local = String::new();
        let mut consumed: Vec<usize> = Vec::new();
        while let Some(c) = self.peek() {
            let start = self.pos;
            if c.is_alphanumeric() || matches!(c, '_' | '-' | ':') || (c == '.' && !local.is_empty()) {
                local.push(c);
                self.pos += 1;
            } else if c == '%' {
                let hex: String = (1..3).filter_map(|i| self.peek_at(i)).collect();
                if hex.len() != 2 || !hex.chars().all(|h| h.is_ascii_hexdigit()) {
                    return Err(self.error("invalid percent escape in local name"));
                }
                local.push('%');
                local.push_str(&hex);
                self.pos += 3;
            } else if c == '\\' {
                match self.peek_at(1) {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => {
                        local.push(e);
                        self.pos += 2;
                    }
                    _ => return Err(self.error("invalid escape in local name")),
                }
            } else {
                break;
            }
            consumed.push(start);
        }
        while local.ends_with('.') && consumed.last().is_some_and(|&i| self.chars[i] == '.') {
            local.pop();
            self.pos = consumed.pop().expect("a dot was consumed");
        }
        Ok(local)
    }

    pub(crate) fn blank_label(&mut self) -> Result<BlankNode, ParseError> {
        let start = self.pos;
        self.advance(2); // "_:"
        let label = self.pname_prefix();
        BlankNode::new(&label).map_err(|e| self.error_at(start, e.to_string()))
    }

    /// Signed integer or decimal literal.
    pub(crate) fn number(&mut self) -> Result<Literal, ParseError> {
        let start = self.pos;
        let mut text = String::new();
        if let Some(sign @ ('+' | '-')) = self.peek() {
            text.push(sign);
            self.pos += 1;
        }
        let digits = |cur: &mut Cursor, out: &mut String| {
            while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
                out.push(c);
                cur.pos += 1;
            }
        };
        digits(self, &mut text);
        let is_decimal = self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit());
        if is_decimal {
            text.push('.');
            self.pos += 1;
            digits(self, &mut text);
        }
        if !text.chars().any(|c| c.is_ascii_digit()) {
            return Err(self.error_at(start, "malformed number"));
        }
        Ok(if is_decimal {
            Literal::typed(text, xsd::decimal())
        } else {
            Literal::typed(text, xsd::integer())
        })
    }
}

fn has_scheme(iri: &str) -> bool {
    let mut chars = iri.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && iri
            .find(':')
            .is_some_and(|i| iri[..i].chars().all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c)))
}

/// Absolute IRIs are kept verbatim; relative references are joined to `base`.
pub(crate) fn resolve_iri(raw: &str, base: Option<&Iri>) -> Result<Iri, String> {
    if has_scheme(raw) {
        return Iri::new(raw).map_err(|e| e.to_string());
    }
    let base = base.ok_or_else(|| format!("relative IRI <{raw}> without a base"))?;
    let joined = url::Url::parse(base.as_str())
        .and_then(|b| b.join(raw))
        .map_err(|e| format!("cannot resolve <{raw}> against {base}: {e}"))?;
    Iri::new(joined.as_str()).map_err(|e| e.to_string())
}

struct TurtleParser {
    cur: Cursor,
    prefixes: PrefixMap,
    base: Option<Iri>,
    graph: Graph,
}

impl TurtleParser {
    fn document(mut self) -> Result<Document, ParseError> {
        loop {
            self.cur.skip_ws();
            if self.cur.at_end() {
                break;
            }
            if self.cur.starts_with("@prefix") {
                self.cur.advance("@prefix".len());
                self.prefix_decl(true)?;
            } else if self.cur.starts_with("@base") {
                self.cur.advance("@base".len());
                self.base_decl(true)?;
            } else if self.cur.starts_with_keyword("PREFIX") {
                self.cur.advance("PREFIX".len());
                self.prefix_decl(false)?;
            } else if self.cur.starts_with_keyword("BASE") {
                self.cur.advance("BASE".len());
                self.base_decl(false)?;
            } else {
                self.triples()?;
            }
        }
        Ok(Document { graph: self.graph, prefixes: self.prefixes, base: self.base })
    }

    fn eof_error(&self) -> ParseError {
        self.cur.error("unexpected end of input inside statement")
    }

    fn prefix_decl(&mut self, turtle_style: bool) -> Result<(), ParseError> {
        self.cur.skip_ws();
        let label = self.cur.pname_prefix();
        match self.cur.peek() {
            Some(':') => self.cur.advance(1),
            None => return Err(self.eof_error()),
            Some(c) => return Err(self.cur.error(format!("expected ':' after prefix label, found '{c}'"))),
        }
        self.cur.skip_ws();
        if self.cur.at_end() {
            return Err(self.eof_error());
        }
        let ns = self.cur.iri_ref(self.base.as_ref())?;
        self.prefixes.set(&label, ns);
        if turtle_style {
            self.terminator()?;
        }
        Ok(())
    }

    fn base_decl(&mut self, turtle_style: bool) -> Result<(), ParseError> {
        self.cur.skip_ws();
        if self.cur.at_end() {
            return Err(self.eof_error());
        }
        let iri = self.cur.iri_ref(self.base.as_ref())?;
        self.base = Some(iri);
        if turtle_style {
            self.terminator()?;
        }
        Ok(())
    }

    fn terminator(&mut self) -> Result<(), ParseError> {
        self.cur.skip_ws();
        match self.cur.peek() {
            Some('.') => {
                self.cur.advance(1);
                Ok(())
            }
            None => Err(self.eof_error()),
            Some(c) => Err(self.cur.error(format!("expected '.' to end statement, found '{c}'"))),
        }
    }

    fn triples(&mut self) -> Result<(), ParseError> {
        let subject = self.subject()?;
        loop {
            self.cur.skip_ws();
            let predicate = self.verb()?;
            loop {
                self.cur.skip_ws();
                let object = self.object()?;
                let triple = Triple::new(subject.clone(), predicate.clone(), object)
                    .expect("subject and verb are checked during parsing");
                self.graph.insert(triple);
                self.cur.skip_ws();
                if self.cur.peek() == Some(',') {
                    self.cur.advance(1);
                } else {
                    break;
                }
            }
            // One or more ';', optionally followed by another predicate.
            let mut saw_semicolon = false;
            while self.cur.peek() == Some(';') {
                saw_semicolon = true;
                self.cur.advance(1);
                self.cur.skip_ws();
            }
            if !saw_semicolon || self.cur.peek() == Some('.') {
                break;
            }
        }
        self.terminator()
    }

    fn subject(&mut self) -> Result<Term, ParseError> {
        match self.cur.peek() {
            Some('"' | '\'') => Err(self.cur.error("a literal cannot be the subject of a triple")),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => {
                Err(self.cur.error("a literal cannot be the subject of a triple"))
            }
            _ => self.resource("subject"),
        }
    }

    fn verb(&mut self) -> Result<Term, ParseError> {
        if self.cur.peek() == Some('a')
            && !self.cur.peek_at(1).is_some_and(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '.'))
        {
            self.cur.advance(1);
            return Ok(Term::Iri(rdf::type_()));
        }
        let at = self.cur.pos();
        match self.cur.peek() {
            None => Err(self.eof_error()),
            Some('"' | '\'') => Err(self.cur.error("predicate must be an IRI, found a literal")),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => {
                Err(self.cur.error("predicate must be an IRI, found a literal"))
            }
            _ => {
                let term = self.resource("predicate")?;
                if term.is_blank() {
                    return Err(self.cur.error_at(at, "predicate must be an IRI, found a blank node"));
                }
                Ok(term)
            }
        }
    }

    fn object(&mut self) -> Result<Term, ParseError> {
        match self.cur.peek() {
            Some('"' | '\'') => {
                let lexical = self.cur.string()?;
                match self.cur.peek() {
                    Some('@') => {
                        let at = self.cur.pos();
                        self.cur.advance(1);
                        let tag = self.cur.lang_tag();
                        Literal::lang_tagged(lexical, &tag)
                            .map(Term::Literal)
                            .map_err(|e| self.cur.error_at(at, e.to_string()))
                    }
                    Some('^') if self.cur.peek_at(1) == Some('^') => {
                        self.cur.advance(2);
                        match self.resource("datatype")? {
                            Term::Iri(dt) => Ok(Term::Literal(Literal::typed(lexical, dt))),
                            _ => Err(self.cur.error("datatype must be an IRI")),
                        }
                    }
                    _ => Ok(Term::Literal(Literal::string(lexical))),
                }
            }
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => self.cur.number().map(Term::Literal),
            _ => self.resource("object"),
        }
    }

    /// IRI reference, prefixed name, or labelled blank node.
    fn resource(&mut self, role: &str) -> Result<Term, ParseError> {
        match self.cur.peek() {
            None => Err(self.eof_error()),
            Some('<') => self.cur.iri_ref(self.base.as_ref()).map(Term::Iri),
            Some('_') if self.cur.peek_at(1) == Some(':') => self.cur.blank_label().map(Term::Blank),
            Some('[') => Err(self.cur.error("anonymous blank nodes `[ ]` are not supported; use a labelled blank node")),
            Some('(') => Err(self.cur.error("collections `( )` are not supported")),
            Some(c) if c.is_alphabetic() || c == ':' || c == '_' => {
                let start = self.cur.pos();
                let label = self.cur.pname_prefix();
                if self.cur.peek() != Some(':') {
                    return match self.cur.peek() {
                        None => Err(self.eof_error()),
                        _ => Err(self.cur.error_at(start, format!("expected a prefixed name for the {role}, found `{label}`"))),
                    };
                }
                self.cur.advance(1);
                let local = self.cur.pname_local()?;
                self.prefixes
                    .expand(&label, &local)
                    .map(Term::Iri)
                    .map_err(|e| self.cur.error_at(start, e.to_string()))
            }
            Some(c) => Err(self.cur.error(format!("unexpected '{c}' where the {role} was expected"))),
        }
    }
}

/// Parses a Turtle document. Relative IRIs resolve against `@base` or the
/// supplied `base`; the first error aborts with its position.
pub fn parse_turtle(text: &str, base: Option<&Iri>) -> Result<Document, ParseError> {
    TurtleParser {
        cur: Cursor::new(text),
        prefixes: PrefixMap::new(),
        base: base.cloned(),
        graph: Graph::new(),
    }
    .document()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Pattern;

    const ONTOSOC: &str = "http://maroua-univ/ns/ontosoc#";

    #[test]
    fn empty_input_is_empty_document() {
        let doc = parse_turtle("", None).unwrap();
        assert!(doc.graph.is_empty());
        assert!(doc.prefixes.is_empty());
        assert!(parse_turtle("  # just a comment\n", None).unwrap().graph.is_empty());
    }

    #[test]
    fn membership_triple_expands_prefixes() {
        let text = "@prefix ontosoc: <http://maroua-univ/ns/ontosoc#> . @prefix ex: <http://example.org/> . ex:Tangoche ontosoc:isMemberOf ex:Naakosenda .";
        let doc = parse_turtle(text, None).unwrap();
        assert_eq!(doc.graph.len(), 1);
        let t = doc.graph.iter().next().unwrap();
        assert_eq!(t.subject().value(), "http://example.org/Tangoche");
        assert_eq!(t.predicate().as_str(), format!("{ONTOSOC}isMemberOf"));
        assert_eq!(t.object().value(), "http://example.org/Naakosenda");
    }

    #[test]
    fn truncated_prefix_reports_line_one() {
        let err = parse_turtle("@prefix x", None).unwrap_err();
        assert_eq!(err.line, 1);
        assert!(!err.message.is_empty());
    }

    #[test]
    fn predicate_and_object_lists() {
        let text = r#"
            @prefix ex: <http://example.org/> .
            ex:s a ex:C ;
                 ex:p ex:o1 , ex:o2 ;
                 ex:name "Club 2-0"@fr , "x"^^ex:dt ;
                 ex:n -42 ; .
            _:b1 ex:p 1.5 .
        "#;
        let doc = parse_turtle(text, None).unwrap();
        assert_eq!(doc.graph.len(), 7);
        let s = Term::iri("http://example.org/s").unwrap();
        assert_eq!(doc.graph.matches(Pattern::new(Some(&s), None, None)).len(), 6);
        let ty = Term::Iri(rdf::type_());
        assert_eq!(doc.graph.matches(Pattern::new(None, Some(&ty), None)).len(), 1);
        let n = Term::iri("http://example.org/n").unwrap();
        let found = doc.graph.matches(Pattern::new(None, Some(&n), None));
        assert_eq!(found[0].object().as_literal().unwrap().datatype(), Some(&xsd::integer()));
    }

    #[test]
    fn sparql_style_directives_and_base() {
        let text = "BASE <http://example.org/base/>\nPREFIX : <http://example.org/>\n<a> :p <#frag> .";
        let doc = parse_turtle(text, None).unwrap();
        let t = doc.graph.iter().next().unwrap();
        assert_eq!(t.subject().value(), "http://example.org/base/a");
        assert_eq!(t.object().value(), "http://example.org/base/#frag");
    }

    #[test]
    fn local_names_keep_dots_but_not_terminator() {
        let doc = parse_turtle("@prefix ex: <http://e/> . ex:a.b ex:p ex:c.", None).unwrap();
        let t = doc.graph.iter().next().unwrap();
        assert_eq!(t.subject().value(), "http://e/a.b");
        assert_eq!(t.object().value(), "http://e/c");
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_turtle("@prefix ex: <http://e/> .\nex:a foo:p ex:b .", None).unwrap_err();
        assert_eq!((err.line, err.column), (2, 6));
        assert!(err.message.contains("foo"), "{}", err.message);

        let err = parse_turtle("@prefix ex: <http://e/> .\n\nex:a ex:p \"open", None).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("unterminated"));

        let err = parse_turtle("@prefix ex: <http://e/> .\nex:a \"lit\" ex:b .", None).unwrap_err();
        assert!(err.message.contains("predicate must be an IRI"));

        let err = parse_turtle("@prefix ex: <http://e/> .\nex:a _:b ex:b .", None).unwrap_err();
        assert!(err.message.contains("predicate must be an IRI"));

        let err = parse_turtle("@prefix ex: <http://e/> .\nex:a ex:p", None).unwrap_err();
        assert!(err.message.contains("end of input"));
        assert_eq!(err.line, 2);

        let err = parse_turtle("@prefix ex: <http://e/> .\n\"lit\" ex:p ex:b .", None).unwrap_err();
        assert!(err.message.contains("subject"));
    }

    #[test]
    fn unsupported_constructs_are_rejected() {
        assert!(parse_turtle("@prefix ex: <http://e/> . ex:a ex:p [ ex:q ex:r ] .", None).is_err());
        assert!(parse_turtle("@prefix ex: <http://e/> . ex:a ex:p ( ex:q ) .", None).is_err());
        assert!(parse_turtle("<rel> <http://e/p> <http://e/o> .", None).is_err());
    }

    #[test]
    fn string_escapes_and_long_strings() {
        let text = "@prefix ex: <http://e/> . ex:a ex:p \"tab\\there \\u00e9\" , '''multi\nline''' .";
        let doc = parse_turtle(text, None).unwrap();
        let values: Vec<_> = doc.graph.iter().map(|t| t.object().value().to_string()).collect();
        assert!(values.contains(&"tab\there é".to_string()));
        assert!(values.contains(&"multi\nline".to_string()));
    }
}
