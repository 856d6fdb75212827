//! Turtle subset parser.
//!
//! Supported: `@prefix`/`PREFIX` directives, IRI references, prefixed names,
//! the `a` keyword, string literals (short and long forms, both quote styles),
//! integer/decimal/double/boolean literals, language tags, `^^` datatypes,
//! predicate lists (`;`), object lists (`,`) and blank node labels.
//!
//! Collections, anonymous blank nodes (`[ ... ]`), `@base` and relative IRIs
//! are rejected with [`TurtleError::UnsupportedFeature`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::graph::{Graph, Triple};
use super::term::{Literal, Term};
use crate::vocab::{rdf, xsd};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TurtleError {
    #[error("syntax error at {line}:{column}: {message}")]
    SyntaxError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported Turtle feature at {line}:{column}: {feature}")]
    UnsupportedFeature {
        line: usize,
        column: usize,
        feature: String,
    },
}

/// Non-fatal findings while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ParsedTurtle {
    pub graph: Graph,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn parse_turtle(text: &str) -> Result<ParsedTurtle, TurtleError> {
    let mut parser = Parser {
        src: text,
        pos: 0,
        line: 1,
        column: 1,
        prefixes: BTreeMap::new(),
        graph: Graph::new(),
        diagnostics: Vec::new(),
    };
    parser.document()?;
    let Parser {
        mut graph,
        prefixes,
        diagnostics,
        ..
    } = parser;
    graph.set_prefixes(prefixes);
    Ok(ParsedTurtle { graph, diagnostics })
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
    prefixes: BTreeMap<String, String>,
    graph: Graph,
    diagnostics: Vec<Diagnostic>,
}

type PResult<T> = Result<T, TurtleError>;

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(TurtleError::SyntaxError {
            line: self.line,
            column: self.column,
            message: message.into(),
        })
    }

    fn unsupported<T>(&self, feature: &str) -> PResult<T> {
        Err(TurtleError::UnsupportedFeature {
            line: self.line,
            column: self.column,
            feature: feature.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
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

    fn expect(&mut self, c: char) -> PResult<()> {
        self.skip_ws();
        match self.peek() {
            Some(found) if found == c => {
                self.bump();
                Ok(())
            }
            Some(found) => self.syntax(format!("expected '{c}', found '{found}'")),
            None => self.syntax(format!("expected '{c}', found end of input")),
        }
    }

    fn starts_with_keyword(&self, kw: &str) -> bool {
        let rest = self.rest();
        rest.len() >= kw.len()
            && rest[..kw.len()].eq_ignore_ascii_case(kw)
            && rest[kw.len()..]
                .chars()
                .next()
                .is_none_or(|c| c.is_whitespace() || c == '<' || c == '#')
    }

    fn document(&mut self) -> PResult<()> {
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(());
            }
            self.statement()?;
        }
    }

    fn statement(&mut self) -> PResult<()> {
        if self.rest().starts_with("@prefix") {
            self.advance(7);
            self.prefix_body()?;
            return self.expect('.');
        }
        if self.rest().starts_with("@base") || self.starts_with_keyword("BASE") {
            return self.unsupported("base directive");
        }
        if self.starts_with_keyword("PREFIX") {
            self.advance(6);
            return self.prefix_body();
        }
        self.triples()?;
        self.expect('.')
    }

    fn advance(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn prefix_body(&mut self) -> PResult<()> {
        self.skip_ws();
        let line = self.line;
        let prefix = self.pname_prefix()?;
        if self.peek() != Some(':') {
            return self.syntax("expected ':' after prefix name");
        }
        self.bump();
        self.skip_ws();
        let ns = self.iri_ref()?;
        if let Some(old) = self.prefixes.insert(prefix.clone(), ns.clone()) {
            if old != ns {
                self.diagnostics.push(Diagnostic {
                    line,
                    message: format!("prefix '{prefix}:' redefined from <{old}> to <{ns}>"),
                });
            }
        }
        Ok(())
    }

    fn pname_prefix(&mut self) -> PResult<String> {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if is_pn_chars(c) || (c == '.' && !out.is_empty() && self.peek_at(1).is_some_and(is_pn_chars)) {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if out.ends_with('.') {
            return self.syntax("prefix name may not end with '.'");
        }
        if let Some(first) = out.chars().next() {
            if !first.is_alphabetic() {
                return self.syntax(format!("invalid prefix name '{out}'"));
            }
        }
        Ok(out)
    }

    fn iri_ref(&mut self) -> PResult<String> {
        if self.peek() != Some('<') {
            return self.syntax("expected IRI reference");
        }
        self.bump();
        let mut iri = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\\') => {
                    let c = self.unicode_escape()?;
                    iri.push(c);
                }
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return self.syntax(format!("invalid character '{c}' in IRI"));
                }
                Some(c) => iri.push(c),
                None => return self.syntax("unterminated IRI"),
            }
        }
        if !is_absolute_iri(&iri) {
            return self.unsupported("relative IRI reference (no base)");
        }
        Ok(iri)
    }

    fn unicode_escape(&mut self) -> PResult<char> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return self.syntax("invalid escape in IRI"),
        };
        self.hex_char(width)
    }

    fn hex_char(&mut self, width: usize) -> PResult<char> {
        let mut value = 0u32;
        for _ in 0..width {
            let Some(d) = self.bump().and_then(|c| c.to_digit(16)) else {
                return self.syntax("invalid hex digit in escape");
            };
            value = value * 16 + d;
        }
        match char::from_u32(value) {
            Some(c) => Ok(c),
            None => self.syntax("escape is not a valid code point"),
        }
    }

    fn triples(&mut self) -> PResult<()> {
        self.skip_ws();
        let subject = match self.peek() {
            Some('[') => return self.unsupported("anonymous blank node"),
            Some('(') => return self.unsupported("collection"),
            Some('"') | Some('\'') => return self.syntax("literal in subject position"),
            _ => self.iri_or_blank()?,
        };
        self.predicate_object_list(&subject)
    }

    fn predicate_object_list(&mut self, subject: &Term) -> PResult<()> {
        loop {
            self.skip_ws();
            let predicate = self.verb()?;
            self.object_list(subject, &predicate)?;
            self.skip_ws();
            if self.peek() != Some(';') {
                return Ok(());
            }
            while self.peek() == Some(';') {
                self.bump();
                self.skip_ws();
            }
            if matches!(self.peek(), Some('.') | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> PResult<Term> {
        if self.peek() == Some('a') && self.peek_at(1).is_none_or(|c| c.is_whitespace() || c == '<' || c == '#') {
            self.bump();
            return Ok(Term::iri(rdf::TYPE));
        }
        match self.peek() {
            Some('<') => Ok(Term::iri(self.iri_ref()?)),
            Some('_') => self.syntax("blank node in predicate position"),
            Some(c) if is_pn_chars_base(c) || c == ':' => Ok(Term::iri(self.prefixed_name()?)),
            Some(c) => self.syntax(format!("expected predicate, found '{c}'")),
            None => self.syntax("expected predicate, found end of input"),
        }
    }

    fn object_list(&mut self, subject: &Term, predicate: &Term) -> PResult<()> {
        loop {
            self.skip_ws();
            let line = self.line;
            let object = self.object()?;
            let triple = Triple::new(subject.clone(), predicate.clone(), object)
                .or_else(|e| self.syntax(e.to_string()))?;
            if !self.graph.insert(triple.clone()) {
                self.diagnostics.push(Diagnostic {
                    line,
                    message: format!("duplicate triple ignored: {triple}"),
                });
            }
            self.skip_ws();
            if self.peek() == Some(',') {
                self.bump();
            } else {
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> PResult<Term> {
        match self.peek() {
            Some('[') => self.unsupported("anonymous blank node"),
            Some('(') => self.unsupported("collection"),
            Some('"') | Some('\'') => self.rdf_literal(),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-') => self.numeric_literal(),
            Some('.') if self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => self.numeric_literal(),
            _ => {
                if self.keyword_literal("true") {
                    return Ok(Term::literal(Literal::typed("true", xsd::BOOLEAN)));
                }
                if self.keyword_literal("false") {
                    return Ok(Term::literal(Literal::typed("false", xsd::BOOLEAN)));
                }
                self.iri_or_blank()
            }
        }
    }

    fn keyword_literal(&mut self, kw: &str) -> bool {
        let rest = self.rest();
        if rest.starts_with(kw)
            && rest[kw.len()..]
                .chars()
                .next()
                .is_none_or(|c| !(is_pn_chars(c) || c == ':'))
        {
            self.advance(kw.len());
            true
        } else {
            false
        }
    }

    fn iri_or_blank(&mut self) -> PResult<Term> {
        match self.peek() {
            Some('<') => Ok(Term::iri(self.iri_ref()?)),
            Some('_') if self.peek_at(1) == Some(':') => {
                self.advance(2);
                let label = self.local_part(true)?;
                if label.is_empty() {
                    return self.syntax("empty blank node label");
                }
                Ok(Term::blank(label))
            }
            Some(c) if is_pn_chars_base(c) || c == ':' => Ok(Term::iri(self.prefixed_name()?)),
            Some(c) => self.syntax(format!("unexpected character '{c}'")),
            None => self.syntax("unexpected end of input"),
        }
    }

    fn prefixed_name(&mut self) -> PResult<String> {
        let (line, column) = (self.line, self.column);
        let prefix = self.pname_prefix()?;
        if self.peek() != Some(':') {
            return Err(TurtleError::SyntaxError {
                line,
                column,
                message: format!("expected prefixed name, found '{prefix}'"),
            });
        }
        self.bump();
        let local = self.local_part(false)?;
        match self.prefixes.get(&prefix) {
            Some(ns) => Ok(format!("{ns}{local}")),
            None => Err(TurtleError::SyntaxError {
                line,
                column,
                message: format!("undeclared prefix '{prefix}:'"),
            }),
        }
    }

    fn local_part(&mut self, blank: bool) -> PResult<String> {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            let ok = if out.is_empty() {
                is_pn_chars_base(c) || c == '_' || c.is_ascii_digit() || (!blank && c == ':')
            } else {
                is_pn_chars(c) || (!blank && c == ':') || c == '.'
            };
            if c == '\\' {
                return self.unsupported("escaped character in local name");
            }
            if c == '%' && !blank {
                let hex_ok = self.peek_at(1).is_some_and(|h| h.is_ascii_hexdigit())
                    && self.peek_at(2).is_some_and(|h| h.is_ascii_hexdigit());
                if !hex_ok {
                    return self.syntax("invalid percent escape in local name");
                }
                for _ in 0..3 {
                    out.push(self.bump().unwrap_or_default());
                }
                continue;
            }
            if !ok {
                break;
            }
            // A trailing '.' terminates the statement instead.
            if c == '.' && !self.peek_at(1).is_some_and(|n| is_pn_chars(n) || n == ':' || n == '.') {
                break;
            }
            out.push(c);
            self.bump();
        }
        Ok(out)
    }

    fn rdf_literal(&mut self) -> PResult<Term> {
        let lexical = self.string()?;
        match self.peek() {
            Some('@') => {
                self.bump();
                let mut tag = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || (c == '-' && !tag.is_empty()) {
                        tag.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if tag.is_empty() || !tag.starts_with(|c: char| c.is_ascii_alphabetic()) {
                    return self.syntax("invalid language tag");
                }
                Ok(Term::literal(Literal::lang_string(lexical, &tag)))
            }
            Some('^') => {
                self.bump();
                if self.bump() != Some('^') {
                    return self.syntax("expected '^^'");
                }
                let datatype = match self.peek() {
                    Some('<') => self.iri_ref()?,
                    _ => self.prefixed_name()?,
                };
                if datatype == rdf::LANG_STRING {
                    return self.syntax("rdf:langString requires a language tag");
                }
                Ok(Term::literal(Literal::typed(lexical, datatype)))
            }
            _ => Ok(Term::literal(Literal::simple(lexical))),
        }
    }

    fn string(&mut self) -> PResult<String> {
        let quote = self.bump().unwrap_or('"');
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.advance(2);
        }
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return self.syntax("unterminated string literal"),
                Some(c) if c == quote => {
                    if !long {
                        return Ok(out);
                    }
                    // Quotes directly before the closing delimiter belong to the content.
                    if self.peek() == Some(quote)
                        && self.peek_at(1) == Some(quote)
                        && self.peek_at(2) != Some(quote)
                    {
                        self.advance(2);
                        return Ok(out);
                    }
                    out.push(c);
                }
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
                        _ => return self.syntax("invalid string escape"),
                    };
                    out.push(c);
                }
                Some('\n') | Some('\r') if !long => return self.syntax("line break in short string literal"),
                Some(c) => out.push(c),
            }
        }
    }

    fn numeric_literal(&mut self) -> PResult<Term> {
        let mut lex = String::new();
        if let Some(sign @ ('+' | '-')) = self.peek() {
            lex.push(sign);
            self.bump();
        }
        let mut int_digits = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            lex.push(c);
            self.bump();
            int_digits += 1;
        }
        let mut frac_digits = 0;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            lex.push('.');
            self.bump();
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                lex.push(c);
                self.bump();
                frac_digits += 1;
            }
        }
        if int_digits + frac_digits == 0 {
            return self.syntax("malformed numeric literal");
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            lex.push(e);
            self.bump();
            if let Some(sign @ ('+' | '-')) = self.peek() {
                lex.push(sign);
                self.bump();
            }
            let mut exp_digits = 0;
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                lex.push(c);
                self.bump();
                exp_digits += 1;
            }
            if exp_digits == 0 {
                return self.syntax("malformed exponent");
            }
            return Ok(Term::literal(Literal::typed(lex, xsd::DOUBLE)));
        }
        let datatype = if frac_digits > 0 { xsd::DECIMAL } else { xsd::INTEGER };
        Ok(Term::literal(Literal::typed(Arc::<str>::from(lex), datatype)))
    }
}

fn is_pn_chars_base(c: char) -> bool {
    c.is_alphabetic()
}

fn is_pn_chars(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '\u{b7}'
}

pub(crate) fn is_absolute_iri(iri: &str) -> bool {
    let Some(colon) = iri.find(':') else {
        return false;
    };
    let scheme = &iri[..colon];
    scheme.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && scheme
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Pattern;

    fn parse(text: &str) -> Graph {
        parse_turtle(text).expect("parse").graph
    }

    #[test]
    fn empty_document() {
        assert!(parse("").is_empty());
        assert!(parse("  # only a comment\n").is_empty());
    }

    #[test]
    fn object_list_expands_to_two_triples() {
        let g = parse("@prefix ex: <http://ex.org/> . ex:a ex:p ex:b , ex:c .");
        assert_eq!(g.len(), 2);
        let a = Term::iri("http://ex.org/a");
        let p = Term::iri("http://ex.org/p");
        let objects: Vec<_> = g
            .match_pattern(Pattern::new(Some(&a), Some(&p), None))
            .into_iter()
            .map(|t| t.object().clone())
            .collect();
        assert_eq!(objects, [Term::iri("http://ex.org/b"), Term::iri("http://ex.org/c")]);
    }

    #[test]
    fn predicate_lists_keywords_and_literals() {
        let g = parse(
            r#"PREFIX ex: <http://ex.org/>
            @prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
            ex:a a ex:C ;
                ex:n 5 , -2.50 , 1e3 , true ;
                ex:s "hi"@EN-gb , 'x\ty' , """multi
line "quoted" text""" , "7"^^xsd:integer ;
                ex:b _:n1 ; .
            _:n1 ex:p ex:a.b .
            "#,
        );
        assert_eq!(g.len(), 11);
        let lits: Vec<String> = g.iter().map(|t| t.object().to_nt()).collect();
        assert!(lits.contains(&"\"-2.50\"^^<http://www.w3.org/2001/XMLSchema#decimal>".to_string()));
        assert!(lits.contains(&"\"1e3\"^^<http://www.w3.org/2001/XMLSchema#double>".to_string()));
        assert!(lits.contains(&"\"hi\"@en-gb".to_string()));
        assert!(lits.contains(&"\"x\\ty\"".to_string()));
        assert!(lits.contains(&"\"multi\\nline \\\"quoted\\\" text\"".to_string()));
        assert!(lits.contains(&"<http://ex.org/a.b>".to_string()));
        assert_eq!(g.prefixes().len(), 2);
    }

    #[test]
    fn integer_before_statement_dot() {
        let g = parse("@prefix ex: <http://ex.org/> . ex:a ex:p 5.");
        let t = g.iter().next().unwrap();
        assert_eq!(t.object().to_nt(), "\"5\"^^<http://www.w3.org/2001/XMLSchema#integer>");
    }

    #[test]
    fn unsupported_constructs_fail_loudly() {
        for (doc, feature) in [
            ("@prefix ex: <http://ex.org/> . ex:a ex:p ( ex:b ) .", "collection"),
            ("@prefix ex: <http://ex.org/> . ex:a ex:p [ ex:q ex:b ] .", "anonymous blank node"),
            ("@base <http://ex.org/> .", "base directive"),
            ("<a> <http://ex.org/p> <http://ex.org/b> .", "relative IRI"),
        ] {
            match parse_turtle(doc) {
                Err(TurtleError::UnsupportedFeature { feature: f, .. }) => assert!(f.contains(feature), "{f}"),
                other => panic!("{doc}: {other:?}"),
            }
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_turtle("@prefix ex: <http://ex.org/> .\nex:a ex:p ") {
            Err(TurtleError::SyntaxError { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_turtle("ex:a ex:p ex:b ."),
            Err(TurtleError::SyntaxError { ref message, .. }) if message.contains("undeclared prefix")
        ));
        assert!(parse_turtle("<http://ex.org/a> <http://ex.org/p> \"open").is_err());
        assert!(parse_turtle("\"lit\" <http://ex.org/p> <http://ex.org/o> .").is_err());
    }

    #[test]
    fn duplicates_are_reported_not_counted() {
        let parsed = parse_turtle("<http://e/a> <http://e/p> <http://e/b> . <http://e/a> <http://e/p> <http://e/b> .").unwrap();
        assert_eq!(parsed.graph.len(), 1);
        assert_eq!(parsed.diagnostics.len(), 1);
    }
}
