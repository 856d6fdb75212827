use alloc::string::String;
use alloc::sync::Arc;
use core::cmp::Ordering;
use core::fmt;

use crate::vocab::{rdf, xsd};

/// An RDF literal: lexical form, datatype IRI and optional language tag.
///
/// A language tag is only ever present together with the `rdf:langString`
/// datatype; the constructors enforce this.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Literal {
    lexical: Arc<str>,
    datatype: Arc<str>,
    language: Option<Arc<str>>,
}

impl Literal {
    pub fn simple(lexical: impl Into<Arc<str>>) -> Self {
        Self::typed(lexical, xsd::STRING)
    }

    pub fn typed(lexical: impl Into<Arc<str>>, datatype: impl Into<Arc<str>>) -> Self {
        let datatype = datatype.into();
        Literal {
            lexical: lexical.into(),
            datatype,
            language: None,
        }
    }

    /// Language tags are normalized to lower case.
    pub fn lang_string(lexical: impl Into<Arc<str>>, language: &str) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Arc::from(rdf::LANG_STRING),
            language: Some(Arc::from(language.to_ascii_lowercase().as_str())),
        }
    }

    pub fn integer(value: i64) -> Self {
        Self::typed(alloc::format!("{value}"), xsd::INTEGER)
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &str {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    pub fn is_plain_string(&self) -> bool {
        self.language.is_none() && &*self.datatype == xsd::STRING
    }

    /// Numeric value for literals with a numeric XSD datatype and a parseable
    /// lexical form.
    pub fn numeric_value(&self) -> Option<f64> {
        if !xsd::is_numeric(&self.datatype) {
            return None;
        }
        let lex = self.lexical.trim();
        match lex {
            "INF" | "+INF" => Some(f64::INFINITY),
            "-INF" => Some(f64::NEG_INFINITY),
            "NaN" => Some(f64::NAN),
            _ => lex.parse::<f64>().ok(),
        }
    }
}

/// An RDF term.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Iri(Arc<str>),
    BlankNode(Arc<str>),
    Literal(Literal),
}

impl Term {
    pub fn iri(iri: impl Into<Arc<str>>) -> Self {
        Term::Iri(iri.into())
    }

    pub fn blank(label: impl Into<Arc<str>>) -> Self {
        Term::BlankNode(label.into())
    }

    pub fn literal(literal: Literal) -> Self {
        Term::Literal(literal)
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::BlankNode(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// Writes the N-Triples form of the term.
    pub fn write_nt<W: fmt::Write>(&self, out: &mut W) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(out, "<{iri}>"),
            Term::BlankNode(label) => write!(out, "_:{label}"),
            Term::Literal(lit) => {
                out.write_char('"')?;
                write_escaped(out, &lit.lexical)?;
                out.write_char('"')?;
                if let Some(lang) = &lit.language {
                    write!(out, "@{lang}")
                } else if &*lit.datatype != xsd::STRING {
                    write!(out, "^^<{}>", lit.datatype)
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn to_nt(&self) -> String {
        let mut s = String::new();
        let _ = self.write_nt(&mut s);
        s
    }

    /// Byte stream of the N-Triples rendering, produced lazily so that term
    /// comparisons never allocate.
    fn nt_bytes(&self) -> NtBytes<'_> {
        match self {
            Term::Iri(iri) => NtBytes::new(b"<", iri.as_bytes(), false, &[b">", b"", b""]),
            Term::BlankNode(label) => NtBytes::new(b"_:", label.as_bytes(), false, &[b"", b"", b""]),
            Term::Literal(lit) => {
                let tail: [&[u8]; 3] = if let Some(lang) = &lit.language {
                    [b"\"@", lang.as_bytes(), b""]
                } else if &*lit.datatype != xsd::STRING {
                    [b"\"^^<", lit.datatype.as_bytes(), b">"]
                } else {
                    [b"\"", b"", b""]
                };
                NtBytes::new(b"\"", lit.lexical.as_bytes(), true, &tail)
            }
        }
    }
}

/// Canonical order: UTF-8 byte order of the N-Triples rendering.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.nt_bytes().cmp(other.nt_bytes())
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_nt(f)
    }
}

pub(crate) fn write_escaped<W: fmt::Write>(out: &mut W, text: &str) -> fmt::Result {
    for c in text.chars() {
        match c {
            '\\' => out.write_str("\\\\")?,
            '"' => out.write_str("\\\"")?,
            '\n' => out.write_str("\\n")?,
            '\r' => out.write_str("\\r")?,
            '\t' => out.write_str("\\t")?,
            c => out.write_char(c)?,
        }
    }
    Ok(())
}

fn escape_byte(b: u8) -> Option<&'static [u8]> {
    match b {
        b'\\' => Some(b"\\\\"),
        b'"' => Some(b"\\\""),
        b'\n' => Some(b"\\n"),
        b'\r' => Some(b"\\r"),
        b'\t' => Some(b"\\t"),
        _ => None,
    }
}

struct NtBytes<'a> {
    head: &'a [u8],
    body: &'a [u8],
    escape: bool,
    pending: &'a [u8],
    tail: [&'a [u8]; 3],
    stage: u8,
}

impl<'a> NtBytes<'a> {
    fn new(head: &'a [u8], body: &'a [u8], escape: bool, tail: &[&'a [u8]; 3]) -> Self {
        NtBytes {
            head,
            body,
            escape,
            pending: &[],
            tail: *tail,
            stage: 0,
        }
    }
}

impl Iterator for NtBytes<'_> {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        loop {
            if let Some((&b, rest)) = self.pending.split_first() {
                self.pending = rest;
                return Some(b);
            }
            match self.stage {
                0 => {
                    self.pending = self.head;
                    self.stage = 1;
                }
                1 => {
                    let (&b, rest) = match self.body.split_first() {
                        Some(x) => x,
                        None => {
                            self.stage = 2;
                            continue;
                        }
                    };
                    self.body = rest;
                    if self.escape {
                        if let Some(esc) = escape_byte(b) {
                            self.pending = esc;
                            continue;
                        }
                    }
                    return Some(b);
                }
                2..=4 => {
                    self.pending = self.tail[(self.stage - 2) as usize];
                    self.stage += 1;
                }
                _ => return None,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn terms() -> Vec<Term> {
        vec![
            Term::iri("http://ex.org/a"),
            Term::iri("http://ex.org/a#"),
            Term::iri("http://ex.org/ab"),
            Term::blank("b0"),
            Term::literal(Literal::simple("x\"y")),
            Term::literal(Literal::simple("x")),
            Term::literal(Literal::integer(12)),
            Term::literal(Literal::lang_string("chat", "FR")),
            Term::literal(Literal::simple("tab\there")),
        ]
    }

    #[test]
    fn ordering_matches_rendered_bytes() {
        let ts = terms();
        for a in &ts {
            for b in &ts {
                assert_eq!(a.cmp(b), a.to_nt().as_bytes().cmp(b.to_nt().as_bytes()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn nt_rendering() {
        assert_eq!(Term::literal(Literal::integer(3)).to_nt(), "\"3\"^^<http://www.w3.org/2001/XMLSchema#integer>");
        assert_eq!(Term::literal(Literal::lang_string("a", "EN")).to_nt(), "\"a\"@en");
        assert_eq!(Term::literal(Literal::simple("a\nb")).to_nt(), "\"a\\nb\"");
    }

    #[test]
    fn language_tag_implies_lang_string() {
        let lit = Literal::lang_string("x", "de");
        assert_eq!(lit.datatype(), rdf::LANG_STRING);
        assert!(Literal::simple("x").language().is_none());
    }

    #[test]
    fn numeric_values() {
        assert_eq!(Literal::typed("1.5", xsd::DECIMAL).numeric_value(), Some(1.5));
        assert_eq!(Literal::typed("abc", xsd::INTEGER).numeric_value(), None);
        assert_eq!(Literal::simple("4").numeric_value(), None);
    }
}
