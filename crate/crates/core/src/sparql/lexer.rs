use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::QueryError;
use crate::vocab::xsd;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Iri(String),
    PName(String, String),
    Var(String),
    Str(String),
    LangTag(String),
    Number(String, &'static str),
    Word(String),
    Blank(String),
    Punct(&'static str),
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Iri(iri) => format!("<{iri}>"),
            Tok::PName(p, l) => format!("{p}:{l}"),
            Tok::Var(v) => format!("?{v}"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::LangTag(t) => format!("@{t}"),
            Tok::Number(n, _) => n.clone(),
            Tok::Word(w) => w.clone(),
            Tok::Blank(b) => format!("_:{b}"),
            Tok::Punct(p) => format!("'{p}'"),
            Tok::Eof => "end of query".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub position: usize,
    pub line: usize,
    pub column: usize,
}

const PUNCT: &[&str] = &[
    "^^", "&&", "||", "!=", "<=", ">=", "{", "}", "(", ")", "[", "]", ".", ";", ",", "*", "=", "<", ">", "!", "^",
    "/", "|", "+", "-", "?", "$",
];

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, QueryError> {
    let mut lx = Lexer {
        src,
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        lx.skip_ws();
        let (position, line, column) = (lx.pos, lx.line, lx.column);
        let tok = lx.next_tok()?;
        let done = tok == Tok::Eof;
        out.push(Token {
            tok,
            position,
            line,
            column,
        });
        if done {
            return Ok(out);
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl Lexer<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
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

    fn error<T>(&self, expected: &str, found: &str) -> Result<T, QueryError> {
        Err(QueryError::QuerySyntaxError {
            position: self.pos,
            line: self.line,
            column: self.column,
            expected: expected.to_string(),
            found: found.to_string(),
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

    fn take_while(&mut self, mut f: impl FnMut(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn next_tok(&mut self) -> Result<Tok, QueryError> {
        let Some(c) = self.peek() else {
            return Ok(Tok::Eof);
        };
        match c {
            '<' => {
                if let Some(iri) = self.try_iri() {
                    return Ok(Tok::Iri(iri));
                }
            }
            '?' | '$' if self.peek_at(1).is_some_and(is_var_char) => {
                self.bump();
                return Ok(Tok::Var(self.take_while(is_var_char)));
            }
            '"' | '\'' => return self.string(),
            '@' => {
                self.bump();
                let tag = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                if tag.is_empty() {
                    return self.error("language tag", "'@'");
                }
                return Ok(Tok::LangTag(tag.to_ascii_lowercase()));
            }
            '_' if self.peek_at(1) == Some(':') => {
                self.bump();
                self.bump();
                return Ok(Tok::Blank(self.take_while(is_name_char)));
            }
            c if c.is_ascii_digit() => return self.number(),
            '.' if self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => return self.number(),
            ':' => {
                self.bump();
                return self.local(String::new());
            }
            c if c.is_alphabetic() => {
                let word = self.take_while(|c| is_name_char(c) || c == '.');
                // A trailing '.' ends the triple, not the name.
                let trimmed = word.trim_end_matches('.');
                let extra = word.len() - trimmed.len();
                let word = String::from(trimmed);
                if extra > 0 {
                    self.rewind(extra);
                } else if self.peek() == Some(':') {
                    self.bump();
                    return self.local(word);
                }
                return Ok(Tok::Word(word));
            }
            _ => {}
        }
        for p in PUNCT {
            if self.rest().starts_with(p) {
                for _ in 0..p.len() {
                    self.bump();
                }
                return Ok(Tok::Punct(p));
            }
        }
        self.error("a SPARQL token", &format!("'{c}'"))
    }

    /// Steps back over `n` ASCII characters on the current line.
    fn rewind(&mut self, n: usize) {
        self.pos -= n;
        self.column -= n;
    }

    fn try_iri(&mut self) -> Option<String> {
        let body: String = self.rest()[1..]
            .chars()
            .take_while(|&c| !(c == '>' || c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`')))
            .collect();
        if !self.rest()[1 + body.len()..].starts_with('>') {
            return None;
        }
        for _ in 0..body.chars().count() + 2 {
            self.bump();
        }
        Some(body)
    }

    fn local(&mut self, prefix: String) -> Result<Tok, QueryError> {
        let mut local = String::new();
        while let Some(c) = self.peek() {
            let ok = is_name_char(c) || c == ':' || c == '%' || (c == '.' && !local.is_empty());
            if !ok {
                break;
            }
            if c == '.' && !self.peek_at(1).is_some_and(|n| is_name_char(n) || n == ':') {
                break;
            }
            local.push(c);
            self.bump();
        }
        Ok(Tok::PName(prefix, local))
    }

    fn number(&mut self) -> Result<Tok, QueryError> {
        let mut lex = self.take_while(|c| c.is_ascii_digit());
        let mut datatype = xsd::INTEGER;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            lex.push('.');
            lex.push_str(&self.take_while(|c| c.is_ascii_digit()));
            datatype = xsd::DECIMAL;
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            let sign = self.peek_at(1).filter(|c| matches!(c, '+' | '-'));
            let digit_at = if sign.is_some() { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
                lex.push(e);
                if let Some(s) = sign {
                    self.bump();
                    lex.push(s);
                }
                lex.push_str(&self.take_while(|c| c.is_ascii_digit()));
                datatype = xsd::DOUBLE;
            }
        }
        Ok(Tok::Number(lex, datatype))
    }

    fn string(&mut self) -> Result<Tok, QueryError> {
        let quote = self.bump().unwrap_or('"');
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.bump();
            self.bump();
        }
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return self.error("closing quote", "end of query"),
                Some(c) if c == quote => {
                    if !long {
                        return Ok(Tok::Str(out));
                    }
                    if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) && self.peek_at(2) != Some(quote) {
                        self.bump();
                        self.bump();
                        return Ok(Tok::Str(out));
                    }
                    out.push(c);
                }
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('b') => '\u{8}',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex(4)?,
                        Some('U') => self.hex(8)?,
                        other => {
                            return self.error("string escape", &format!("'\\{}'", other.unwrap_or(' ')));
                        }
                    };
                    out.push(c);
                }
                Some('\n') if !long => return self.error("closing quote", "line break"),
                Some(c) => out.push(c),
            }
        }
    }

    fn hex(&mut self, width: usize) -> Result<char, QueryError> {
        let mut v = 0u32;
        for _ in 0..width {
            match self.bump().and_then(|c| c.to_digit(16)) {
                Some(d) => v = v * 16 + d,
                None => return self.error("hex digit", "invalid escape"),
            }
        }
        char::from_u32(v).map_or_else(|| self.error("code point", "invalid escape"), Ok)
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

fn is_var_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}
