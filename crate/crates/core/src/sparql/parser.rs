use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use regex_automata::meta::Regex;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::QueryError;
use crate::rdf::{Literal, Term};
use crate::vocab::{rdf, xsd};

/// Keywords outside the supported subset, reported by name.
const UNSUPPORTED_KEYWORDS: &[(&str, &str)] = &[
    ("CONSTRUCT", "CONSTRUCT query form"),
    ("DESCRIBE", "DESCRIBE query form"),
    ("INSERT", "SPARQL UPDATE"),
    ("DELETE", "SPARQL UPDATE"),
    ("LOAD", "SPARQL UPDATE"),
    ("CLEAR", "SPARQL UPDATE"),
    ("DROP", "SPARQL UPDATE"),
    ("CREATE", "SPARQL UPDATE"),
    ("WITH", "SPARQL UPDATE"),
    ("BASE", "BASE declaration"),
    ("FROM", "FROM dataset clause"),
    ("GRAPH", "GRAPH pattern"),
    ("SERVICE", "federated query (SERVICE)"),
    ("BIND", "BIND"),
    ("VALUES", "VALUES"),
    ("MINUS", "MINUS"),
    ("EXISTS", "EXISTS"),
    ("NOT", "NOT EXISTS / NOT IN"),
    ("IN", "IN operator"),
    ("GROUP", "GROUP BY"),
    ("HAVING", "HAVING"),
    ("REDUCED", "REDUCED"),
    ("SUM", "aggregate SUM"),
    ("AVG", "aggregate AVG"),
    ("MIN", "aggregate MIN"),
    ("MAX", "aggregate MAX"),
    ("SAMPLE", "aggregate SAMPLE"),
    ("GROUP_CONCAT", "aggregate GROUP_CONCAT"),
    ("IF", "IF function"),
    ("COALESCE", "COALESCE function"),
];

pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        variables: Vec::new(),
        prefixes: BTreeMap::new(),
    };
    p.query()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    variables: Vec<String>,
    prefixes: BTreeMap<String, String>,
}

type PResult<T> = Result<T, QueryError>;

fn unsupported<T>(name: &str) -> PResult<T> {
    Err(QueryError::UnsupportedSparqlFeature { name: name.to_string() })
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        let tok = &self.tokens[self.pos];
        Err(QueryError::QuerySyntaxError {
            position: tok.position,
            line: tok.line,
            column: tok.column,
            expected: expected.to_string(),
            found: tok.tok.describe(),
        })
    }

    fn is_word(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn eat_word(&mut self, kw: &str) -> bool {
        if self.is_word(kw) {
            self.next();
            true
        } else {
            false
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(&format!("'{p}'"))
        }
    }

    fn check_unsupported_word(&self) -> PResult<()> {
        if let Tok::Word(w) = self.peek() {
            let upper = w.to_ascii_uppercase();
            if let Some((_, name)) = UNSUPPORTED_KEYWORDS.iter().find(|(k, _)| *k == upper) {
                return unsupported(name);
            }
        }
        Ok(())
    }

    fn var(&mut self, name: &str) -> VarId {
        match self.variables.iter().position(|v| v == name) {
            Some(i) => i,
            None => {
                self.variables.push(name.to_string());
                self.variables.len() - 1
            }
        }
    }

    fn query(&mut self) -> PResult<Query> {
        loop {
            if self.eat_word("PREFIX") {
                let Tok::PName(prefix, local) = self.next() else {
                    self.pos -= 1;
                    return self.error("prefix name followed by ':'");
                };
                if !local.is_empty() {
                    self.pos -= 1;
                    return self.error("prefix name followed by ':'");
                }
                let Tok::Iri(ns) = self.next() else {
                    self.pos -= 1;
                    return self.error("namespace IRI in angle brackets");
                };
                self.prefixes.insert(prefix, ns);
            } else {
                self.check_unsupported_word()?;
                break;
            }
        }

        let (form, projection, distinct) = if self.eat_word("SELECT") {
            let distinct = self.eat_word("DISTINCT");
            self.check_unsupported_word()?;
            (QueryForm::Select, self.projection()?, distinct)
        } else if self.eat_word("ASK") {
            (QueryForm::Ask, Projection::All, false)
        } else {
            return self.error("SELECT or ASK");
        };
        self.check_unsupported_word()?;
        self.eat_word("WHERE");
        if !self.is_punct("{") {
            return self.error("'{' opening the WHERE clause");
        }
        let pattern = self.group()?;

        let mut order_by = Vec::new();
        let mut limit = None;
        let mut offset = None;
        loop {
            self.check_unsupported_word()?;
            if self.eat_word("ORDER") {
                if !self.eat_word("BY") {
                    return self.error("BY after ORDER");
                }
                order_by = self.order_conditions()?;
            } else if self.eat_word("LIMIT") {
                limit = Some(self.natural("LIMIT")?);
            } else if self.eat_word("OFFSET") {
                offset = Some(self.natural("OFFSET")?);
            } else {
                break;
            }
        }
        if *self.peek() != Tok::Eof {
            return self.error("end of query");
        }

        let query = Query {
            form,
            projection,
            pattern,
            distinct,
            order_by,
            limit,
            offset,
            variables: core::mem::take(&mut self.variables),
            prefixes: core::mem::take(&mut self.prefixes),
        };
        check_scope(&query)?;
        Ok(query)
    }

    fn natural(&mut self, clause: &str) -> PResult<usize> {
        match self.peek().clone() {
            Tok::Number(n, xsd::INTEGER) => match n.parse() {
                Ok(v) => {
                    self.next();
                    Ok(v)
                }
                Err(_) => self.error(&format!("non-negative integer after {clause}")),
            },
            _ => self.error(&format!("non-negative integer after {clause}")),
        }
    }

    fn projection(&mut self) -> PResult<Projection> {
        if self.eat_punct("*") {
            return Ok(Projection::All);
        }
        let mut vars = Vec::new();
        let mut count = None;
        loop {
            match self.peek().clone() {
                Tok::Var(name) => {
                    self.next();
                    let v = self.var(&name);
                    vars.push(v);
                }
                Tok::Punct("(") => {
                    self.next();
                    if !self.eat_word("COUNT") {
                        self.check_unsupported_word()?;
                        return unsupported("projection expression other than COUNT");
                    }
                    self.expect_punct("(")?;
                    let distinct = self.eat_word("DISTINCT");
                    let var = if self.eat_punct("*") {
                        None
                    } else if let Tok::Var(name) = self.peek().clone() {
                        self.next();
                        Some(self.var(&name))
                    } else {
                        return self.error("variable or '*' inside COUNT");
                    };
                    self.expect_punct(")")?;
                    if !self.eat_word("AS") {
                        return self.error("AS ?alias after COUNT(...)");
                    }
                    let Tok::Var(alias) = self.peek().clone() else {
                        return self.error("alias variable after AS");
                    };
                    self.next();
                    self.expect_punct(")")?;
                    if count.is_some() {
                        return unsupported("multiple aggregates");
                    }
                    let alias = self.var(&alias);
                    count = Some(Projection::Count { var, distinct, alias });
                }
                _ => break,
            }
        }
        match (count, vars.is_empty()) {
            (Some(c), true) => Ok(c),
            (Some(_), false) => unsupported("aggregate mixed with plain variables (requires GROUP BY)"),
            (None, false) => Ok(Projection::Vars(vars)),
            (None, true) => self.error("projection variables, '*' or (COUNT(...) AS ?var)"),
        }
    }

    fn group(&mut self) -> PResult<PatternNode> {
        self.expect_punct("{")?;
        if self.is_word("SELECT") {
            return unsupported("subquery");
        }
        let mut children: Vec<PatternNode> = Vec::new();
        loop {
            self.check_unsupported_word()?;
            if self.eat_punct("}") {
                break;
            }
            if self.eat_punct(".") {
                continue;
            }
            if self.eat_word("FILTER") {
                children.push(PatternNode::Filter(self.constraint()?));
            } else if self.eat_word("OPTIONAL") {
                let inner = self.group()?;
                children.push(PatternNode::Optional(Box::new(inner)));
            } else if self.is_punct("{") {
                let mut node = self.group()?;
                while self.eat_word("UNION") {
                    let right = self.group()?;
                    node = PatternNode::Union(Box::new(node), Box::new(right));
                }
                children.push(node);
            } else if *self.peek() == Tok::Eof {
                return self.error("'}'");
            } else {
                let patterns = self.triples_block()?;
                match children.last_mut() {
                    Some(PatternNode::Bgp(existing)) => existing.extend(patterns),
                    _ => children.push(PatternNode::Bgp(patterns)),
                }
            }
        }
        Ok(PatternNode::Join(children))
    }

    fn triples_block(&mut self) -> PResult<Vec<TriplePattern>> {
        let mut out = Vec::new();
        let subject = match self.peek() {
            Tok::Str(_) | Tok::Number(..) => return self.error("subject (variable or IRI)"),
            _ => self.term_or_var("subject")?,
        };
        loop {
            if self.is_punct("^") {
                return unsupported("property path (inverse '^')");
            }
            let predicate = if self.is_word("a") {
                self.next();
                TermPattern::Term(Term::iri(rdf::TYPE))
            } else {
                match self.peek() {
                    Tok::Var(_) | Tok::Iri(_) | Tok::PName(..) => self.term_or_var("predicate")?,
                    Tok::Punct("(") => return unsupported("property path (grouped path)"),
                    _ => return self.error("predicate (variable, IRI or 'a')"),
                }
            };
            if matches!(self.peek(), Tok::Punct("/" | "|" | "*" | "+" | "?")) {
                return unsupported("property path");
            }
            loop {
                let object = self.term_or_var("object")?;
                out.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if !self.eat_punct(",") {
                    break;
                }
            }
            if !self.eat_punct(";") {
                break;
            }
            while self.eat_punct(";") {}
            if matches!(self.peek(), Tok::Punct("." | "}")) || self.is_word("FILTER") || self.is_word("OPTIONAL") {
                break;
            }
        }
        Ok(out)
    }

    fn term_or_var(&mut self, role: &str) -> PResult<TermPattern> {
        match self.peek().clone() {
            Tok::Var(name) => {
                self.next();
                Ok(TermPattern::Var(self.var(&name)))
            }
            Tok::Punct("[") => unsupported("blank node property list"),
            Tok::Punct("(") => unsupported("RDF collection"),
            Tok::Blank(_) => unsupported("blank node in query pattern"),
            _ => match self.constant_term()? {
                Some(t) => Ok(TermPattern::Term(t)),
                None => self.error(role),
            },
        }
    }

    fn resolve(&self, prefix: &str, local: &str) -> PResult<String> {
        match self.prefixes.get(prefix) {
            Some(ns) => Ok(format!("{ns}{local}")),
            None => Err(QueryError::QuerySyntaxError {
                position: self.tokens[self.pos].position,
                line: self.tokens[self.pos].line,
                column: self.tokens[self.pos].column,
                expected: format!("a PREFIX declaration for '{prefix}:'"),
                found: format!("undeclared prefix in {prefix}:{local}"),
            }),
        }
    }

    /// IRI, prefixed name or literal; `None` (nothing consumed) otherwise.
    fn constant_term(&mut self) -> PResult<Option<Term>> {
        let negative = match self.peek() {
            Tok::Punct(s @ ("-" | "+")) if matches!(self.peek_at(1), Tok::Number(..)) => {
                let neg = *s == "-";
                self.next();
                Some(neg)
            }
            _ => None,
        };
        let term = match self.peek().clone() {
            Tok::Iri(iri) => {
                self.next();
                if !crate::rdf::is_absolute_iri(&iri) {
                    return unsupported("relative IRI (no BASE support)");
                }
                Term::iri(iri)
            }
            Tok::PName(prefix, local) => {
                let iri = self.resolve(&prefix, &local)?;
                self.next();
                Term::iri(iri)
            }
            Tok::Number(lex, dt) => {
                self.next();
                let lex = match negative {
                    Some(true) => format!("-{lex}"),
                    _ => lex,
                };
                Term::literal(Literal::typed(lex, dt))
            }
            Tok::Word(w) if w == "true" || w == "false" => {
                self.next();
                Term::literal(Literal::typed(w, xsd::BOOLEAN))
            }
            Tok::Str(s) => {
                self.next();
                match self.peek().clone() {
                    Tok::LangTag(tag) => {
                        self.next();
                        Term::literal(Literal::lang_string(s, &tag))
                    }
                    Tok::Punct("^^") => {
                        self.next();
                        let dt = match self.next() {
                            Tok::Iri(iri) => iri,
                            Tok::PName(p, l) => self.resolve(&p, &l)?,
                            _ => {
                                self.pos -= 1;
                                return self.error("datatype IRI after '^^'");
                            }
                        };
                        Term::literal(Literal::typed(s, dt))
                    }
                    _ => Term::literal(Literal::simple(s)),
                }
            }
            _ => return Ok(None),
        };
        Ok(Some(term))
    }

    fn constraint(&mut self) -> PResult<Expression> {
        if self.is_punct("(") {
            self.next();
            let e = self.expression()?;
            self.expect_punct(")")?;
            return Ok(e);
        }
        self.check_unsupported_word()?;
        match self.peek() {
            Tok::Word(_) => self.call(),
            _ => self.error("'(' or a function call after FILTER"),
        }
    }

    fn order_conditions(&mut self) -> PResult<Vec<OrderCondition>> {
        let mut out = Vec::new();
        loop {
            self.check_unsupported_word()?;
            let cond = if self.is_word("ASC") || self.is_word("DESC") {
                let descending = self.is_word("DESC");
                self.next();
                self.expect_punct("(")?;
                let expression = self.expression()?;
                self.expect_punct(")")?;
                OrderCondition { expression, descending }
            } else {
                match self.peek().clone() {
                    Tok::Var(name) => {
                        self.next();
                        OrderCondition {
                            expression: Expression::Var(self.var(&name)),
                            descending: false,
                        }
                    }
                    Tok::Punct("(") => {
                        self.next();
                        let expression = self.expression()?;
                        self.expect_punct(")")?;
                        OrderCondition { expression, descending: false }
                    }
                    Tok::Word(w) if !["LIMIT", "OFFSET"].contains(&w.to_ascii_uppercase().as_str()) => OrderCondition {
                        expression: self.call()?,
                        descending: false,
                    },
                    _ => break,
                }
            };
            out.push(cond);
        }
        if out.is_empty() {
            return self.error("order condition after ORDER BY");
        }
        Ok(out)
    }

    fn expression(&mut self) -> PResult<Expression> {
        let mut left = self.and_expression()?;
        while self.eat_punct("||") {
            let right = self.and_expression()?;
            left = Expression::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and_expression(&mut self) -> PResult<Expression> {
        let mut left = self.relational()?;
        while self.eat_punct("&&") {
            let right = self.relational()?;
            left = Expression::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn relational(&mut self) -> PResult<Expression> {
        let left = self.unary()?;
        let op = match self.peek() {
            Tok::Punct("=") => CompareOp::Eq,
            Tok::Punct("!=") => CompareOp::Ne,
            Tok::Punct("<") => CompareOp::Lt,
            Tok::Punct("<=") => CompareOp::Le,
            Tok::Punct(">") => CompareOp::Gt,
            Tok::Punct(">=") => CompareOp::Ge,
            Tok::Punct("+" | "-" | "*" | "/") => return unsupported("arithmetic expression"),
            _ => {
                self.check_unsupported_word()?;
                return Ok(left);
            }
        };
        self.next();
        let right = self.unary()?;
        if matches!(self.peek(), Tok::Punct("+" | "-" | "*" | "/")) {
            return unsupported("arithmetic expression");
        }
        Ok(Expression::Compare(op, Box::new(left), Box::new(right)))
    }

    fn unary(&mut self) -> PResult<Expression> {
        if self.eat_punct("!") {
            return Ok(Expression::Not(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expression> {
        match self.peek().clone() {
            Tok::Punct("(") => {
                self.next();
                let e = self.expression()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Tok::Var(name) => {
                self.next();
                Ok(Expression::Var(self.var(&name)))
            }
            Tok::PName(..) | Tok::Iri(_) if matches!(self.peek_at(1), Tok::Punct("(")) => {
                unsupported("cast or extension function call")
            }
            Tok::Word(w) if w != "true" && w != "false" => {
                self.check_unsupported_word()?;
                self.call()
            }
            _ => match self.constant_term()? {
                Some(t) => Ok(Expression::Constant(t)),
                None => self.error("expression"),
            },
        }
    }

    fn call(&mut self) -> PResult<Expression> {
        let Tok::Word(name) = self.peek().clone() else {
            return self.error("function name");
        };
        let upper = name.to_ascii_uppercase();
        if !matches!(self.peek_at(1), Tok::Punct("(")) {
            return self.error("expression");
        }
        if upper == "BOUND" {
            self.next();
            self.next();
            let Tok::Var(v) = self.peek().clone() else {
                return self.error("variable inside BOUND()");
            };
            self.next();
            self.expect_punct(")")?;
            return Ok(Expression::Bound(self.var(&v)));
        }
        if upper == "REGEX" {
            self.next();
            self.next();
            let text = self.expression()?;
            self.expect_punct(",")?;
            let pattern = self.expression()?;
            let flags = if self.eat_punct(",") { Some(self.expression()?) } else { None };
            self.expect_punct(")")?;
            return Ok(Expression::Regex(Box::new(text), compile_regex(pattern, flags)));
        }
        let Some((builtin, arity)) = Builtin::lookup(&name) else {
            return unsupported(&format!("function {name}()"));
        };
        self.next();
        self.next();
        let mut args = vec![self.expression()?];
        while self.eat_punct(",") {
            args.push(self.expression()?);
        }
        self.expect_punct(")")?;
        if args.len() != arity {
            self.pos -= 1;
            return self.error(&format!("{arity} argument(s) for {name}()"));
        }
        Ok(Expression::Call(builtin, args))
    }
}

fn simple_string(e: &Expression) -> Option<&str> {
    match e {
        Expression::Constant(Term::Literal(l)) if l.is_plain_string() => Some(l.lexical()),
        _ => None,
    }
}

pub(crate) fn build_regex(pattern: &str, flags: &str) -> Option<Regex> {
    let mut prefix = String::new();
    for f in flags.chars() {
        match f {
            'i' | 's' | 'm' | 'x' => prefix.push(f),
            _ => return None,
        }
    }
    let full = if prefix.is_empty() {
        String::from(pattern)
    } else {
        format!("(?{prefix}){pattern}")
    };
    Regex::new(&full).ok()
}

fn compile_regex(pattern: Expression, flags: Option<Expression>) -> RegexPattern {
    let constant_flags = match &flags {
        None => Some(""),
        Some(f) => simple_string(f),
    };
    match (simple_string(&pattern), constant_flags) {
        (Some(p), Some(f)) => match build_regex(p, f) {
            Some(re) => RegexPattern::Compiled(re),
            None => RegexPattern::Invalid,
        },
        _ => RegexPattern::Dynamic {
            pattern: Box::new(pattern),
            flags: flags.map(Box::new),
        },
    }
}

/// Projected and ordering variables must occur in a triple pattern.
fn check_scope(query: &Query) -> PResult<()> {
    let mut in_pattern = Vec::new();
    query.pattern.pattern_vars(&mut in_pattern);
    let mut used = Vec::new();
    match &query.projection {
        Projection::Vars(vars) => used.extend(vars.iter().copied()),
        Projection::Count { var: Some(v), .. } => used.push(*v),
        _ => {}
    }
    for cond in &query.order_by {
        cond.expression.vars(&mut used);
    }
    let alias = match query.projection {
        Projection::Count { alias, .. } => Some(alias),
        _ => None,
    };
    if let Some(alias) = alias {
        if in_pattern.contains(&alias) {
            return Err(QueryError::QuerySyntaxError {
                position: 0,
                line: 1,
                column: 1,
                expected: "a fresh alias variable for COUNT".to_string(),
                found: format!("?{} already used in the pattern", query.var_name(alias)),
            });
        }
    }
    for v in used {
        if Some(v) != alias && !in_pattern.contains(&v) {
            return Err(QueryError::QuerySyntaxError {
                position: 0,
                line: 1,
                column: 1,
                expected: "projected and ordering variables to appear in the WHERE pattern".to_string(),
                found: format!("?{} which is not bound by any triple pattern", query.var_name(v)),
            });
        }
    }
    Ok(())
}
