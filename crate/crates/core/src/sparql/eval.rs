use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::ast::*;
use super::parser::build_regex;
use super::results::ResultSet;
use crate::rdf::{Graph, Literal, Pattern, Term};
use crate::vocab::xsd;

type Row = Vec<Option<Term>>;

/// Evaluation error inside an expression; the enclosing filter rejects the row.
struct TypeError;

type EResult<T> = Result<T, TypeError>;

pub fn evaluate(query: &Query, graph: &Graph) -> ResultSet {
    let width = query.variables.len();
    let mut rows = eval_node(&query.pattern, graph, width);

    if query.form == QueryForm::Ask {
        return ResultSet::Boolean(!rows.is_empty());
    }

    if !query.order_by.is_empty() {
        let mut keyed: Vec<(Vec<Option<Term>>, Row)> = rows
            .into_iter()
            .map(|row| {
                let keys = query.order_by.iter().map(|c| eval(&c.expression, &row).ok()).collect();
                (keys, row)
            })
            .collect();
        keyed.sort_by(|(a, _), (b, _)| {
            for (cond, (x, y)) in query.order_by.iter().zip(a.iter().zip(b)) {
                let ord = order_terms(x.as_ref(), y.as_ref());
                let ord = if cond.descending { ord.reverse() } else { ord };
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        });
        rows = keyed.into_iter().map(|(_, row)| row).collect();
    }

    let out_vars = query.output_vars();
    let mut out_rows: Vec<Row> = match &query.projection {
        Projection::Count { var, distinct, .. } => {
            let n = match (var, distinct) {
                (Some(v), false) => rows.iter().filter(|r| r[*v].is_some()).count(),
                (Some(v), true) => rows.iter().filter_map(|r| r[*v].as_ref()).collect::<BTreeSet<_>>().len(),
                (None, false) => rows.len(),
                (None, true) => distinct_rows(rows).len(),
            };
            vec![vec![Some(Term::literal(Literal::integer(n as i64)))]]
        }
        _ => rows
            .into_iter()
            .map(|row| out_vars.iter().map(|v| row[*v].clone()).collect())
            .collect(),
    };
    if query.distinct {
        out_rows = distinct_rows(out_rows);
    }
    let offset = query.offset.unwrap_or(0);
    let limit = query.limit.unwrap_or(usize::MAX);
    let rows = out_rows.into_iter().skip(offset).take(limit).collect();

    ResultSet::Solutions {
        variables: out_vars.iter().map(|v| query.var_name(*v).to_string()).collect(),
        rows,
    }
}

/// Keeps the first occurrence of every row.
fn distinct_rows(rows: Vec<Row>) -> Vec<Row> {
    let mut seen = BTreeSet::new();
    rows.into_iter().filter(|r| seen.insert(r.clone())).collect()
}

fn eval_node(node: &PatternNode, graph: &Graph, width: usize) -> Vec<Row> {
    match node {
        PatternNode::Bgp(patterns) => eval_bgp(patterns, graph, width),
        // A bare filter outside a group constrains nothing it can see.
        PatternNode::Filter(_) => vec![vec![None; width]],
        PatternNode::Optional(inner) => left_join(vec![vec![None; width]], inner, graph, width),
        PatternNode::Union(a, b) => {
            let mut rows = eval_node(a, graph, width);
            rows.extend(eval_node(b, graph, width));
            rows
        }
        PatternNode::Join(children) => {
            let mut acc = vec![vec![None; width]];
            let mut filters = Vec::new();
            for child in children {
                match child {
                    PatternNode::Filter(e) => filters.push(e),
                    PatternNode::Optional(inner) => acc = left_join(acc, inner, graph, width),
                    other => acc = join(&acc, &eval_node(other, graph, width)),
                }
            }
            acc.retain(|row| filters.iter().all(|f| passes(f, row)));
            acc
        }
    }
}

fn eval_bgp(patterns: &[TriplePattern], graph: &Graph, width: usize) -> Vec<Row> {
    let mut rows = vec![vec![None; width]];
    for tp in patterns {
        let mut next = Vec::new();
        for row in &rows {
            let resolve = |p: &TermPattern| match p {
                TermPattern::Term(t) => Some(t.clone()),
                TermPattern::Var(v) => row[*v].clone(),
            };
            let (s, p, o) = (resolve(&tp.subject), resolve(&tp.predicate), resolve(&tp.object));
            for t in graph.match_iter(Pattern::new(s.as_ref(), p.as_ref(), o.as_ref())) {
                let mut extended = row.clone();
                let bound = [
                    (&tp.subject, t.subject()),
                    (&tp.predicate, t.predicate()),
                    (&tp.object, t.object()),
                ];
                let consistent = bound.iter().all(|(pat, term)| match pat {
                    TermPattern::Term(_) => true,
                    TermPattern::Var(v) => match &extended[*v] {
                        Some(existing) => existing == *term,
                        None => {
                            extended[*v] = Some((*term).clone());
                            true
                        }
                    },
                });
                if consistent {
                    next.push(extended);
                }
            }
        }
        rows = next;
    }
    rows
}

fn merge(a: &Row, b: &Row) -> Option<Row> {
    let mut out = a.clone();
    for (slot, value) in out.iter_mut().zip(b) {
        match (slot.as_ref(), value) {
            (_, None) => {}
            (None, Some(v)) => *slot = Some(v.clone()),
            (Some(x), Some(y)) if x == y => {}
            _ => return None,
        }
    }
    Some(out)
}

fn join(left: &[Row], right: &[Row]) -> Vec<Row> {
    let mut out = Vec::new();
    for l in left {
        for r in right {
            if let Some(m) = merge(l, r) {
                out.push(m);
            }
        }
    }
    out
}

/// `OPTIONAL { P FILTER(F) }`: the inner group's filters act as the
/// left-join condition over merged rows.
fn left_join(left: Vec<Row>, inner: &PatternNode, graph: &Graph, width: usize) -> Vec<Row> {
    let (right, filters): (Vec<Row>, Vec<&Expression>) = match inner {
        PatternNode::Join(children) => {
            let filters = children
                .iter()
                .filter_map(|c| match c {
                    PatternNode::Filter(e) => Some(e),
                    _ => None,
                })
                .collect();
            let rest = children.iter().filter(|c| !matches!(c, PatternNode::Filter(_))).cloned().collect();
            (eval_node(&PatternNode::Join(rest), graph, width), filters)
        }
        other => (eval_node(other, graph, width), Vec::new()),
    };
    let mut out = Vec::new();
    for l in left {
        let before = out.len();
        for r in &right {
            if let Some(m) = merge(&l, r) {
                if filters.iter().all(|f| passes(f, &m)) {
                    out.push(m);
                }
            }
        }
        if out.len() == before {
            out.push(l);
        }
    }
    out
}

fn passes(expr: &Expression, row: &Row) -> bool {
    eval(expr, row).and_then(|t| ebv(&t)).unwrap_or(false)
}

fn boolean(b: bool) -> Term {
    Term::literal(Literal::typed(if b { "true" } else { "false" }, xsd::BOOLEAN))
}

/// Effective boolean value.
fn ebv(term: &Term) -> EResult<bool> {
    let Term::Literal(lit) = term else {
        return Err(TypeError);
    };
    if lit.datatype() == xsd::BOOLEAN {
        return match lit.lexical() {
            "true" | "1" => Ok(true),
            "false" | "0" => Ok(false),
            _ => Err(TypeError),
        };
    }
    if xsd::is_numeric(lit.datatype()) {
        return match lit.numeric_value() {
            Some(v) => Ok(v != 0.0 && !v.is_nan()),
            None => Ok(false),
        };
    }
    if lit.is_plain_string() {
        return Ok(!lit.lexical().is_empty());
    }
    Err(TypeError)
}

fn eval(expr: &Expression, row: &Row) -> EResult<Term> {
    match expr {
        Expression::Var(v) => row[*v].clone().ok_or(TypeError),
        Expression::Constant(t) => Ok(t.clone()),
        Expression::Bound(v) => Ok(boolean(row[*v].is_some())),
        Expression::Not(a) => Ok(boolean(!ebv(&eval(a, row)?)?)),
        Expression::Or(a, b) => {
            let x = eval(a, row).and_then(|t| ebv(&t));
            let y = eval(b, row).and_then(|t| ebv(&t));
            match (x, y) {
                (Ok(true), _) | (_, Ok(true)) => Ok(boolean(true)),
                (Ok(false), Ok(false)) => Ok(boolean(false)),
                _ => Err(TypeError),
            }
        }
        Expression::And(a, b) => {
            let x = eval(a, row).and_then(|t| ebv(&t));
            let y = eval(b, row).and_then(|t| ebv(&t));
            match (x, y) {
                (Ok(false), _) | (_, Ok(false)) => Ok(boolean(false)),
                (Ok(true), Ok(true)) => Ok(boolean(true)),
                _ => Err(TypeError),
            }
        }
        Expression::Compare(op, a, b) => Ok(boolean(compare(*op, &eval(a, row)?, &eval(b, row)?)?)),
        Expression::Regex(text, pattern) => {
            let text = eval(text, row)?;
            let subject = string_arg(&text)?;
            let matched = match pattern {
                RegexPattern::Compiled(re) => re.is_match(subject.lexical()),
                RegexPattern::Invalid => return Err(TypeError),
                RegexPattern::Dynamic { pattern, flags } => {
                    let p = eval(pattern, row)?;
                    let p = simple_arg(&p)?;
                    let f = match flags {
                        Some(f) => String::from(simple_arg(&eval(f, row)?)?.lexical()),
                        None => String::new(),
                    };
                    build_regex(p.lexical(), &f).ok_or(TypeError)?.is_match(subject.lexical())
                }
            };
            Ok(boolean(matched))
        }
        Expression::Call(builtin, args) => {
            let values = args.iter().map(|a| eval(a, row)).collect::<EResult<Vec<_>>>()?;
            call(*builtin, &values)
        }
    }
}

/// A string literal: simple, `xsd:string` or language-tagged.
fn string_arg(term: &Term) -> EResult<&Literal> {
    match term {
        Term::Literal(l) if l.is_plain_string() || l.language().is_some() => Ok(l),
        _ => Err(TypeError),
    }
}

fn simple_arg(term: &Term) -> EResult<&Literal> {
    match term {
        Term::Literal(l) if l.is_plain_string() => Ok(l),
        _ => Err(TypeError),
    }
}

fn with_lexical(lit: &Literal, lexical: String) -> Term {
    Term::literal(match lit.language() {
        Some(lang) => Literal::lang_string(lexical, lang),
        None => Literal::simple(lexical),
    })
}

fn call(builtin: Builtin, args: &[Term]) -> EResult<Term> {
    let arg = &args[0];
    Ok(match builtin {
        Builtin::Str => match arg {
            Term::Iri(iri) => Term::literal(Literal::simple(iri.clone())),
            Term::Literal(l) => Term::literal(Literal::simple(l.lexical())),
            Term::BlankNode(_) => return Err(TypeError),
        },
        Builtin::Lang => match arg {
            Term::Literal(l) => Term::literal(Literal::simple(l.language().unwrap_or(""))),
            _ => return Err(TypeError),
        },
        Builtin::LCase => {
            let l = string_arg(arg)?;
            with_lexical(l, l.lexical().to_lowercase())
        }
        Builtin::UCase => {
            let l = string_arg(arg)?;
            with_lexical(l, l.lexical().to_uppercase())
        }
        Builtin::Contains | Builtin::StrStarts | Builtin::StrEnds => {
            let a = string_arg(arg)?;
            let b = string_arg(&args[1])?;
            if b.language().is_some() && a.language() != b.language() {
                return Err(TypeError);
            }
            let (a, b) = (a.lexical(), b.lexical());
            boolean(match builtin {
                Builtin::Contains => a.contains(b),
                Builtin::StrStarts => a.starts_with(b),
                _ => a.ends_with(b),
            })
        }
        Builtin::IsIri => boolean(arg.is_iri()),
        Builtin::IsLiteral => boolean(arg.is_literal()),
        Builtin::IsBlank => boolean(arg.is_blank()),
    })
}

fn compare(op: CompareOp, a: &Term, b: &Term) -> EResult<bool> {
    let ord = match (a, b) {
        (Term::Literal(x), Term::Literal(y)) => literal_cmp(x, y)?,
        _ => None,
    };
    match ord {
        Some(ord) => Ok(match op {
            CompareOp::Eq => ord == Ordering::Equal,
            CompareOp::Ne => ord != Ordering::Equal,
            CompareOp::Lt => ord == Ordering::Less,
            CompareOp::Le => ord != Ordering::Greater,
            CompareOp::Gt => ord == Ordering::Greater,
            CompareOp::Ge => ord != Ordering::Less,
        }),
        // Not comparable by value: only term identity is defined.
        None => match op {
            CompareOp::Eq => Ok(a == b),
            CompareOp::Ne => Ok(a != b),
            _ => Err(TypeError),
        },
    }
}

/// Value ordering of two literals. `Ok(None)` means no value ordering but
/// term identity still decides equality; `Err` is a type error.
fn literal_cmp(x: &Literal, y: &Literal) -> EResult<Option<Ordering>> {
    let numeric = (xsd::is_numeric(x.datatype()), xsd::is_numeric(y.datatype()));
    let stringy = (x.is_plain_string(), y.is_plain_string());
    match (numeric, stringy) {
        ((true, true), _) => match (x.numeric_value(), y.numeric_value()) {
            // NaN is incomparable.
            (Some(a), Some(b)) => a.partial_cmp(&b).map(Some).ok_or(TypeError),
            _ => Ok(None),
        },
        ((true, false), (_, true)) | ((false, true), (true, _)) => Err(TypeError),
        (_, (true, true)) => Ok(Some(x.lexical().cmp(y.lexical()))),
        _ if x.datatype() == xsd::BOOLEAN && y.datatype() == xsd::BOOLEAN => {
            match (bool_value(x.lexical()), bool_value(y.lexical())) {
                (Some(a), Some(b)) => Ok(Some(a.cmp(&b))),
                _ => Ok(None),
            }
        }
        _ if x.language().is_some() && y.language().is_some() => {
            if x.language() == y.language() {
                Ok(Some(x.lexical().cmp(y.lexical())))
            } else {
                Ok(None)
            }
        }
        _ => Ok(None),
    }
}

fn bool_value(lex: &str) -> Option<bool> {
    match lex {
        "true" | "1" => Some(true),
        "false" | "0" => Some(false),
        _ => None,
    }
}

/// Sort order for ORDER BY: unbound first, then literals (numeric literals
/// by value, ahead of other literals compared by lexical form), then IRIs,
/// then blank nodes. Ties fall back to the canonical term order.
pub fn order_terms(a: Option<&Term>, b: Option<&Term>) -> Ordering {
    fn rank(t: &Term) -> u8 {
        match t {
            Term::Literal(l) if l.numeric_value().is_some() => 0,
            Term::Literal(_) => 1,
            Term::Iri(_) => 2,
            Term::BlankNode(_) => 3,
        }
    }
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(x), Some(y)) => rank(x).cmp(&rank(y)).then_with(|| {
            let by_value = match (x, y) {
                (Term::Literal(l), Term::Literal(m)) => match (l.numeric_value(), m.numeric_value()) {
                    (Some(p), Some(q)) => p.total_cmp(&q),
                    _ => l.lexical().cmp(m.lexical()),
                },
                _ => Ordering::Equal,
            };
            by_value.then_with(|| x.cmp(y))
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_turtle;
    use crate::sparql::parse_query;

    const DATA: &str = r#"
@prefix ex: <http://ex.org/> .
ex:a ex:p ex:b ; ex:v 3 ; ex:name "alpha" .
ex:b ex:p ex:c ; ex:v 1.5 ; ex:name "Beta"@en .
ex:c ex:v 10 ; ex:name "gamma" .
ex:d ex:p ex:a .
"#;

    fn run(query: &str) -> ResultSet {
        let g = parse_turtle(DATA).unwrap().graph;
        let q = parse_query(&alloc::format!("PREFIX ex: <http://ex.org/>\n{query}")).unwrap();
        evaluate(&q, &g)
    }

    fn column(rs: &ResultSet, i: usize) -> Vec<String> {
        rs.rows()
            .iter()
            .map(|r| r[i].as_ref().map_or(String::from("-"), |t| t.to_nt()))
            .collect()
    }

    #[test]
    fn ask_on_empty_graph_is_false() {
        let q = parse_query("ASK { ?s ?p ?o }").unwrap();
        assert_eq!(evaluate(&q, &Graph::new()), ResultSet::Boolean(false));
        assert_eq!(run("ASK { ex:a ex:p ex:b }"), ResultSet::Boolean(true));
    }

    #[test]
    fn order_by_numeric_value() {
        let rs = run("SELECT ?v WHERE { ?s ex:v ?v } ORDER BY ?v");
        assert_eq!(column(&rs, 0), [
            "\"1.5\"^^<http://www.w3.org/2001/XMLSchema#decimal>",
            "\"3\"^^<http://www.w3.org/2001/XMLSchema#integer>",
            "\"10\"^^<http://www.w3.org/2001/XMLSchema#integer>",
        ]);
        let desc = run("SELECT ?v WHERE { ?s ex:v ?v } ORDER BY DESC(?v) LIMIT 2");
        assert_eq!(column(&desc, 0)[0], "\"10\"^^<http://www.w3.org/2001/XMLSchema#integer>");
        assert_eq!(desc.rows().len(), 2);
    }

    #[test]
    fn optional_leaves_unbound() {
        let rs = run("SELECT ?s ?o WHERE { ?s ex:v ?v OPTIONAL { ?s ex:p ?o } } ORDER BY ?s");
        assert_eq!(column(&rs, 1), ["<http://ex.org/b>", "<http://ex.org/c>", "-"]);
    }

    #[test]
    fn optional_filter_is_join_condition() {
        let rs = run("SELECT ?s ?o WHERE { ?s ex:v ?v OPTIONAL { ?s ex:p ?o FILTER(?v > 2) } } ORDER BY ?s");
        assert_eq!(column(&rs, 1), ["<http://ex.org/b>", "-", "-"]);
    }

    #[test]
    fn filters_with_errors_reject_rows() {
        // "alpha" > 2 is a type error; only numeric rows survive
        let rs = run("SELECT ?x WHERE { ?s ?p ?x FILTER(?x > 2) }");
        assert_eq!(rs.rows().len(), 2);
        let rs = run("SELECT ?s WHERE { ?s ex:name ?n FILTER regex(str(?n), \"^b\", \"i\") }");
        assert_eq!(column(&rs, 0), ["<http://ex.org/b>"]);
        let rs = run("SELECT ?s WHERE { ?s ex:name ?n FILTER(?n = \"alpha\" || ?n > 2) }");
        assert_eq!(column(&rs, 0), ["<http://ex.org/a>"]);
        let rs = run("SELECT ?s WHERE { ?s ex:name ?n FILTER(contains(lcase(?n), \"et\")) }");
        assert_eq!(column(&rs, 0), ["<http://ex.org/b>"]);
    }

    #[test]
    fn union_count_and_distinct() {
        let rs = run("SELECT (COUNT(?s) AS ?n) WHERE { { ?s ex:p ?o } UNION { ?s ex:v ?o } }");
        assert_eq!(column(&rs, 0), ["\"6\"^^<http://www.w3.org/2001/XMLSchema#integer>"]);
        let rs = run("SELECT (COUNT(DISTINCT ?s) AS ?n) WHERE { { ?s ex:p ?o } UNION { ?s ex:v ?o } }");
        assert_eq!(column(&rs, 0), ["\"4\"^^<http://www.w3.org/2001/XMLSchema#integer>"]);
        let rs = run("SELECT DISTINCT ?s WHERE { { ?s ex:p ?o } UNION { ?s ex:v ?o } }");
        assert_eq!(rs.rows().len(), 4);
    }

    #[test]
    fn repeated_variable_in_pattern() {
        let g = parse_turtle("@prefix ex: <http://ex.org/> . ex:a ex:p ex:a . ex:a ex:p ex:b .").unwrap().graph;
        let q = parse_query("SELECT ?x WHERE { ?x ?p ?x }").unwrap();
        assert_eq!(evaluate(&q, &g).rows().len(), 1);
    }

    #[test]
    fn term_order() {
        let one = Term::literal(Literal::integer(1));
        let s = Term::literal(Literal::simple("a"));
        let iri = Term::iri("http://x");
        let blank = Term::blank("b");
        let seq = [None, Some(&one), Some(&s), Some(&iri), Some(&blank)];
        for w in seq.windows(2) {
            assert_eq!(order_terms(w[0], w[1]), Ordering::Less);
        }
    }
}
