//! Seeded generators and a brute-force SPARQL oracle shared by the
//! property tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ontochat_core::rdf::{Graph, Literal, Term, Triple};
use ontochat_core::vocab::{owl, rdf, rdfs, xsd};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const EX: &str = "http://ex.org/";

pub fn node(i: usize) -> Term {
    Term::iri(format!("{EX}n{i}"))
}

pub fn pred(i: usize) -> Term {
    Term::iri(format!("{EX}p{i}"))
}

fn literal_pool() -> Vec<Term> {
    vec![
        Term::literal(Literal::integer(1)),
        Term::literal(Literal::integer(2)),
        Term::literal(Literal::typed("2.5", xsd::DECIMAL)),
        Term::literal(Literal::integer(-3)),
        Term::literal(Literal::simple("apple")),
        Term::literal(Literal::simple("Banana")),
        Term::literal(Literal::simple("cherry pie")),
        Term::literal(Literal::lang_string("chat", "fr")),
        Term::literal(Literal::typed("true", xsd::BOOLEAN)),
    ]
}

/// Up to `max` triples over a small vocabulary so joins hit often.
pub fn random_graph(rng: &mut impl Rng, max: usize) -> Graph {
    let literals = literal_pool();
    let mut g = Graph::new();
    g.set_prefix("ex", EX);
    g.set_prefix("xsd", xsd::NS);
    let n = rng.random_range(0..=max);
    for _ in 0..n {
        let subject = if rng.random_bool(0.1) {
            Term::blank(format!("b{}", rng.random_range(0..2)))
        } else {
            node(rng.random_range(0..5))
        };
        let predicate = pred(rng.random_range(0..3));
        let object = match rng.random_range(0..10) {
            0..=4 => node(rng.random_range(0..5)),
            5 => Term::blank(format!("b{}", rng.random_range(0..2))),
            _ => literals.choose(rng).unwrap().clone(),
        };
        g.insert(Triple::new(subject, predicate, object).unwrap());
    }
    g
}

/// A pattern position: variable index or constant term.
#[derive(Debug, Clone)]
pub enum Slot {
    Var(usize),
    Const(Term),
}

#[derive(Debug, Clone, Copy)]
pub enum Op {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Op {
    fn symbol(self) -> &'static str {
        match self {
            Op::Eq => "=",
            Op::Ne => "!=",
            Op::Lt => "<",
            Op::Le => "<=",
            Op::Gt => ">",
            Op::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TestFilter {
    pub left: usize,
    pub op: Op,
    pub right: Slot,
}

#[derive(Debug, Clone)]
pub struct TestQuery {
    pub patterns: Vec<[Slot; 3]>,
    pub filter: Option<TestFilter>,
    /// `None` is `SELECT *`.
    pub projection: Option<Vec<usize>>,
    pub distinct: bool,
}

const VAR_NAMES: [&str; 4] = ["x", "y", "z", "w"];

impl TestQuery {
    /// Variables in first-occurrence order over the patterns.
    pub fn vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for p in &self.patterns {
            for s in p {
                if let Slot::Var(v) = s {
                    if !out.contains(v) {
                        out.push(*v);
                    }
                }
            }
        }
        out
    }

    pub fn to_sparql(&self) -> String {
        let slot = |s: &Slot| match s {
            Slot::Var(v) => format!("?{}", VAR_NAMES[*v]),
            Slot::Const(t) => t.to_nt(),
        };
        let mut q = String::from("SELECT ");
        if self.distinct {
            q.push_str("DISTINCT ");
        }
        match &self.projection {
            None => q.push('*'),
            Some(vars) => q.push_str(&vars.iter().map(|v| format!("?{}", VAR_NAMES[*v])).collect::<Vec<_>>().join(" ")),
        }
        q.push_str(" WHERE {\n");
        for p in &self.patterns {
            q.push_str(&format!("  {} {} {} .\n", slot(&p[0]), slot(&p[1]), slot(&p[2])));
        }
        if let Some(f) = &self.filter {
            q.push_str(&format!("  FILTER(?{} {} {})\n", VAR_NAMES[f.left], f.op.symbol(), slot(&f.right)));
        }
        q.push('}');
        q
    }
}

pub fn random_query(rng: &mut impl Rng) -> TestQuery {
    let literals = literal_pool();
    let n = rng.random_range(1..=3);
    let mut patterns = Vec::new();
    for _ in 0..n {
        let var = |rng: &mut dyn rand::RngCore| Slot::Var(rng.random_range(0..4));
        let subject = if rng.random_bool(0.85) { var(rng) } else { Slot::Const(node(rng.random_range(0..5))) };
        let predicate = if rng.random_bool(0.2) { var(rng) } else { Slot::Const(pred(rng.random_range(0..3))) };
        let object = match rng.random_range(0..10) {
            0..=7 => var(rng),
            8 => Slot::Const(node(rng.random_range(0..5))),
            _ => Slot::Const(literals.choose(rng).unwrap().clone()),
        };
        patterns.push([subject, predicate, object]);
    }
    let mut q = TestQuery {
        patterns,
        filter: None,
        projection: None,
        distinct: false,
    };
    let vars = q.vars();
    if vars.is_empty() {
        // SELECT * needs at least one variable.
        q.patterns[0][0] = Slot::Var(0);
    }
    let vars = q.vars();
    if rng.random_bool(0.6) {
        let op = [Op::Eq, Op::Ne, Op::Lt, Op::Le, Op::Gt, Op::Ge][rng.random_range(0..6)];
        let right = if rng.random_bool(0.3) {
            Slot::Var(*vars.choose(rng).unwrap())
        } else if rng.random_bool(0.8) {
            Slot::Const(literals.choose(rng).unwrap().clone())
        } else {
            Slot::Const(node(rng.random_range(0..5)))
        };
        q.filter = Some(TestFilter {
            left: *vars.choose(rng).unwrap(),
            op,
            right,
        });
    }
    if rng.random_bool(0.4) {
        let mut picked: Vec<usize> = vars.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
        if picked.is_empty() {
            picked.push(vars[0]);
        }
        q.projection = Some(picked);
        q.distinct = rng.random_bool(0.5);
    }
    q
}

/// Every solution row of `q` on `g`, found by trying every assignment of
/// graph terms to the query variables. Rows follow the projection order.
pub fn oracle(q: &TestQuery, g: &Graph) -> Vec<Vec<Option<Term>>> {
    let domain: Vec<Term> = g.terms().into_iter().cloned().collect();
    let vars = q.vars();
    let mut rows = Vec::new();
    let mut assignment: Vec<Option<Term>> = vec![None; 4];
    enumerate(q, g, &domain, &vars, 0, &mut assignment, &mut rows);
    let projection = q.projection.clone().unwrap_or(vars);
    let mut projected: Vec<Vec<Option<Term>>> =
        rows.into_iter().map(|r| projection.iter().map(|v| r[*v].clone()).collect()).collect();
    if q.distinct {
        let mut seen = BTreeSet::new();
        projected.retain(|r| seen.insert(r.clone()));
    }
    projected
}

fn enumerate(
    q: &TestQuery,
    g: &Graph,
    domain: &[Term],
    vars: &[usize],
    i: usize,
    assignment: &mut Vec<Option<Term>>,
    out: &mut Vec<Vec<Option<Term>>>,
) {
    if i == vars.len() {
        if satisfied(q, g, assignment) {
            out.push(assignment.clone());
        }
        return;
    }
    for t in domain {
        assignment[vars[i]] = Some(t.clone());
        enumerate(q, g, domain, vars, i + 1, assignment, out);
    }
    assignment[vars[i]] = None;
}

fn satisfied(q: &TestQuery, g: &Graph, a: &[Option<Term>]) -> bool {
    let value = |s: &Slot| match s {
        Slot::Var(v) => a[*v].clone().unwrap(),
        Slot::Const(t) => t.clone(),
    };
    for p in &q.patterns {
        let Ok(t) = Triple::new(value(&p[0]), value(&p[1]), value(&p[2])) else {
            return false;
        };
        if !g.contains(&t) {
            return false;
        }
    }
    match &q.filter {
        None => true,
        Some(f) => filter_holds(&a[f.left].clone().unwrap(), f.op, &value(&f.right)),
    }
}

enum Kind {
    Number(f64),
    Text(String),
    Other,
}

fn kind(t: &Term) -> Kind {
    match t {
        Term::Literal(l) if xsd::is_numeric(l.datatype()) => Kind::Number(l.lexical().parse().unwrap()),
        Term::Literal(l) if l.datatype() == xsd::STRING => Kind::Text(l.lexical().to_string()),
        _ => Kind::Other,
    }
}

/// Comparison semantics written out case by case: numbers by value,
/// plain strings by code point, numbers against strings are errors, any
/// other pair supports only (in)equality of the terms themselves.
fn filter_holds(a: &Term, op: Op, b: &Term) -> bool {
    use std::cmp::Ordering::*;
    let ord = match (kind(a), kind(b)) {
        (Kind::Number(x), Kind::Number(y)) => x.partial_cmp(&y),
        (Kind::Text(x), Kind::Text(y)) => Some(x.cmp(&y)),
        (Kind::Number(_), Kind::Text(_)) | (Kind::Text(_), Kind::Number(_)) => return false,
        _ => {
            // Same-language tagged strings and booleans order too.
            match (a, b) {
                (Term::Literal(x), Term::Literal(y))
                    if x.language().is_some() && x.language() == y.language() =>
                {
                    Some(x.lexical().cmp(y.lexical()))
                }
                (Term::Literal(x), Term::Literal(y))
                    if x.datatype() == xsd::BOOLEAN && y.datatype() == xsd::BOOLEAN =>
                {
                    Some((x.lexical() == "true").cmp(&(y.lexical() == "true")))
                }
                _ => {
                    return match op {
                        Op::Eq => a == b,
                        Op::Ne => a != b,
                        _ => false,
                    }
                }
            }
        }
    };
    let Some(ord) = ord else { return false };
    match op {
        Op::Eq => ord == Equal,
        Op::Ne => ord != Equal,
        Op::Lt => ord == Less,
        Op::Le => ord != Greater,
        Op::Gt => ord == Greater,
        Op::Ge => ord != Less,
    }
}

/// A random ontology: classes and properties in a schema namespace, typed
/// individuals with assertions in a separate data namespace, optional
/// comments, restriction blank nodes and an ontology header.
pub fn random_schema_data_graph(rng: &mut impl Rng) -> Graph {
    let s = "http://schema.example/";
    let d = "http://data.example/";
    let mut g = Graph::new();
    g.set_prefix("s", s);
    g.set_prefix("d", d);
    g.set_prefix("owl", owl::NS);
    g.set_prefix("rdfs", rdfs::NS);
    let add = |g: &mut Graph, a: Term, b: &str, c: Term| {
        g.insert(Triple::new(a, Term::iri(b), c).unwrap());
    };
    let classes = rng.random_range(0..5);
    let props = rng.random_range(0..4);
    let individuals = rng.random_range(0..8);
    let class = |i: usize| Term::iri(format!("{s}C{i}"));
    let prop = |i: usize| Term::iri(format!("{s}p{i}"));
    let ind = |i: usize| Term::iri(format!("{d}i{i}"));
    if rng.random_bool(0.5) {
        add(&mut g, Term::iri("http://schema.example/onto"), rdf::TYPE, Term::iri(owl::ONTOLOGY));
    }
    for c in 0..classes {
        add(&mut g, class(c), rdf::TYPE, Term::iri(owl::CLASS));
        if rng.random_bool(0.6) {
            add(&mut g, class(c), rdfs::COMMENT, Term::literal(Literal::simple(format!("class {c}"))));
        }
        if c > 0 && rng.random_bool(0.4) {
            add(&mut g, class(c), rdfs::SUB_CLASS_OF, class(rng.random_range(0..c)));
        }
        if rng.random_bool(0.2) {
            let r = Term::blank(format!("r{c}"));
            add(&mut g, class(c), rdfs::SUB_CLASS_OF, r.clone());
            add(&mut g, r, "http://www.w3.org/2002/07/owl#onProperty", prop(0));
        }
    }
    for p in 0..props {
        let kind = if rng.random_bool(0.5) { owl::OBJECT_PROPERTY } else { owl::DATATYPE_PROPERTY };
        add(&mut g, prop(p), rdf::TYPE, Term::iri(kind));
        if classes > 0 && rng.random_bool(0.5) {
            add(&mut g, prop(p), rdfs::DOMAIN, class(rng.random_range(0..classes)));
        }
        if rng.random_bool(0.5) {
            add(&mut g, prop(p), rdfs::COMMENT, Term::literal(Literal::simple(format!("prop {p}"))));
        }
    }
    for i in 0..individuals {
        if classes > 0 {
            add(&mut g, ind(i), rdf::TYPE, class(rng.random_range(0..classes)));
        }
        if props > 0 && individuals > 1 {
            let object = if rng.random_bool(0.5) {
                ind(rng.random_range(0..individuals))
            } else {
                Term::literal(Literal::integer(rng.random_range(0..100)))
            };
            add(&mut g, ind(i), &format!("{s}p{}", rng.random_range(0..props)), object);
        }
        if rng.random_bool(0.3) {
            add(&mut g, ind(i), rdfs::LABEL, Term::literal(Literal::simple(format!("Item {i}"))));
        }
    }
    g
}
