use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use regex_automata::meta::Regex;

use crate::rdf::Term;

/// Index of a variable in [`Query::variables`].
pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryForm {
    Select,
    Ask,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    /// `SELECT *`: every variable bound by a triple pattern.
    All,
    Vars(Vec<VarId>),
    /// `SELECT (COUNT([DISTINCT] ?v|*) AS ?alias)`; `var == None` is `*`.
    Count {
        var: Option<VarId>,
        distinct: bool,
        alias: VarId,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermPattern {
    Var(VarId),
    Term(Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: TermPattern,
    pub predicate: TermPattern,
    pub object: TermPattern,
}

impl TriplePattern {
    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        [&self.subject, &self.predicate, &self.object]
            .into_iter()
            .filter_map(|p| match p {
                TermPattern::Var(v) => Some(*v),
                TermPattern::Term(_) => None,
            })
    }
}

#[derive(Debug, Clone)]
pub enum PatternNode {
    Bgp(Vec<TriplePattern>),
    Filter(Expression),
    Optional(Box<PatternNode>),
    Union(Box<PatternNode>, Box<PatternNode>),
    /// A group graph pattern: children are joined left to right and the
    /// group's filters apply to the joined result.
    Join(Vec<PatternNode>),
}

impl PatternNode {
    /// Variables bound by triple patterns anywhere below this node, in
    /// first-occurrence order.
    pub fn pattern_vars(&self, out: &mut Vec<VarId>) {
        match self {
            PatternNode::Bgp(patterns) => {
                for v in patterns.iter().flat_map(TriplePattern::vars) {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            PatternNode::Filter(_) => {}
            PatternNode::Optional(inner) => inner.pattern_vars(out),
            PatternNode::Union(a, b) => {
                a.pattern_vars(out);
                b.pattern_vars(out);
            }
            PatternNode::Join(children) => {
                for c in children {
                    c.pattern_vars(out);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Str,
    Lang,
    LCase,
    UCase,
    Contains,
    StrStarts,
    StrEnds,
    IsIri,
    IsLiteral,
    IsBlank,
}

impl Builtin {
    pub fn lookup(name: &str) -> Option<(Builtin, usize)> {
        let upper = name.to_ascii_uppercase();
        Some(match upper.as_str() {
            "STR" => (Builtin::Str, 1),
            "LANG" => (Builtin::Lang, 1),
            "LCASE" => (Builtin::LCase, 1),
            "UCASE" => (Builtin::UCase, 1),
            "CONTAINS" => (Builtin::Contains, 2),
            "STRSTARTS" => (Builtin::StrStarts, 2),
            "STRENDS" => (Builtin::StrEnds, 2),
            "ISIRI" | "ISURI" => (Builtin::IsIri, 1),
            "ISLITERAL" => (Builtin::IsLiteral, 1),
            "ISBLANK" => (Builtin::IsBlank, 1),
            _ => return None,
        })
    }
}

/// Regex argument of `regex()`: compiled up front when pattern and flags are
/// constants.
#[derive(Debug, Clone)]
pub enum RegexPattern {
    Compiled(Regex),
    Invalid,
    Dynamic {
        pattern: Box<Expression>,
        flags: Option<Box<Expression>>,
    },
}

#[derive(Debug, Clone)]
pub enum Expression {
    Var(VarId),
    Constant(Term),
    Or(Box<Expression>, Box<Expression>),
    And(Box<Expression>, Box<Expression>),
    Not(Box<Expression>),
    Compare(CompareOp, Box<Expression>, Box<Expression>),
    Bound(VarId),
    Regex(Box<Expression>, RegexPattern),
    Call(Builtin, Vec<Expression>),
}

impl Expression {
    pub fn vars(&self, out: &mut Vec<VarId>) {
        match self {
            Expression::Var(v) | Expression::Bound(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Expression::Constant(_) => {}
            Expression::Or(a, b) | Expression::And(a, b) | Expression::Compare(_, a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Expression::Not(a) => a.vars(out),
            Expression::Regex(a, pattern) => {
                a.vars(out);
                if let RegexPattern::Dynamic { pattern, flags } = pattern {
                    pattern.vars(out);
                    if let Some(f) = flags {
                        f.vars(out);
                    }
                }
            }
            Expression::Call(_, args) => {
                for a in args {
                    a.vars(out);
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrderCondition {
    pub expression: Expression,
    pub descending: bool,
}

/// A parsed query in the supported SPARQL subset.
#[derive(Debug, Clone)]
pub struct Query {
    pub form: QueryForm,
    pub projection: Projection,
    pub pattern: PatternNode,
    pub distinct: bool,
    pub order_by: Vec<OrderCondition>,
    pub limit: Option<usize>,
    pub offset: Option<usize>,
    /// Variable names without sigil; indexed by [`VarId`].
    pub variables: Vec<String>,
    pub prefixes: BTreeMap<String, String>,
}

impl Query {
    pub fn var_name(&self, id: VarId) -> &str {
        &self.variables[id]
    }

    /// Output variables of a SELECT query, in projection order.
    pub fn output_vars(&self) -> Vec<VarId> {
        match &self.projection {
            Projection::All => {
                let mut vars = Vec::new();
                self.pattern.pattern_vars(&mut vars);
                vars
            }
            Projection::Vars(vars) => vars.clone(),
            Projection::Count { alias, .. } => alloc::vec![*alias],
        }
    }
}
