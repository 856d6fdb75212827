use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::results::ResultSet;
use crate::rdf::Term;

type Row = Vec<Option<Term>>;

/// Answer-level equivalence of two result sets.
///
/// Variable names are ignored: columns are matched by a bijection under
/// which the rows agree, and blank nodes by a consistent bijection within
/// one comparison. Rows compare as multisets unless `ordered` is set.
pub fn results_equal(a: &ResultSet, b: &ResultSet, ordered: bool) -> bool {
    match (a, b) {
        (ResultSet::Boolean(x), ResultSet::Boolean(y)) => x == y,
        (ResultSet::Solutions { variables: va, rows: ra }, ResultSet::Solutions { variables: vb, rows: rb }) => {
            if va.len() != vb.len() || ra.len() != rb.len() {
                return false;
            }
            let width = va.len();
            let signature = |rows: &[Row], col: usize| {
                let mut values: Vec<Option<Term>> = rows.iter().map(|r| r[col].as_ref().map(mask_blank)).collect();
                if !ordered {
                    values.sort();
                }
                values
            };
            let candidates: Vec<Vec<usize>> = (0..width)
                .map(|i| {
                    let sig = signature(ra, i);
                    (0..width).filter(|&j| signature(rb, j) == sig).collect()
                })
                .collect();
            let mut perm = Vec::with_capacity(width);
            let mut used = alloc::vec![false; width];
            search_columns(&candidates, &mut perm, &mut used, &mut |perm| {
                let permuted: Vec<Row> = rb.iter().map(|r| perm.iter().map(|&j| r[j].clone()).collect()).collect();
                rows_match(ra, &permuted, ordered)
            })
        }
        _ => false,
    }
}

fn mask_blank(t: &Term) -> Term {
    if t.is_blank() {
        Term::blank("")
    } else {
        t.clone()
    }
}

fn search_columns(
    candidates: &[Vec<usize>],
    perm: &mut Vec<usize>,
    used: &mut [bool],
    accept: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    let i = perm.len();
    if i == candidates.len() {
        return accept(perm);
    }
    for &j in &candidates[i] {
        if used[j] {
            continue;
        }
        used[j] = true;
        perm.push(j);
        if search_columns(candidates, perm, used, accept) {
            return true;
        }
        perm.pop();
        used[j] = false;
    }
    false
}

fn has_blank(rows: &[Row]) -> bool {
    rows.iter().flatten().flatten().any(Term::is_blank)
}

fn rows_match(a: &[Row], b: &[Row], ordered: bool) -> bool {
    if !has_blank(a) && !has_blank(b) {
        if ordered {
            return a == b;
        }
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        x.sort();
        y.sort();
        return x == y;
    }
    let mut bijection = Bijection::default();
    if ordered {
        return a.iter().zip(b).all(|(x, y)| bijection.unify_row(x, y));
    }
    let mut used = alloc::vec![false; b.len()];
    match_rows(a, b, &mut used, bijection)
}

fn match_rows(a: &[Row], b: &[Row], used: &mut [bool], bijection: Bijection) -> bool {
    let Some((first, rest)) = a.split_first() else {
        return true;
    };
    for (j, candidate) in b.iter().enumerate() {
        if used[j] {
            continue;
        }
        let mut attempt = bijection.clone();
        if attempt.unify_row(first, candidate) {
            used[j] = true;
            if match_rows(rest, b, used, attempt) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}

#[derive(Clone, Default)]
struct Bijection {
    forward: BTreeMap<Term, Term>,
    backward: BTreeMap<Term, Term>,
}

impl Bijection {
    fn unify_row(&mut self, a: &Row, b: &Row) -> bool {
        a.iter().zip(b).all(|(x, y)| match (x, y) {
            (None, None) => true,
            (Some(x), Some(y)) => self.unify(x, y),
            _ => false,
        })
    }

    fn unify(&mut self, x: &Term, y: &Term) -> bool {
        if !x.is_blank() || !y.is_blank() {
            return x == y;
        }
        match (self.forward.get(x), self.backward.get(y)) {
            (Some(fx), Some(by)) => fx == y && by == x,
            (None, None) => {
                self.forward.insert(x.clone(), y.clone());
                self.backward.insert(y.clone(), x.clone());
                true
            }
            _ => false,
        }
    }
}
