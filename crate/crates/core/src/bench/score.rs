use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::corpus::{Category, QuestionRecord};
use crate::rdf::Graph;
use crate::sparql::{evaluate, parse_query, results_equal, Query, ResultSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FailureKind {
    TranslationFailed,
    WrongAnswer,
    ExecutionError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Score {
    pub correct: bool,
    pub failure_kind: Option<FailureKind>,
}

impl Score {
    const CORRECT: Score = Score {
        correct: true,
        failure_kind: None,
    };

    pub fn failed(kind: FailureKind) -> Score {
        Score {
            correct: false,
            failure_kind: Some(kind),
        }
    }
}

/// Scores generated queries by answer equivalence with the gold queries on
/// `abox`. Row order counts only for Rank questions; the two queries of a
/// Two Intent question may come in either order.
pub fn score_run(generated: &[String], record: &QuestionRecord, gold: &[Query], abox: &Graph) -> Score {
    if generated.is_empty() {
        return Score::failed(FailureKind::TranslationFailed);
    }
    let mut parsed = Vec::with_capacity(generated.len());
    for q in generated {
        match parse_query(q) {
            Ok(q) => parsed.push(q),
            Err(_) => return Score::failed(FailureKind::TranslationFailed),
        }
    }
    if parsed.len() != gold.len() {
        return Score::failed(FailureKind::WrongAnswer);
    }
    let ordered = record.category == Category::Rank;
    let got: Vec<ResultSet> = parsed.iter().map(|q| evaluate(q, abox)).collect();
    let want: Vec<ResultSet> = gold.iter().map(|q| evaluate(q, abox)).collect();
    if matches_some_assignment(&got, &want, ordered, &mut Vec::new()) {
        Score::CORRECT
    } else {
        Score::failed(FailureKind::WrongAnswer)
    }
}

/// Whether some one-to-one assignment of `got` to `want` makes every pair equal.
fn matches_some_assignment(got: &[ResultSet], want: &[ResultSet], ordered: bool, used: &mut Vec<usize>) -> bool {
    let i = used.len();
    if i == got.len() {
        return true;
    }
    for j in 0..want.len() {
        if used.contains(&j) || !results_equal(&got[i], &want[j], ordered) {
            continue;
        }
        used.push(j);
        if matches_some_assignment(got, want, ordered, used) {
            return true;
        }
        used.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{Odp, Phrasing};
    use crate::rdf::parse_turtle;
    use alloc::string::ToString;

    const ABOX: &str = "@prefix ex: <http://ex.org/> .
        ex:a ex:v 3 ; ex:p ex:b . ex:b ex:v 1 ; ex:p ex:c . ex:c ex:v 2 .";

    fn record(category: Category, gold: &[&str]) -> (QuestionRecord, Vec<Query>) {
        let r = QuestionRecord {
            id: String::from("q"),
            odp: Odp::VDI3682,
            category,
            phrasing: Phrasing::SCQ,
            text: String::from("?"),
            gold_queries: gold.iter().map(|s| s.to_string()).collect(),
        };
        let parsed = gold.iter().map(|q| parse_query(q).unwrap()).collect();
        (r, parsed)
    }

    fn score(category: Category, gold: &[&str], generated: &[&str]) -> Score {
        let abox = parse_turtle(ABOX).unwrap().graph;
        let (r, g) = record(category, gold);
        let generated: Vec<String> = generated.iter().map(|s| s.to_string()).collect();
        score_run(&generated, &r, &g, &abox)
    }

    const ASC: &str = "PREFIX ex: <http://ex.org/> SELECT ?v WHERE { ?e ex:v ?v } ORDER BY ASC(?v)";
    const DESC: &str = "PREFIX ex: <http://ex.org/> SELECT ?x WHERE { ?e ex:v ?x } ORDER BY DESC(?x)";

    #[test]
    fn verbatim_gold_is_correct() {
        assert!(score(Category::Rank, &[ASC], &[ASC]).correct);
    }

    #[test]
    fn rank_order_matters() {
        assert_eq!(score(Category::Rank, &[ASC], &[DESC]), Score::failed(FailureKind::WrongAnswer));
        assert!(score(Category::Simple, &[ASC], &[DESC]).correct);
    }

    #[test]
    fn boolean_by_truth_value() {
        let gold = "PREFIX ex: <http://ex.org/> ASK { ex:a ex:p ex:b }";
        assert!(score(Category::Boolean, &[gold], &["ASK { ?s ?p ?o }"]).correct);
        assert!(!score(Category::Boolean, &[gold], &["ASK { ?s ?s ?s }"]).correct);
    }

    #[test]
    fn two_intents_in_either_order() {
        let q1 = "PREFIX ex: <http://ex.org/> SELECT ?o WHERE { ex:a ex:p ?o }";
        let q2 = "PREFIX ex: <http://ex.org/> SELECT ?o WHERE { ex:b ex:p ?o }";
        assert!(score(Category::TwoIntent, &[q1, q2], &[q2, q1]).correct);
        assert!(!score(Category::TwoIntent, &[q1, q2], &[q1, q1]).correct);
        assert_eq!(score(Category::TwoIntent, &[q1, q2], &[q1]), Score::failed(FailureKind::WrongAnswer));
    }

    #[test]
    fn unparseable_or_missing() {
        assert_eq!(score(Category::Simple, &[ASC], &[]), Score::failed(FailureKind::TranslationFailed));
        assert_eq!(score(Category::Simple, &[ASC], &["SELECT"]), Score::failed(FailureKind::TranslationFailed));
    }

    #[test]
    fn empty_answer_is_wrong() {
        let gen = "PREFIX ex: <http://ex.org/> SELECT ?v WHERE { ?e ex:missing ?v }";
        assert_eq!(score(Category::Simple, &[ASC], &[gen]), Score::failed(FailureKind::WrongAnswer));
    }
}
