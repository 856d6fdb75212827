use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::sparql::{parse_query, Query};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Odp {
    VDI3682,
    DINEN61360,
    VDI2206,
}

impl Odp {
    pub const ALL: [Odp; 3] = [Odp::VDI3682, Odp::DINEN61360, Odp::VDI2206];

    /// Fixture file name under the fixtures directory.
    pub fn fixture_file(self) -> &'static str {
        match self {
            Odp::VDI3682 => "vdi3682.ttl",
            Odp::DINEN61360 => "dinen61360.ttl",
            Odp::VDI2206 => "vdi2206.ttl",
        }
    }

    /// Ontology id used by the chat service (the fixture file stem).
    pub fn id(self) -> &'static str {
        match self {
            Odp::VDI3682 => "vdi3682",
            Odp::DINEN61360 => "dinen61360",
            Odp::VDI2206 => "vdi2206",
        }
    }

    pub fn from_id(id: &str) -> Option<Odp> {
        Odp::ALL.into_iter().find(|o| o.id() == id)
    }
}

impl fmt::Display for Odp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Odp::VDI3682 => "VDI 3682",
            Odp::DINEN61360 => "DIN EN 61360",
            Odp::VDI2206 => "VDI 2206",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Boolean,
    Count,
    Rank,
    Simple,
    String,
    TwoHop,
    TwoIntent,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Boolean,
        Category::Count,
        Category::Rank,
        Category::Simple,
        Category::String,
        Category::TwoHop,
        Category::TwoIntent,
    ];

    pub fn query_count(self) -> usize {
        if self == Category::TwoIntent {
            2
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phrasing {
    SCQ,
    NSCQ,
}

impl Phrasing {
    pub const ALL: [Phrasing; 2] = [Phrasing::SCQ, Phrasing::NSCQ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub id: String,
    pub odp: Odp,
    pub category: Category,
    pub phrasing: Phrasing,
    pub text: String,
    pub gold_queries: Vec<String>,
}

/// One experiment condition: whether `rdfs:comment` stays in the prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Condition {
    pub comments: bool,
}

impl Condition {
    pub const BOTH: [Condition; 2] = [Condition { comments: false }, Condition { comments: true }];
}

#[derive(Debug, Clone)]
pub struct ExperimentMatrix {
    pub conditions: Vec<Condition>,
    /// Sorted by (odp, category, phrasing).
    pub corpus: Vec<QuestionRecord>,
    /// Parsed gold queries, parallel to `corpus`.
    pub gold: Vec<Vec<Query>>,
}

impl ExperimentMatrix {
    /// Every (record index, condition) pair in run order.
    pub fn runs(&self) -> Vec<(usize, Condition)> {
        (0..self.corpus.len())
            .flat_map(|i| self.conditions.iter().map(move |c| (i, *c)))
            .collect()
    }

    pub fn run_count(&self) -> usize {
        self.corpus.len() * self.conditions.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusViolation {
    pub record_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("corpus invalid: {}", summary(.violations))]
pub struct CorpusInvalid {
    pub violations: Vec<CorpusViolation>,
}

fn summary(violations: &[CorpusViolation]) -> String {
    violations
        .iter()
        .map(|v| format!("{}: {}", v.record_id, v.reason))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Checks corpus shape, gold queries and phrasing against each ODP's
/// vocabulary (local names of its classes and properties).
pub fn validate_corpus(
    records: Vec<QuestionRecord>,
    vocabulary: &BTreeMap<Odp, BTreeSet<String>>,
) -> Result<ExperimentMatrix, CorpusInvalid> {
    let mut violations = Vec::new();
    let mut flag = |id: &str, reason: String| {
        violations.push(CorpusViolation {
            record_id: id.to_string(),
            reason,
        })
    };

    let mut ids = BTreeSet::new();
    let mut cells: BTreeMap<(Odp, Category, Phrasing), usize> = BTreeMap::new();
    let mut gold = Vec::with_capacity(records.len());
    for r in &records {
        if !ids.insert(r.id.as_str()) {
            flag(&r.id, String::from("duplicate id"));
        }
        if r.text.trim().is_empty() {
            flag(&r.id, String::from("empty question text"));
        }
        *cells.entry((r.odp, r.category, r.phrasing)).or_default() += 1;

        let expected = r.category.query_count();
        if r.gold_queries.len() != expected {
            flag(
                &r.id,
                format!("{:?} needs {expected} gold queries, found {}", r.category, r.gold_queries.len()),
            );
        }
        let mut parsed = Vec::new();
        for (i, q) in r.gold_queries.iter().enumerate() {
            match parse_query(q) {
                Ok(q) => parsed.push(q),
                Err(e) => flag(&r.id, format!("gold query {} does not parse: {e}", i + 1)),
            }
        }
        gold.push(parsed);

        let terms = vocabulary.get(&r.odp);
        match (r.phrasing, terms) {
            (_, None) => flag(&r.id, format!("no vocabulary loaded for {}", r.odp)),
            (Phrasing::NSCQ, Some(terms)) => {
                for t in terms.iter().filter(|t| contains_word(&r.text, t)) {
                    flag(&r.id, format!("NSCQ uses vocabulary term \"{t}\""));
                }
            }
            (Phrasing::SCQ, Some(terms)) => {
                if !terms.iter().any(|t| mentions_term(&r.text, t)) {
                    flag(&r.id, format!("SCQ mentions no {} vocabulary term", r.odp));
                }
            }
        }
    }

    for odp in Odp::ALL {
        for category in Category::ALL {
            for phrasing in Phrasing::ALL {
                let cell = format!("{}/{:?}/{:?}", odp.id(), category, phrasing);
                match cells.get(&(odp, category, phrasing)).copied().unwrap_or(0) {
                    1 => {}
                    0 => flag(&cell, String::from("missing record")),
                    n => flag(&cell, format!("{n} records, expected 1")),
                }
            }
        }
    }

    if !violations.is_empty() {
        return Err(CorpusInvalid { violations });
    }
    let mut paired: Vec<(QuestionRecord, Vec<Query>)> = records.into_iter().zip(gold).collect();
    paired.sort_by_key(|(r, _)| (r.odp, r.category, r.phrasing));
    let (corpus, gold) = paired.into_iter().unzip();
    Ok(ExperimentMatrix {
        conditions: Condition::BOTH.to_vec(),
        corpus,
        gold,
    })
}

/// Case-sensitive whole-word occurrence.
fn contains_word(text: &str, word: &str) -> bool {
    if word.is_empty() {
        return false;
    }
    text.match_indices(word).any(|(i, _)| {
        let before = text[..i].chars().next_back();
        let after = text[i + word.len()..].chars().next();
        !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
    })
}

/// Case-insensitive mention of a term, either verbatim or split at its
/// camel-case humps ("TechnicalResource" as "technical resource").
fn mentions_term(text: &str, term: &str) -> bool {
    let text = text.to_lowercase();
    text.contains(&term.to_lowercase()) || text.contains(&split_camel(term))
}

fn split_camel(term: &str) -> String {
    let mut out = String::new();
    for (i, c) in term.chars().enumerate() {
        if c.is_uppercase() && i > 0 {
            out.push(' ');
        }
        out.extend(c.to_lowercase());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn word_matching() {
        assert!(contains_word("a ProcessOperator here", "ProcessOperator"));
        assert!(!contains_word("a ProcessOperators here", "ProcessOperator"));
        assert!(!contains_word("the process", "Process"));
        assert!(contains_word("(Process)", "Process"));
        assert!(mentions_term("How many technical resources?", "TechnicalResource"));
        assert!(!mentions_term("How many machines?", "TechnicalResource"));
        assert_eq!(split_camel("isComposedOf"), "is composed of");
    }

    fn vocab() -> BTreeMap<Odp, BTreeSet<String>> {
        let terms: BTreeSet<String> = ["Process", "ProcessOperator", "TechnicalResource"]
            .iter()
            .map(|s| String::from(*s))
            .collect();
        Odp::ALL.iter().map(|o| (*o, terms.clone())).collect()
    }

    fn full_corpus() -> Vec<QuestionRecord> {
        let mut out = Vec::new();
        for odp in Odp::ALL {
            for category in Category::ALL {
                for phrasing in Phrasing::ALL {
                    let text = match phrasing {
                        Phrasing::SCQ => "Which Process is it?",
                        Phrasing::NSCQ => "Which job is it?",
                    };
                    out.push(QuestionRecord {
                        id: format!("{}-{:?}-{:?}", odp.id(), category, phrasing),
                        odp,
                        category,
                        phrasing,
                        text: String::from(text),
                        gold_queries: vec![String::from("ASK { ?s ?p ?o }"); category.query_count()],
                    });
                }
            }
        }
        out
    }

    #[test]
    fn full_corpus_shape() {
        let mut records = full_corpus();
        records.reverse();
        let m = validate_corpus(records, &vocab()).unwrap();
        assert_eq!(m.corpus.len(), 42);
        assert_eq!(m.run_count(), 84);
        assert_eq!(m.corpus[0].id, "vdi3682-Boolean-SCQ");
        assert_eq!(m.runs()[1], (0, Condition { comments: true }));
    }

    #[test]
    fn violations_are_itemized() {
        let mut records = full_corpus();
        records.retain(|r| r.id != "dinen61360-Rank-SCQ");
        records[1].text = String::from("Which ProcessOperator runs?");
        records[2].gold_queries = vec![String::from("SELECT ?x WHERE { ?x ?p/?q ?o }")];
        let err = validate_corpus(records, &vocab()).unwrap_err();
        let reasons: Vec<_> = err.violations.iter().map(|v| (v.record_id.as_str(), v.reason.as_str())).collect();
        assert!(reasons.contains(&("vdi3682-Boolean-NSCQ", "NSCQ uses vocabulary term \"ProcessOperator\"")));
        assert!(reasons.iter().any(|(id, r)| *id == "vdi3682-Count-SCQ" && r.contains("property path")));
        assert!(reasons.contains(&("dinen61360/Rank/SCQ", "missing record")));
        assert_eq!(err.violations.len(), 3);
    }
}
