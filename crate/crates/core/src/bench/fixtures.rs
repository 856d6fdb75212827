use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::corpus::{Category, Odp, QuestionRecord};
use crate::partition::partition;
use crate::rdf::{Graph, Term};
use crate::sparql::{evaluate, Query, ResultSet};
use crate::vocab::{local_name, rdfs};

/// Smallest and largest acceptable ABox, in triples.
const ABOX_RANGE: (usize, usize) = (15, 40);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixtureDiagnostic {
    MissingClass(&'static str),
    MissingProperty(&'static str),
    MissingAxiom(String),
    /// A schema entity without exactly one `rdfs:comment`.
    CommentCount { iri: String, count: usize },
    EmptyTBox,
    AboxSize(usize),
    EmptyGoldAnswer { record_id: String, query: usize },
    NonDiscriminativeRank { record_id: String, distinct: usize },
}

impl fmt::Display for FixtureDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureDiagnostic::MissingClass(c) => write!(f, "missing class {c}"),
            FixtureDiagnostic::MissingProperty(p) => write!(f, "missing property {p}"),
            FixtureDiagnostic::MissingAxiom(a) => write!(f, "missing axiom {a}"),
            FixtureDiagnostic::CommentCount { iri, count } => {
                write!(f, "{iri} has {count} rdfs:comment annotations, expected 1")
            }
            FixtureDiagnostic::EmptyTBox => f.write_str("empty TBox"),
            FixtureDiagnostic::AboxSize(n) => {
                write!(f, "ABox has {n} triples, expected {}..={}", ABOX_RANGE.0, ABOX_RANGE.1)
            }
            FixtureDiagnostic::EmptyGoldAnswer { record_id, query } => {
                write!(f, "{record_id}: gold query {query} has an empty or false answer")
            }
            FixtureDiagnostic::NonDiscriminativeRank { record_id, distinct } => {
                write!(f, "{record_id}: non-discriminative Rank fixture ({distinct} distinct values, need 3)")
            }
        }
    }
}

struct Requirements {
    classes: &'static [&'static str],
    /// (property, domain, range); empty domain or range is unconstrained.
    properties: &'static [(&'static str, &'static str, &'static str)],
    subclasses: &'static [(&'static str, &'static str)],
}

fn requirements(odp: Odp) -> Requirements {
    match odp {
        Odp::VDI3682 => Requirements {
            classes: &["Process", "ProcessOperator", "TechnicalResource"],
            properties: &[
                ("isComposedOf", "Process", "ProcessOperator"),
                ("isAssignedTo", "ProcessOperator", "TechnicalResource"),
            ],
            subclasses: &[],
        },
        Odp::DINEN61360 => Requirements {
            classes: &["DataElement"],
            properties: &[("name", "DataElement", ""), ("value", "", "")],
            subclasses: &[],
        },
        Odp::VDI2206 => Requirements {
            classes: &["System", "Module", "Component", "Sensor"],
            properties: &[("consistsOf", "", ""), ("isPartOf", "", "")],
            subclasses: &[("Sensor", "Component")],
        },
    }
}

/// Checks one fixture ontology against the structural rules and the gold
/// answers of its questions. `questions` pairs records with parsed gold
/// queries; records of other ODPs are ignored.
pub fn validate_fixture(odp: Odp, graph: &Graph, questions: &[(&QuestionRecord, &[Query])]) -> Vec<FixtureDiagnostic> {
    let mut out = Vec::new();
    let parts = partition(graph);
    if parts.tbox.is_empty() {
        out.push(FixtureDiagnostic::EmptyTBox);
    }
    let abox_len = parts.abox.len();
    if !(ABOX_RANGE.0..=ABOX_RANGE.1).contains(&abox_len) {
        out.push(FixtureDiagnostic::AboxSize(abox_len));
    }

    let classes: BTreeSet<&str> = parts.classes().into_iter().map(local_name).collect();
    let properties: BTreeSet<&str> = parts.properties().into_iter().map(local_name).collect();
    let has = |subject: &str, predicate: &str, object: &str| {
        parts.tbox.iter().any(|t| {
            t.predicate_iri() == predicate
                && t.subject().as_iri().map(local_name) == Some(subject)
                && t.object().as_iri().map(local_name) == Some(object)
        })
    };
    let req = requirements(odp);
    for c in req.classes {
        if !classes.contains(c) {
            out.push(FixtureDiagnostic::MissingClass(c));
        }
    }
    for (p, domain, range) in req.properties {
        if !properties.contains(p) {
            out.push(FixtureDiagnostic::MissingProperty(p));
            continue;
        }
        if !domain.is_empty() && !has(p, rdfs::DOMAIN, domain) {
            out.push(FixtureDiagnostic::MissingAxiom(alloc::format!("{p} rdfs:domain {domain}")));
        }
        if !range.is_empty() && !has(p, rdfs::RANGE, range) {
            out.push(FixtureDiagnostic::MissingAxiom(alloc::format!("{p} rdfs:range {range}")));
        }
    }
    for (sub, sup) in req.subclasses {
        if !has(sub, rdfs::SUB_CLASS_OF, sup) {
            out.push(FixtureDiagnostic::MissingAxiom(alloc::format!("{sub} rdfs:subClassOf {sup}")));
        }
    }

    for entity in &parts.schema_entities {
        let subject = Term::iri(entity.as_str());
        let count = parts
            .tbox
            .iter()
            .filter(|t| t.subject() == &subject && t.predicate_iri() == rdfs::COMMENT)
            .count();
        if count != 1 {
            out.push(FixtureDiagnostic::CommentCount {
                iri: entity.clone(),
                count,
            });
        }
    }

    for (record, gold) in questions.iter().filter(|(r, _)| r.odp == odp) {
        for (i, q) in gold.iter().enumerate() {
            let rs = evaluate(q, &parts.abox);
            let empty = match &rs {
                ResultSet::Boolean(b) => !b,
                ResultSet::Solutions { rows, .. } => rows.is_empty(),
            };
            if empty {
                out.push(FixtureDiagnostic::EmptyGoldAnswer {
                    record_id: record.id.clone(),
                    query: i + 1,
                });
            }
            if record.category == Category::Rank {
                let distinct: BTreeSet<_> = rs.rows().iter().collect();
                if distinct.len() < 3 {
                    out.push(FixtureDiagnostic::NonDiscriminativeRank {
                        record_id: record.id.clone(),
                        distinct: distinct.len(),
                    });
                }
            }
        }
    }
    out
}
