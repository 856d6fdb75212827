//! Per-ontology prompt state and the single benchmark run.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::bench::{score_run, Condition, FailureKind, QuestionRecord, RunOutcome};
use crate::gateway::{translate, PrivacyGuard, Provider, TranslateError, TranslateRequest};
use crate::partition::{apply_comment_policy, partition, render_prompt_tbox, CommentPolicy, PartitionedOntology};
use crate::rdf::Graph;
use crate::sparql::Query;
use crate::vocab::{local_name, rdfs};

/// What the model sees of an ontology under one comment policy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptContext {
    pub tbox_text: String,
    pub prefixes: BTreeMap<String, String>,
}

/// A loaded ontology with both prompt renderings precomputed.
#[derive(Debug, Clone)]
pub struct PreparedOntology {
    pub id: String,
    pub graph: Graph,
    pub parts: PartitionedOntology,
    retained: PromptContext,
    stripped: PromptContext,
    individuals: BTreeSet<String>,
    needles: Vec<String>,
}

impl PreparedOntology {
    pub fn new(id: impl Into<String>, graph: Graph) -> Self {
        let parts = partition(&graph);
        let context = |policy| {
            let tbox = apply_comment_policy(&parts.tbox, policy);
            PromptContext {
                tbox_text: render_prompt_tbox(&tbox),
                prefixes: tbox.prefixes().clone(),
            }
        };
        let retained = context(CommentPolicy::Retain);
        let stripped = context(CommentPolicy::Strip);
        let individuals = parts.individuals();
        let needles = privacy_needles(&individuals, graph.prefixes());
        PreparedOntology {
            id: id.into(),
            graph,
            parts,
            retained,
            stripped,
            individuals,
            needles,
        }
    }

    pub fn context(&self, policy: CommentPolicy) -> &PromptContext {
        match policy {
            CommentPolicy::Retain => &self.retained,
            CommentPolicy::Strip => &self.stripped,
        }
    }

    pub fn abox(&self) -> &Graph {
        &self.parts.abox
    }

    pub fn individuals(&self) -> &BTreeSet<String> {
        &self.individuals
    }

    /// Strings that must never appear in a prompt: every individual IRI and
    /// its prefixed spellings under the source prefixes.
    pub fn privacy_needles(&self) -> &[String] {
        &self.needles
    }

    /// The first needle found in `text`.
    pub fn find_leak(&self, text: &str) -> Option<&str> {
        self.needles.iter().find(|n| text.contains(n.as_str())).map(String::as_str)
    }

    pub fn class_count(&self) -> usize {
        self.parts.classes().len()
    }

    pub fn has_comments(&self) -> bool {
        self.parts.tbox.iter().any(|t| t.predicate_iri() == rdfs::COMMENT)
    }

    /// Local names of schema classes and properties.
    pub fn vocabulary(&self) -> BTreeSet<String> {
        self.parts
            .classes()
            .into_iter()
            .chain(self.parts.properties())
            .map(|iri| local_name(iri).to_string())
            .collect()
    }
}

fn privacy_needles(individuals: &BTreeSet<String>, prefixes: &BTreeMap<String, String>) -> Vec<String> {
    let mut out = BTreeSet::new();
    for iri in individuals {
        out.insert(iri.clone());
        for (prefix, ns) in prefixes {
            if let Some(local) = iri.strip_prefix(ns.as_str()) {
                if !local.is_empty() {
                    out.insert(format!("{prefix}:{local}"));
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Translates and scores one benchmark question under one condition.
/// Prompts leaking an individual are refused before reaching the provider.
pub fn run_question(
    ontology: &PreparedOntology,
    record: &QuestionRecord,
    gold: &[Query],
    condition: Condition,
    provider: &dyn Provider,
    max_attempts: usize,
) -> RunOutcome {
    let context = ontology.context(CommentPolicy::from_comments(condition.comments));
    let guard = PrivacyGuard::new(provider, ontology.privacy_needles().iter().cloned());
    let request = TranslateRequest {
        question_id: Some(&record.id),
        question: &record.text,
        tbox_text: &context.tbox_text,
        prefixes: &context.prefixes,
        max_attempts,
        expected_queries: Some(record.category.query_count()),
    };
    let mut outcome = RunOutcome {
        question_id: record.id.clone(),
        odp: record.odp,
        category: record.category,
        phrasing: record.phrasing,
        comments: condition.comments,
        translation: None,
        provider_error: None,
        correct: false,
        failure_kind: Some(FailureKind::TranslationFailed),
    };
    match translate(&request, &guard) {
        Ok(result) => {
            let score = score_run(&result.final_queries, record, gold, ontology.abox());
            outcome.correct = score.correct;
            outcome.failure_kind = score.failure_kind;
            outcome.translation = Some(result);
        }
        Err(TranslateError::TranslationFailed { result }) => outcome.translation = Some(*result),
        Err(TranslateError::Provider { detail, result }) => {
            outcome.provider_error = Some(detail);
            outcome.translation = Some(*result);
        }
        Err(TranslateError::EmptyQuestion) => outcome.provider_error = Some(String::from("empty question")),
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{Category, Odp, Phrasing};
    use crate::gateway::{CompletionRequest, FnProvider, ProviderError};
    use crate::rdf::parse_turtle;
    use crate::sparql::parse_query;
    use alloc::vec;

    const ONTO: &str = r#"@prefix ex: <http://ex.org/schema#> .
@prefix d: <http://ex.org/data/> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
ex:Machine a owl:Class ; rdfs:comment "A machine." .
ex:speed a owl:DatatypeProperty ; rdfs:domain ex:Machine ; rdfs:comment "Speed." .
d:m1 a ex:Machine ; ex:speed 3 ; rdfs:label "Mill" .
d:m2 a ex:Machine ; ex:speed 5 .
"#;

    fn prepared() -> PreparedOntology {
        PreparedOntology::new("toy", parse_turtle(ONTO).unwrap().graph)
    }

    #[test]
    fn contexts_and_needles() {
        let p = prepared();
        assert!(p.context(CommentPolicy::Retain).tbox_text.contains("rdfs:comment"));
        assert!(!p.context(CommentPolicy::Strip).tbox_text.contains("rdfs:comment"));
        assert!(!p.context(CommentPolicy::Retain).prefixes.contains_key("d"));
        assert_eq!(p.privacy_needles(), ["d:m1", "d:m2", "http://ex.org/data/m1", "http://ex.org/data/m2"]);
        assert_eq!(p.find_leak("see d:m2"), Some("d:m2"));
        assert_eq!(p.find_leak(&p.context(CommentPolicy::Retain).tbox_text), None);
        assert_eq!(p.class_count(), 1);
        assert!(p.has_comments());
        assert_eq!(p.vocabulary().into_iter().collect::<Vec<_>>(), ["Machine", "speed"]);
    }

    #[test]
    fn run_scores_against_gold() {
        let p = prepared();
        let gold_text = "PREFIX ex: <http://ex.org/schema#> SELECT (COUNT(?m) AS ?n) WHERE { ?m a ex:Machine }";
        let record = QuestionRecord {
            id: String::from("c"),
            odp: Odp::VDI3682,
            category: Category::Count,
            phrasing: Phrasing::SCQ,
            text: String::from("How many machines?"),
            gold_queries: vec![String::from(gold_text)],
        };
        let gold = [parse_query(gold_text).unwrap()];
        let echo = FnProvider(|_: &CompletionRequest<'_>| Ok(alloc::format!("```sparql\n{gold_text}\n```")));
        let out = run_question(&p, &record, &gold, Condition { comments: true }, &echo, 3);
        assert!(out.correct, "{out:?}");

        let leaky = QuestionRecord {
            text: String::from("How fast is http://ex.org/data/m1?"),
            ..record.clone()
        };
        let out = run_question(&p, &leaky, &gold, Condition { comments: false }, &echo, 3);
        assert!(!out.correct);
        assert_eq!(out.failure_kind, Some(FailureKind::TranslationFailed));
        assert!(out.provider_error.unwrap().contains("ABox individual"));

        let down = FnProvider(|_: &CompletionRequest<'_>| Err(ProviderError::Transport(String::from("x"))));
        let out = run_question(&p, &record, &gold, Condition { comments: false }, &down, 3);
        assert_eq!(out.failure_kind, Some(FailureKind::TranslationFailed));
    }
}
