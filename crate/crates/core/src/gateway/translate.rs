use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::extract::extract_queries;
use super::prompt::{assemble_prompt, PromptOptions, RepairNote, TEMPLATE_VERSION};
use super::provider::{CompletionRequest, Provider};
use crate::sparql::parse_query;

pub const DEFAULT_MAX_ATTEMPTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    pub prompt_bytes_hash: String,
    pub raw_response: String,
    /// First query taken from the response.
    pub extracted_query: Option<String>,
    /// Further queries taken from the response (multi-intent questions).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_queries: Vec<String>,
    /// Code blocks present in the response but not used.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ignored_blocks: Vec<String>,
    pub parse_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationResult {
    pub template_version: String,
    pub attempts: Vec<Attempt>,
    pub final_query: Option<String>,
    /// All accepted queries; `final_query` is the first.
    pub final_queries: Vec<String>,
    pub succeeded: bool,
}

impl TranslationResult {
    fn new() -> Self {
        TranslationResult {
            template_version: String::from(TEMPLATE_VERSION),
            attempts: Vec::new(),
            final_query: None,
            final_queries: Vec::new(),
            succeeded: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("the question is empty")]
    EmptyQuestion,
    #[error("provider error: {detail}")]
    Provider {
        detail: String,
        result: Box<TranslationResult>,
    },
    #[error("no parseable query after {} attempt(s)", result.attempts.len())]
    TranslationFailed { result: Box<TranslationResult> },
}

impl TranslateError {
    /// The attempt trail collected before the failure.
    pub fn result(&self) -> Option<&TranslationResult> {
        match self {
            TranslateError::EmptyQuestion => None,
            TranslateError::Provider { result, .. } | TranslateError::TranslationFailed { result } => Some(result),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TranslateRequest<'a> {
    pub question_id: Option<&'a str>,
    pub question: &'a str,
    pub tbox_text: &'a str,
    pub prefixes: &'a BTreeMap<String, String>,
    pub max_attempts: usize,
    /// Number of queries the answer must contain; `None` accepts every
    /// code block in the response.
    pub expected_queries: Option<usize>,
}

/// Asks the provider for a query and feeds parse errors back until a
/// response parses or the attempt budget is spent.
pub fn translate(request: &TranslateRequest<'_>, provider: &dyn Provider) -> Result<TranslationResult, TranslateError> {
    let mut result = TranslationResult::new();
    let mut options = PromptOptions {
        prefixes: request.prefixes.clone(),
        repair: None,
    };
    for attempt in 1..=request.max_attempts.max(1) {
        let bundle = assemble_prompt(request.tbox_text, request.question, &options)
            .map_err(|_| TranslateError::EmptyQuestion)?;
        let rendered = bundle.render();
        let hash = super::prompt::prompt_hash(&rendered);
        let call = CompletionRequest {
            question_id: request.question_id,
            prompt: &bundle,
            rendered: &rendered,
            prompt_hash: &hash,
            attempt,
        };
        let raw = match provider.complete(&call) {
            Ok(raw) => raw,
            Err(e) => {
                return Err(TranslateError::Provider {
                    detail: e.to_string(),
                    result: Box::new(result),
                })
            }
        };

        let mut blocks = extract_queries(&raw);
        let ignored_blocks = match request.expected_queries {
            Some(n) if blocks.len() > n => blocks.split_off(n),
            _ => Vec::new(),
        };
        let parse_error = check(&blocks, request.expected_queries);
        let mut queries = blocks.into_iter();
        let record = Attempt {
            prompt_bytes_hash: hash,
            raw_response: raw.clone(),
            extracted_query: queries.next(),
            extra_queries: queries.collect(),
            ignored_blocks,
            parse_error: parse_error.as_ref().map(|(_, e)| e.clone()),
        };
        match parse_error {
            None => {
                result.final_query = record.extracted_query.clone();
                result.final_queries = record.extracted_query.iter().chain(&record.extra_queries).cloned().collect();
                result.succeeded = true;
                result.attempts.push(record);
                return Ok(result);
            }
            Some((previous_query, error)) => {
                options.repair = Some(RepairNote {
                    previous_query: previous_query.unwrap_or(raw),
                    error,
                });
                result.attempts.push(record);
            }
        }
    }
    Err(TranslateError::TranslationFailed { result: Box::new(result) })
}

/// `None` when every block parses; otherwise the offending query (if any)
/// and the message fed back to the model.
fn check(blocks: &[String], expected: Option<usize>) -> Option<(Option<String>, String)> {
    if blocks.is_empty() {
        return Some((None, String::from("no SPARQL query found in the response")));
    }
    if let Some(n) = expected {
        if blocks.len() < n {
            return Some((
                Some(blocks.join("\n\n")),
                format!("expected {n} queries in separate fenced code blocks, found {}", blocks.len()),
            ));
        }
    }
    blocks.iter().find_map(|q| parse_query(q).err().map(|e| (Some(q.clone()), e.to_string())))
}
