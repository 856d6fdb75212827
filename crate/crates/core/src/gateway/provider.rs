use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::prompt::PromptBundle;

/// One call to a language model.
#[derive(Debug, Clone, Copy)]
pub struct CompletionRequest<'a> {
    /// Benchmark question id, when the question comes from a corpus.
    pub question_id: Option<&'a str>,
    pub prompt: &'a PromptBundle,
    /// `prompt.render()`, computed once per attempt.
    pub rendered: &'a str,
    pub prompt_hash: &'a str,
    /// 1-based attempt number within one translation.
    pub attempt: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProviderError {
    #[error("provider transport error: {0}")]
    Transport(String),
    #[error("provider rejected the request: {0}")]
    Rejected(String),
    #[error("no mock response for question {0:?}")]
    NoMockResponse(String),
    #[error("replay cassette has no response for prompt hash {0}")]
    CassetteMiss(String),
    #[error("prompt contains ABox individual {0}")]
    PrivacyViolation(String),
}

/// A language model backend. Implementations must tolerate concurrent calls.
pub trait Provider: Send + Sync {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError>;
}

impl<P: Provider + ?Sized> Provider for &P {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        (**self).complete(request)
    }
}

impl<P: Provider + ?Sized> Provider for alloc::boxed::Box<P> {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        (**self).complete(request)
    }
}

impl<P: Provider + ?Sized> Provider for alloc::sync::Arc<P> {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        (**self).complete(request)
    }
}

/// A provider backed by a closure.
pub struct FnProvider<F>(pub F);

impl<F> Provider for FnProvider<F>
where
    F: Fn(&CompletionRequest<'_>) -> Result<String, ProviderError> + Send + Sync,
{
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        (self.0)(request)
    }
}

/// Mock mapping value: one query, or one query per intent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MockResponse {
    Single(String),
    Multiple(Vec<String>),
}

/// Answers from a fixed table keyed by question id, falling back to the
/// verbatim question text. Each query is wrapped in a fenced block.
#[derive(Debug, Clone, Default)]
pub struct MockProvider {
    table: BTreeMap<String, MockResponse>,
}

impl MockProvider {
    pub fn new(table: BTreeMap<String, MockResponse>) -> Self {
        MockProvider { table }
    }
}

impl Provider for MockProvider {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        let question = request.prompt.question.as_str();
        let entry = request
            .question_id
            .and_then(|id| self.table.get(id))
            .or_else(|| self.table.get(question))
            .ok_or_else(|| ProviderError::NoMockResponse(String::from(request.question_id.unwrap_or(question))))?;
        let queries: Vec<&str> = match entry {
            MockResponse::Single(q) => alloc::vec![q.as_str()],
            MockResponse::Multiple(qs) => qs.iter().map(String::as_str).collect(),
        };
        Ok(queries
            .iter()
            .map(|q| format!("```sparql\n{}\n```\n", q.trim()))
            .collect::<Vec<_>>()
            .join("\n"))
    }
}

/// Cassette entry: a recorded response for one exact prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CassetteEntry {
    pub prompt_hash: String,
    pub response_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cassette records two different responses for prompt hash {0}")]
pub struct ConflictingEntry(pub String);

/// Replays recorded responses keyed by prompt hash. A miss is an error,
/// never a live call.
#[derive(Debug, Clone, Default)]
pub struct ReplayProvider {
    responses: BTreeMap<String, String>,
}

impl ReplayProvider {
    pub fn new(entries: impl IntoIterator<Item = CassetteEntry>) -> Result<Self, ConflictingEntry> {
        let mut responses = BTreeMap::new();
        for e in entries {
            match responses.get(&e.prompt_hash) {
                Some(existing) if *existing != e.response_text => return Err(ConflictingEntry(e.prompt_hash)),
                _ => {
                    responses.insert(e.prompt_hash, e.response_text);
                }
            }
        }
        Ok(ReplayProvider { responses })
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

impl Provider for ReplayProvider {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        self.responses
            .get(request.prompt_hash)
            .cloned()
            .ok_or_else(|| ProviderError::CassetteMiss(String::from(request.prompt_hash)))
    }
}

/// Refuses to forward any prompt containing one of the forbidden strings
/// (ABox individual IRIs and their prefixed forms).
pub struct PrivacyGuard<P> {
    inner: P,
    forbidden: Vec<String>,
}

impl<P: Provider> PrivacyGuard<P> {
    pub fn new(inner: P, forbidden: impl IntoIterator<Item = String>) -> Self {
        PrivacyGuard {
            inner,
            forbidden: forbidden.into_iter().collect(),
        }
    }
}

impl<P: Provider> Provider for PrivacyGuard<P> {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        if let Some(leak) = self.forbidden.iter().find(|f| request.rendered.contains(f.as_str())) {
            return Err(ProviderError::PrivacyViolation(leak.clone()));
        }
        self.inner.complete(request)
    }
}
