//! Chat sessions: question in, traced answer out.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use ontochat_core::gateway::{translate, CompletionRequest, PrivacyGuard, Provider, ProviderError, TranslateError, TranslateRequest, TranslationResult};
use ontochat_core::partition::CommentPolicy;
use ontochat_core::pipeline::PreparedOntology;
use ontochat_core::sparql::{evaluate, parse_query, ResultSet};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::config::EndpointMode;
use crate::remote::execute_remote;
use crate::results_json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnswerStatus {
    Answered,
    EmptyResult,
    TranslationFailed,
    ExecutionFailed,
}

/// One question with everything needed to retrace its answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerRecord {
    pub question: String,
    pub status: AnswerStatus,
    pub generated_query: Option<String>,
    pub translation: TranslationResult,
    /// `application/sparql-results+json` document.
    pub results: Option<Value>,
    pub row_count: Option<usize>,
    pub execution_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub ontology_id: String,
    pub comment_policy: CommentPolicy,
    pub created_at: String,
    pub history: Vec<AnswerRecord>,
}

#[derive(Debug, Error)]
pub enum AskError {
    #[error("the question is empty")]
    EmptyQuestion,
    #[error("provider error: {detail}")]
    Provider {
        detail: String,
        translation: Box<TranslationResult>,
    },
}

/// Runs the pipeline for one question: TBox prompt, translation, execution.
/// Domain failures end up in the record's status.
pub fn answer_question(
    ontology: &PreparedOntology,
    policy: CommentPolicy,
    question: &str,
    provider: &dyn Provider,
    endpoint: &EndpointMode,
    max_attempts: usize,
) -> Result<AnswerRecord, AskError> {
    if question.trim().is_empty() {
        return Err(AskError::EmptyQuestion);
    }
    let context = ontology.context(policy);
    let guard = PrivacyGuard::new(provider, ontology.privacy_needles().iter().cloned());
    let request = TranslateRequest {
        question_id: None,
        question,
        tbox_text: &context.tbox_text,
        prefixes: &context.prefixes,
        max_attempts,
        expected_queries: Some(1),
    };
    let translation = match translate(&request, &guard) {
        Ok(t) => t,
        Err(TranslateError::TranslationFailed { result }) => {
            return Ok(AnswerRecord {
                question: question.to_owned(),
                status: AnswerStatus::TranslationFailed,
                generated_query: result.attempts.last().and_then(|a| a.extracted_query.clone()),
                translation: *result,
                results: None,
                row_count: None,
                execution_error: None,
            })
        }
        Err(TranslateError::Provider { detail, result }) => {
            return Err(AskError::Provider {
                detail,
                translation: result,
            })
        }
        Err(TranslateError::EmptyQuestion) => return Err(AskError::EmptyQuestion),
    };
    let query = translation.final_query.clone().unwrap_or_default();
    let mut record = AnswerRecord {
        question: question.to_owned(),
        status: AnswerStatus::Answered,
        generated_query: Some(query.clone()),
        translation,
        results: None,
        row_count: None,
        execution_error: None,
    };
    match execute(&query, ontology, endpoint) {
        Ok(rs) => {
            if let ResultSet::Solutions { rows, .. } = &rs {
                record.row_count = Some(rows.len());
                if rows.is_empty() {
                    record.status = AnswerStatus::EmptyResult;
                }
            }
            record.results = Some(results_json::encode(&rs));
        }
        Err(e) => {
            record.status = AnswerStatus::ExecutionFailed;
            record.execution_error = Some(e);
        }
    }
    Ok(record)
}

fn execute(query: &str, ontology: &PreparedOntology, endpoint: &EndpointMode) -> Result<ResultSet, String> {
    match endpoint {
        EndpointMode::Embedded => {
            let parsed = parse_query(query).map_err(|e| e.to_string())?;
            Ok(evaluate(&parsed, ontology.abox()))
        }
        EndpointMode::Remote { url, timeout_secs } => {
            execute_remote(url, query, Duration::from_secs(*timeout_secs)).map_err(|e| e.to_string())
        }
    }
}

/// Limits how many provider calls run at once.
pub struct Capped<P> {
    inner: P,
    limit: usize,
    active: Mutex<usize>,
    freed: Condvar,
}

impl<P> Capped<P> {
    pub fn new(inner: P, limit: usize) -> Self {
        Capped {
            inner,
            limit: limit.max(1),
            active: Mutex::new(0),
            freed: Condvar::new(),
        }
    }
}

impl<P: Provider> Provider for Capped<P> {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        {
            let mut active = self.active.lock().unwrap_or_else(|e| e.into_inner());
            while *active >= self.limit {
                active = self.freed.wait(active).unwrap_or_else(|e| e.into_inner());
            }
            *active += 1;
        }
        let result = self.inner.complete(request);
        *self.active.lock().unwrap_or_else(|e| e.into_inner()) -= 1;
        self.freed.notify_one();
        result
    }
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("unknown ontology {0}")]
    UnknownOntology(String),
    #[error("the question is empty")]
    EmptyQuestion,
    #[error("provider error: {0}")]
    Provider(String),
    #[error("session log {path}: {source}")]
    Persistence {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("session log {path} line {line}: {detail}")]
    CorruptLog { path: PathBuf, line: usize, detail: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OntologySummary {
    pub id: String,
    pub class_count: usize,
    pub individual_count: usize,
    pub has_comments: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
enum LogEntry {
    Session {
        id: String,
        ontology_id: String,
        comment_policy: CommentPolicy,
        created_at: String,
    },
    Answer {
        session_id: String,
        record: AnswerRecord,
    },
}

pub struct ServiceOptions {
    pub endpoint: EndpointMode,
    pub max_attempts: usize,
    pub provider_concurrency: usize,
    pub sessions_file: Option<PathBuf>,
}

struct Log {
    path: PathBuf,
    file: File,
}

/// Shared state behind the HTTP API. Ontologies are immutable; sessions
/// are only ever appended to.
pub struct ChatService {
    ontologies: BTreeMap<String, PreparedOntology>,
    provider: Capped<Box<dyn Provider>>,
    endpoint: EndpointMode,
    max_attempts: usize,
    sessions: Mutex<BTreeMap<String, Session>>,
    log: Option<Mutex<Log>>,
}

impl ChatService {
    pub fn new(
        ontologies: BTreeMap<String, PreparedOntology>,
        provider: Box<dyn Provider>,
        options: ServiceOptions,
    ) -> Result<Self, ServiceError> {
        let mut sessions = BTreeMap::new();
        let log = match options.sessions_file {
            Some(path) => {
                restore(&path, &ontologies, &mut sessions)?;
                let file = OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(&path)
                    .map_err(|source| ServiceError::Persistence {
                        path: path.clone(),
                        source,
                    })?;
                Some(Mutex::new(Log { path, file }))
            }
            None => None,
        };
        Ok(ChatService {
            ontologies,
            provider: Capped::new(provider, options.provider_concurrency),
            endpoint: options.endpoint,
            max_attempts: options.max_attempts,
            sessions: Mutex::new(sessions),
            log,
        })
    }

    pub fn ontologies(&self) -> Vec<OntologySummary> {
        self.ontologies
            .values()
            .map(|o| OntologySummary {
                id: o.id.clone(),
                class_count: o.class_count(),
                individual_count: o.individuals().len(),
                has_comments: o.has_comments(),
            })
            .collect()
    }

    pub fn ontology(&self, id: &str) -> Option<&PreparedOntology> {
        self.ontologies.get(id)
    }

    pub fn create_session(&self, ontology_id: &str, comments: bool) -> Result<Session, ServiceError> {
        if !self.ontologies.contains_key(ontology_id) {
            return Err(ServiceError::UnknownOntology(ontology_id.to_owned()));
        }
        let created_at = time::OffsetDateTime::now_utc()
            .format(&time::format_description::well_known::Rfc3339)
            .unwrap_or_default();
        let session = Session {
            id: uuid::Uuid::new_v4().to_string(),
            ontology_id: ontology_id.to_owned(),
            comment_policy: CommentPolicy::from_comments(comments),
            created_at,
            history: Vec::new(),
        };
        let mut sessions = self.lock_sessions();
        self.append_log(&LogEntry::Session {
            id: session.id.clone(),
            ontology_id: session.ontology_id.clone(),
            comment_policy: session.comment_policy,
            created_at: session.created_at.clone(),
        })?;
        sessions.insert(session.id.clone(), session.clone());
        Ok(session)
    }

    pub fn ask(&self, session_id: &str, question: &str) -> Result<AnswerRecord, ServiceError> {
        let (ontology_id, policy) = {
            let sessions = self.lock_sessions();
            let s = sessions
                .get(session_id)
                .ok_or_else(|| ServiceError::UnknownSession(session_id.to_owned()))?;
            (s.ontology_id.clone(), s.comment_policy)
        };
        let ontology = &self.ontologies[&ontology_id];
        let record = answer_question(ontology, policy, question, &self.provider, &self.endpoint, self.max_attempts)
            .map_err(|e| match e {
                AskError::EmptyQuestion => ServiceError::EmptyQuestion,
                AskError::Provider { detail, .. } => ServiceError::Provider(detail),
            })?;
        let mut sessions = self.lock_sessions();
        self.append_log(&LogEntry::Answer {
            session_id: session_id.to_owned(),
            record: record.clone(),
        })?;
        if let Some(s) = sessions.get_mut(session_id) {
            s.history.push(record.clone());
        }
        Ok(record)
    }

    pub fn session(&self, session_id: &str) -> Result<Session, ServiceError> {
        self.lock_sessions()
            .get(session_id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(session_id.to_owned()))
    }

    pub fn history(&self, session_id: &str) -> Result<Vec<AnswerRecord>, ServiceError> {
        self.session(session_id).map(|s| s.history)
    }

    fn lock_sessions(&self) -> std::sync::MutexGuard<'_, BTreeMap<String, Session>> {
        self.sessions.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn append_log(&self, entry: &LogEntry) -> Result<(), ServiceError> {
        let Some(log) = &self.log else {
            return Ok(());
        };
        let mut log = log.lock().unwrap_or_else(|e| e.into_inner());
        let mut line = serde_json::to_string(entry).expect("log entry serializes");
        line.push('\n');
        let Log { path, file } = &mut *log;
        file.write_all(line.as_bytes())
            .and_then(|()| file.flush())
            .map_err(|source| ServiceError::Persistence {
                path: path.clone(),
                source,
            })
    }
}

fn restore(
    path: &Path,
    ontologies: &BTreeMap<String, PreparedOntology>,
    sessions: &mut BTreeMap<String, Session>,
) -> Result<(), ServiceError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(()),
        Err(source) => {
            return Err(ServiceError::Persistence {
                path: path.to_path_buf(),
                source,
            })
        }
    };
    let corrupt = |line: usize, detail: String| ServiceError::CorruptLog {
        path: path.to_path_buf(),
        line,
        detail,
    };
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| ServiceError::Persistence {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: LogEntry = serde_json::from_str(&line).map_err(|e| corrupt(i + 1, e.to_string()))?;
        match entry {
            LogEntry::Session {
                id,
                ontology_id,
                comment_policy,
                created_at,
            } => {
                if !ontologies.contains_key(&ontology_id) {
                    return Err(corrupt(i + 1, format!("unknown ontology {ontology_id}")));
                }
                sessions.insert(
                    id.clone(),
                    Session {
                        id,
                        ontology_id,
                        comment_policy,
                        created_at,
                        history: Vec::new(),
                    },
                );
            }
            LogEntry::Answer { session_id, record } => match sessions.get_mut(&session_id) {
                Some(s) => s.history.push(record),
                None => return Err(corrupt(i + 1, format!("answer for unknown session {session_id}"))),
            },
        }
    }
    Ok(())
}
