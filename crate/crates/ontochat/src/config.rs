//! Provider and service configuration files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use ontochat_core::gateway::{CassetteEntry, MockProvider, MockResponse, Provider, ReplayProvider, DEFAULT_MAX_ATTEMPTS};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::http_chat::HttpChatProvider;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("cassette {path}: {detail}")]
    Cassette { path: PathBuf, detail: String },
    #[error("environment variable {0} holding the provider secret is not set")]
    MissingSecret(String),
}

impl ConfigError {
    /// Whether the failure is a missing or unreadable file.
    pub fn is_io(&self) -> bool {
        matches!(self, ConfigError::Io { .. })
    }
}

pub(crate) fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| ConfigError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Which LLM backend answers translation requests. Relative paths resolve
/// against the directory of the file the configuration was read from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum ProviderConfig {
    HttpChat {
        endpoint: String,
        model: String,
        /// Header carrying the secret, `Authorization` when unset.
        #[serde(default)]
        auth_header: Option<String>,
        /// Environment variable holding the secret.
        #[serde(default)]
        auth_env: Option<String>,
        /// Prepended to the secret with a space, e.g. `Bearer`.
        #[serde(default)]
        auth_scheme: Option<String>,
        #[serde(default)]
        temperature: f64,
        #[serde(default = "default_timeout_secs")]
        timeout_secs: u64,
    },
    Mock {
        mapping: PathBuf,
    },
    Replay {
        cassette: PathBuf,
    },
}

fn default_timeout_secs() -> u64 {
    60
}

impl ProviderConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let config: ProviderConfig = read_json(path)?;
        Ok(config.relative_to(path.parent().unwrap_or(Path::new("."))))
    }

    pub fn relative_to(self, base: &Path) -> Self {
        match self {
            ProviderConfig::Mock { mapping } => ProviderConfig::Mock {
                mapping: base.join(mapping),
            },
            ProviderConfig::Replay { cassette } => ProviderConfig::Replay {
                cassette: base.join(cassette),
            },
            other => other,
        }
    }

    /// Short description recorded in reports.
    pub fn describe(&self) -> String {
        let file_name = |p: &Path| p.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
        match self {
            ProviderConfig::HttpChat { model, .. } => format!("HttpChat({model})"),
            ProviderConfig::Mock { mapping } => format!("Mock({})", file_name(mapping)),
            ProviderConfig::Replay { cassette } => format!("Replay({})", file_name(cassette)),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Provider>, ConfigError> {
        Ok(match self {
            ProviderConfig::HttpChat {
                endpoint,
                model,
                auth_header,
                auth_env,
                auth_scheme,
                temperature,
                timeout_secs,
            } => {
                let auth = match auth_env {
                    Some(var) => {
                        let secret = std::env::var(var).map_err(|_| ConfigError::MissingSecret(var.clone()))?;
                        let value = match auth_scheme {
                            Some(scheme) => format!("{scheme} {secret}"),
                            None => secret,
                        };
                        let header = auth_header.clone().unwrap_or_else(|| "Authorization".into());
                        Some((header, value))
                    }
                    None => None,
                };
                Box::new(HttpChatProvider::new(
                    endpoint.clone(),
                    model.clone(),
                    *temperature,
                    auth,
                    Duration::from_secs(*timeout_secs),
                ))
            }
            ProviderConfig::Mock { mapping } => {
                let table: BTreeMap<String, MockResponse> = read_json(mapping)?;
                Box::new(MockProvider::new(table))
            }
            ProviderConfig::Replay { cassette } => {
                let entries: Vec<CassetteEntry> = read_json(cassette)?;
                let provider = ReplayProvider::new(entries).map_err(|e| ConfigError::Cassette {
                    path: cassette.clone(),
                    detail: e.to_string(),
                })?;
                Box::new(provider)
            }
        })
    }
}

/// Where generated queries run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EndpointMode {
    #[default]
    Embedded,
    Remote {
        url: String,
        #[serde(default = "default_timeout_secs")]
        timeout_secs: u64,
    },
}

/// Either an inline provider configuration or a path to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProviderRef {
    Path(PathBuf),
    Inline(ProviderConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    pub ontology_dir: PathBuf,
    pub provider: ProviderRef,
    #[serde(default)]
    pub endpoint: EndpointMode,
    #[serde(default = "default_host")]
    pub host: String,
    #[serde(default = "default_port")]
    pub port: u16,
    #[serde(default = "default_max_attempts")]
    pub max_attempts: usize,
    #[serde(default = "default_concurrency")]
    pub provider_concurrency: usize,
    /// Append-only JSON-lines session log.
    #[serde(default)]
    pub sessions_file: Option<PathBuf>,
}

fn default_host() -> String {
    "127.0.0.1".into()
}

fn default_port() -> u16 {
    8080
}

fn default_max_attempts() -> usize {
    DEFAULT_MAX_ATTEMPTS
}

fn default_concurrency() -> usize {
    4
}

impl ServiceConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let mut config: ServiceConfig = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.ontology_dir = base.join(&config.ontology_dir);
        config.sessions_file = config.sessions_file.map(|f| base.join(f));
        config.provider = match config.provider {
            ProviderRef::Path(p) => ProviderRef::Inline(ProviderConfig::load(&base.join(p))?),
            ProviderRef::Inline(c) => ProviderRef::Inline(c.relative_to(base)),
        };
        Ok(config)
    }

    /// The provider configuration, loading it if given by path.
    pub fn provider_config(&self) -> Result<ProviderConfig, ConfigError> {
        match &self.provider {
            ProviderRef::Inline(c) => Ok(c.clone()),
            ProviderRef::Path(p) => ProviderConfig::load(p),
        }
    }
}
