//! SPARQL 1.1 Protocol client.

use std::time::Duration;

use ontochat_core::sparql::ResultSet;
use thiserror::Error;

use crate::results_json::{self, MEDIA_TYPE};

#[derive(Debug, Error)]
pub enum RemoteError {
    #[error("SPARQL endpoint unreachable: {0}")]
    EndpointUnreachable(String),
    #[error("SPARQL endpoint answered HTTP {status}")]
    EndpointHttpError { status: u16, body: String },
    #[error(transparent)]
    MalformedResults(#[from] results_json::MalformedResults),
}

/// Sends `query` as a form-encoded POST and decodes the JSON results.
pub fn execute_remote(endpoint: &str, query: &str, timeout: Duration) -> Result<ResultSet, RemoteError> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(timeout))
        .http_status_as_error(false)
        .build()
        .into();
    let mut response = agent
        .post(endpoint)
        .header("Accept", MEDIA_TYPE)
        .send_form([("query", query)])
        .map_err(|e| RemoteError::EndpointUnreachable(e.to_string()))?;
    let status = response.status().as_u16();
    let body = response
        .body_mut()
        .read_to_string()
        .map_err(|e| RemoteError::EndpointUnreachable(e.to_string()))?;
    if !(200..300).contains(&status) {
        return Err(RemoteError::EndpointHttpError { status, body });
    }
    Ok(results_json::decode_str(&body)?)
}
