//! Chat-completion provider over HTTP.

use std::time::Duration;

use ontochat_core::gateway::{CompletionRequest, Provider, ProviderError};
use serde_json::{json, Value};

pub struct HttpChatProvider {
    endpoint: String,
    model: String,
    temperature: f64,
    auth: Option<(String, String)>,
    agent: ureq::Agent,
}

impl HttpChatProvider {
    pub fn new(endpoint: String, model: String, temperature: f64, auth: Option<(String, String)>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpChatProvider {
            endpoint,
            model,
            temperature,
            auth,
            agent,
        }
    }

    pub fn request_body(&self, request: &CompletionRequest<'_>) -> Value {
        let messages: Vec<Value> = request
            .prompt
            .messages()
            .into_iter()
            .map(|(role, content)| json!({ "role": role, "content": content }))
            .collect();
        json!({ "model": self.model, "messages": messages, "temperature": self.temperature })
    }
}

impl Provider for HttpChatProvider {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        let mut call = self.agent.post(&self.endpoint).header("Content-Type", "application/json");
        if let Some((name, value)) = &self.auth {
            call = call.header(name, value);
        }
        let mut response = call
            .send(self.request_body(request).to_string())
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(ProviderError::Rejected(format!("HTTP {status}: {}", truncate(&body, 200))));
        }
        let value: Value = serde_json::from_str(&body).map_err(|e| ProviderError::Rejected(e.to_string()))?;
        value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_owned)
            .ok_or_else(|| ProviderError::Rejected("response has no choices[0].message.content".into()))
    }
}

fn truncate(s: &str, max: usize) -> &str {
    match s.char_indices().nth(max) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}
