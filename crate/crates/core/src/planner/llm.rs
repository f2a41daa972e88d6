//! OpenAI-compatible chat-completions backend.

use std::env;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::backend::{BackendError, PlannerBackend};
use super::fixtures::FixtureStore;
use crate::promptkit::LlmInput;
use crate::tasks::EpisodeSetup;

pub const ENV_API_KEY: &str = "PLANNER_API_KEY";
pub const ENV_BASE_URL: &str = "PLANNER_BASE_URL";
pub const ENV_MODEL: &str = "PLANNER_MODEL";

pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";
pub const DEFAULT_MODEL: &str = "gpt-3.5-turbo-1106";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmConfig {
    pub base_url: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub timeout_s: f64,
    pub retries: u32,
}

impl Default for LlmConfig {
    fn default() -> Self {
        Self {
            base_url: DEFAULT_BASE_URL.to_string(),
            model: DEFAULT_MODEL.to_string(),
            api_key_env: ENV_API_KEY.to_string(),
            temperature: 0.0,
            max_tokens: 2048,
            timeout_s: 120.0,
            retries: 2,
        }
    }
}

impl LlmConfig {
    /// Defaults overridden by `PLANNER_BASE_URL` and `PLANNER_MODEL`.
    pub fn from_env() -> Self {
        let mut cfg = Self::default();
        if let Ok(url) = env::var(ENV_BASE_URL) {
            if !url.trim().is_empty() {
                cfg.base_url = url.trim().to_string();
            }
        }
        if let Ok(model) = env::var(ENV_MODEL) {
            if !model.trim().is_empty() {
                cfg.model = model.trim().to_string();
            }
        }
        cfg
    }

    pub fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.timeout_s > 0.0 && self.timeout_s.is_finite()) {
            return Err(format!("timeout_s must be positive, got {}", self.timeout_s));
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(format!("temperature must be non-negative, got {}", self.temperature));
        }
        Ok(())
    }

    pub fn request_body(&self, input: &LlmInput) -> Value {
        json!({
            "model": self.model,
            "messages": [
                {"role": "system", "content": input.system},
                {"role": "user", "content": input.user},
            ],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpReply {
    pub status: u16,
    pub body: String,
}

/// The single HTTP call the LLM backend makes. Errors are transport-level
/// failures (DNS, TLS, timeouts); HTTP error statuses come back as replies.
pub trait ChatTransport: Send + Sync {
    fn post_json(&self, url: &str, bearer: &str, body: &Value, timeout: Duration) -> Result<HttpReply, String>;
}

#[derive(Debug, Default)]
pub struct UreqTransport;

impl ChatTransport for UreqTransport {
    fn post_json(&self, url: &str, bearer: &str, body: &Value, timeout: Duration) -> Result<HttpReply, String> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let mut resp = agent
            .post(url)
            .header("Authorization", &format!("Bearer {bearer}"))
            .send_json(body)
            .map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().map_err(|e| e.to_string())?;
        Ok(HttpReply { status, body })
    }
}

pub struct LlmBackend {
    config: LlmConfig,
    api_key: String,
    transport: Arc<dyn ChatTransport>,
    recorder: Option<Arc<FixtureStore>>,
    cache_first: bool,
}

impl LlmBackend {
    /// Reads the API key from the configured environment variable.
    pub fn new(config: LlmConfig, transport: Arc<dyn ChatTransport>) -> Result<Self, BackendError> {
        config.validate().map_err(BackendError::Config)?;
        let api_key = env::var(&config.api_key_env)
            .ok()
            .filter(|k| !k.trim().is_empty())
            .ok_or_else(|| BackendError::Auth(format!("environment variable {} is not set", config.api_key_env)))?;
        Ok(Self::with_key(config, api_key, transport))
    }

    pub fn with_key(config: LlmConfig, api_key: String, transport: Arc<dyn ChatTransport>) -> Self {
        Self {
            config,
            api_key,
            transport,
            recorder: None,
            cache_first: false,
        }
    }

    /// Records every successful response into `store`.
    pub fn recording_into(mut self, store: Arc<FixtureStore>) -> Self {
        self.recorder = Some(store);
        self
    }

    /// Answers from the fixture store when possible, calling out only on a
    /// miss.
    pub fn cache_first(mut self, enabled: bool) -> Self {
        self.cache_first = enabled;
        self
    }

    pub fn config(&self) -> &LlmConfig {
        &self.config
    }

    fn request(&self, input: &LlmInput) -> Result<String, BackendError> {
        let body = self.config.request_body(input);
        let url = self.config.endpoint();
        let timeout = Duration::from_secs_f64(self.config.timeout_s);
        let mut last_error = String::new();
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                log::debug!("retrying chat completion (attempt {})", attempt + 1);
            }
            let reply = match self.transport.post_json(&url, &self.api_key, &body, timeout) {
                Ok(reply) => reply,
                Err(e) => {
                    last_error = e;
                    continue;
                }
            };
            match reply.status {
                200..=299 => return extract_content(&reply.body),
                401 | 403 => {
                    return Err(BackendError::Auth(format!(
                        "HTTP {}: {}",
                        reply.status,
                        snippet(&reply.body)
                    )))
                }
                429 | 500..=599 => last_error = format!("HTTP {}: {}", reply.status, snippet(&reply.body)),
                status => {
                    return Err(BackendError::Transport(format!(
                        "HTTP {status}: {}",
                        snippet(&reply.body)
                    )))
                }
            }
        }
        Err(BackendError::Transport(format!(
            "{} attempt(s) failed, last error: {last_error}",
            self.config.retries + 1
        )))
    }
}

impl PlannerBackend for LlmBackend {
    fn name(&self) -> &str {
        "llm"
    }

    fn model(&self) -> &str {
        &self.config.model
    }

    fn plan(&self, input: &LlmInput, _episode: &EpisodeSetup) -> Result<String, BackendError> {
        if self.cache_first {
            if let Some(hit) = self
                .recorder
                .as_ref()
                .and_then(|s| s.lookup(input, &self.config.model, self.config.temperature))
            {
                return Ok(hit);
            }
        }
        let text = self.request(input)?;
        if let Some(store) = &self.recorder {
            store
                .record(input, &self.config.model, self.config.temperature, &text)
                .map_err(|e| BackendError::Fixture(e.to_string()))?;
        }
        Ok(text)
    }
}

fn extract_content(body: &str) -> Result<String, BackendError> {
    let v: Value =
        serde_json::from_str(body).map_err(|e| BackendError::Transport(format!("malformed completion body: {e}")))?;
    v.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| BackendError::Transport(format!("completion without message content: {}", snippet(body))))
}

fn snippet(s: &str) -> String {
    s.chars().take(200).collect()
}
