use std::sync::Arc;

use thiserror::Error;

use super::action::ActionPlan;
use super::fixtures::{fixture_key, FixtureStore};
use crate::promptkit::LlmInput;
use crate::tasks::{oracle_plan, EpisodeSetup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("auth: {0}")]
    Auth(String),
    #[error("replay-miss: no fixture for key {0}")]
    ReplayMiss(String),
    #[error("fixture store: {0}")]
    Fixture(String),
    #[error("backend configuration: {0}")]
    Config(String),
}

/// Something that turns an assembled prompt into a raw text response.
///
/// The episode is passed along for backends that plan from ground truth;
/// language-model backends only see `input`.
pub trait PlannerBackend: Send + Sync {
    fn name(&self) -> &str;

    /// Model identifier echoed into reports.
    fn model(&self) -> &str {
        "-"
    }

    fn plan(&self, input: &LlmInput, episode: &EpisodeSetup) -> Result<String, BackendError>;
}

impl<B: PlannerBackend + ?Sized> PlannerBackend for Arc<B> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn model(&self) -> &str {
        (**self).model()
    }

    fn plan(&self, input: &LlmInput, episode: &EpisodeSetup) -> Result<String, BackendError> {
        (**self).plan(input, episode)
    }
}

/// Answers with the ground-truth solver's plan, in the same JSON format a
/// model would produce.
#[derive(Debug, Default, Clone, Copy)]
pub struct OracleBackend;

impl PlannerBackend for OracleBackend {
    fn name(&self) -> &str {
        "oracle"
    }

    fn model(&self) -> &str {
        "oracle"
    }

    fn plan(&self, _input: &LlmInput, episode: &EpisodeSetup) -> Result<String, BackendError> {
        Ok(oracle_plan(episode).to_json_pretty())
    }
}

/// Always answers with an empty action plan.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullBackend;

impl PlannerBackend for NullBackend {
    fn name(&self) -> &str {
        "null"
    }

    fn model(&self) -> &str {
        "null"
    }

    fn plan(&self, _input: &LlmInput, _episode: &EpisodeSetup) -> Result<String, BackendError> {
        Ok(ActionPlan::new("No action is required.", Vec::new()).to_json())
    }
}

/// Always answers with the same text.
#[derive(Debug, Clone)]
pub struct StaticBackend {
    response: String,
}

impl StaticBackend {
    pub fn new(response: impl Into<String>) -> Self {
        Self {
            response: response.into(),
        }
    }
}

impl PlannerBackend for StaticBackend {
    fn name(&self) -> &str {
        "static"
    }

    fn plan(&self, _input: &LlmInput, _episode: &EpisodeSetup) -> Result<String, BackendError> {
        Ok(self.response.clone())
    }
}

/// Serves recorded responses and never touches the network.
#[derive(Debug, Clone)]
pub struct ReplayBackend {
    store: Arc<FixtureStore>,
    model: String,
    temperature: f64,
}

impl ReplayBackend {
    pub fn new(store: Arc<FixtureStore>, model: impl Into<String>, temperature: f64) -> Self {
        Self {
            store,
            model: model.into(),
            temperature,
        }
    }
}

impl PlannerBackend for ReplayBackend {
    fn name(&self) -> &str {
        "replay"
    }

    fn model(&self) -> &str {
        &self.model
    }

    fn plan(&self, input: &LlmInput, _episode: &EpisodeSetup) -> Result<String, BackendError> {
        let key = fixture_key(input, &self.model, self.temperature);
        self.store.lookup_key(&key).ok_or(BackendError::ReplayMiss(key))
    }
}
