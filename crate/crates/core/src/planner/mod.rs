//! Planner backends, the action-output parser, and the front/top view
//! coordinate mapping.

mod action;
mod backend;
mod fixtures;
mod llm;
mod mapping;

pub use action::{
    map_plan, parse_action_output, parse_action_output_with, ActionPlan, ActionStep, ActionType, MappedPlan,
    ParseError, ParseMode, TopViewPlan,
};
pub use backend::{BackendError, NullBackend, OracleBackend, PlannerBackend, ReplayBackend, StaticBackend};
pub use fixtures::{fixture_key, FixtureError, FixtureRecord, FixtureStore, RecordOutcome};
pub use llm::{
    ChatTransport, HttpReply, LlmBackend, LlmConfig, UreqTransport, DEFAULT_BASE_URL, DEFAULT_MODEL, ENV_API_KEY,
    ENV_BASE_URL, ENV_MODEL,
};
pub use mapping::{map_point, unmap_point, Affine2, CalibrationError, MappedPoint};
