//! Seeded tabletop planning benchmark: symbolic scenes, task generators,
//! text descriptions, prompt assembly, planner backends and the episode
//! harness.

pub mod describe;
pub mod harness;
pub mod planner;
pub mod promptkit;
pub mod tasks;
pub mod world;

pub use describe::{describe_object, describe_scene, render_prompt};
pub use harness::{
    emit_report, run_benchmark, run_episode, BenchmarkConfig, BenchmarkReport, EpisodeResult, FailureReason,
    ReportFormat, RunConfig,
};
pub use planner::{
    map_plan, map_point, parse_action_output, unmap_point, ActionPlan, ActionStep, ActionType, Affine2, PlannerBackend,
};
pub use promptkit::{
    build_prompt, default_library, select_example, strip_reasoning, ExampleRecord, LlmInput, PromptConfig,
};
pub use tasks::{catalog, evaluate, generate_episode, oracle_plan, EpisodeSetup, Goal, TaskSpec};
pub use world::{execute_plan, ExecConfig, Point, Scene, SceneObject, Trajectory};
