//! Episode runner and benchmark aggregation.

mod reference;
mod report;

use serde::{Deserialize, Serialize};

use crate::describe::{describe_scene, render_prompt};
use crate::planner::{map_plan, parse_action_output_with, ActionPlan, Affine2, ParseMode, PlannerBackend};
use crate::promptkit::{build_prompt, select_example, ExampleRecord, LlmInput, PromptConfig};
use crate::tasks::{evaluate, generate_episode_with, TaskSpec};
use crate::world::{execute_plan, Crossing, EventKind, ExecConfig, ObjectId, Trajectory};

pub use reference::{REFERENCE_AVERAGES, REFERENCE_FOLLOW_MOTION_LARGER_MODEL, REFERENCE_RATES};
pub use report::{
    emit_report, percent_half_up, render_report, BenchmarkReport, ConfigEcho, EpisodeSummary, LevelAverage,
    ReportError, ReportFormat, TaskRow,
};

pub const DEFAULT_EPISODES: usize = 30;
pub const DEFAULT_SEED_BASE: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureReason {
    ParseError,
    ConstraintViolation,
    GoalNotMet,
    TransportError,
    Truncated,
    /// No usable example or an oversize prompt.
    PromptError,
}

impl FailureReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureReason::ParseError => "parse-error",
            FailureReason::ConstraintViolation => "constraint-violation",
            FailureReason::GoalNotMet => "goal-not-met",
            FailureReason::TransportError => "transport-error",
            FailureReason::Truncated => "truncated",
            FailureReason::PromptError => "prompt-error",
        }
    }
}

impl std::fmt::Display for FailureReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub steps_executed: usize,
    pub truncated: bool,
    /// Objects moved by each executed step.
    pub moved: Vec<Vec<ObjectId>>,
    pub empty_picks: usize,
    pub crossings: Vec<(usize, Crossing)>,
    /// Steps whose coordinates were pulled back into the workspace when
    /// converted to the top view.
    pub mapping_clamped_steps: Vec<usize>,
}

impl TrajectorySummary {
    fn new(traj: &Trajectory, mapping_clamped_steps: Vec<usize>) -> Self {
        let moved = traj
            .events
            .iter()
            .filter(|e| !matches!(e.kind, EventKind::Truncated { .. }))
            .map(|e| e.kind.moved())
            .collect();
        Self {
            steps_executed: traj.steps(),
            truncated: traj.truncated(),
            moved,
            empty_picks: traj
                .events
                .iter()
                .filter(|e| matches!(e.kind, EventKind::EmptyPick))
                .count(),
            crossings: traj.crossings().map(|(s, c)| (s, *c)).collect(),
            mapping_clamped_steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub prompt: Option<LlmInput>,
    pub raw_response: Option<String>,
    pub parsed_plan: Option<ActionPlan>,
    pub trajectory: Option<TrajectorySummary>,
    /// Evaluation diagnostics or the error that stopped the pipeline.
    pub diagnostics: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub task_num: u32,
    pub seed: u64,
    pub success: bool,
    pub failure_reason: Option<FailureReason>,
    pub steps_executed: usize,
    pub transcript: Transcript,
}

/// Everything about an episode run except the task, seed and backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub prompt: PromptConfig,
    pub exec: ExecConfig,
    pub parse_mode: ParseMode,
    pub calibration: Affine2,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            prompt: PromptConfig::default(),
            exec: ExecConfig::default(),
            parse_mode: ParseMode::Lenient,
            calibration: Affine2::IDENTITY,
        }
    }
}

/// The assembled planner input for an episode, as `run_episode` sends it.
pub fn episode_prompt(
    task: &TaskSpec,
    seed: u64,
    library: &[ExampleRecord],
    cfg: &RunConfig,
) -> Result<LlmInput, crate::promptkit::PromptError> {
    let setup = generate_episode_with(task, seed, cfg.calibration);
    let example = select_example(task, library)?;
    build_prompt(
        example,
        &render_prompt(&setup.prompt, &setup.scene.calibration),
        &describe_scene(&setup.scene),
        &cfg.prompt,
    )
}

/// Runs one episode end to end. Every failure is captured in the result.
pub fn run_episode(
    task: &TaskSpec,
    seed: u64,
    backend: &dyn PlannerBackend,
    library: &[ExampleRecord],
    cfg: &RunConfig,
) -> EpisodeResult {
    let setup = generate_episode_with(task, seed, cfg.calibration);
    let mut result = EpisodeResult {
        task_num: task.task_num,
        seed,
        success: false,
        failure_reason: None,
        steps_executed: 0,
        transcript: Transcript {
            prompt: None,
            raw_response: None,
            parsed_plan: None,
            trajectory: None,
            diagnostics: String::new(),
        },
    };
    let fail = |mut r: EpisodeResult, reason: FailureReason, diagnostics: String| {
        log::debug!("task {} seed {}: {reason}: {diagnostics}", r.task_num, r.seed);
        r.failure_reason = Some(reason);
        r.transcript.diagnostics = diagnostics;
        r
    };

    let input = match select_example(task, library).and_then(|ex| {
        build_prompt(
            ex,
            &render_prompt(&setup.prompt, &setup.scene.calibration),
            &describe_scene(&setup.scene),
            &cfg.prompt,
        )
    }) {
        Ok(input) => input,
        Err(e) => return fail(result, FailureReason::PromptError, e.to_string()),
    };
    result.transcript.prompt = Some(input.clone());

    let raw = match backend.plan(&input, &setup) {
        Ok(raw) => raw,
        Err(e) => return fail(result, FailureReason::TransportError, e.to_string()),
    };
    result.transcript.raw_response = Some(raw.clone());

    let plan = match parse_action_output_with(&raw, cfg.parse_mode) {
        Ok(plan) => plan,
        Err(e) => return fail(result, FailureReason::ParseError, e.to_string()),
    };
    let mapped = map_plan(&setup.scene.calibration, &plan);
    result.transcript.parsed_plan = Some(plan);

    let traj = execute_plan(&setup.scene, &mapped.plan, &cfg.exec);
    result.steps_executed = traj.steps();
    result.transcript.trajectory = Some(TrajectorySummary::new(&traj, mapped.clamped_steps));

    let eval = match evaluate(&setup.goal, &traj) {
        Ok(eval) => eval,
        Err(e) => return fail(result, FailureReason::GoalNotMet, e.to_string()),
    };
    if eval.success {
        result.success = true;
        result.transcript.diagnostics = eval.diagnostics();
        return result;
    }
    let reason = if eval.violation.is_some() {
        FailureReason::ConstraintViolation
    } else if traj.truncated() {
        FailureReason::Truncated
    } else {
        FailureReason::GoalNotMet
    };
    fail(result, reason, eval.diagnostics())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub episodes: usize,
    pub seed_base: u64,
    /// Worker threads; 0 means one per logical core.
    pub workers: usize,
    pub run: RunConfig,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            episodes: DEFAULT_EPISODES,
            seed_base: DEFAULT_SEED_BASE,
            workers: 0,
            run: RunConfig::default(),
        }
    }
}

/// Runs seeds `seed_base .. seed_base + episodes` for every task, results
/// sorted by (task, seed).
pub fn run_episodes(
    tasks: &[TaskSpec],
    backend: &dyn PlannerBackend,
    library: &[ExampleRecord],
    cfg: &BenchmarkConfig,
) -> Vec<EpisodeResult> {
    use rayon::prelude::*;

    let jobs: Vec<(&TaskSpec, u64)> = tasks
        .iter()
        .flat_map(|t| (0..cfg.episodes as u64).map(move |i| (t, cfg.seed_base + i)))
        .collect();
    let run = || -> Vec<EpisodeResult> {
        jobs.par_iter()
            .map(|&(t, seed)| run_episode(t, seed, backend, library, &cfg.run))
            .collect()
    };
    let mut results = match rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build() {
        Ok(pool) => pool.install(run),
        Err(e) => {
            log::warn!("worker pool unavailable ({e}); running serially");
            jobs.iter()
                .map(|&(t, seed)| run_episode(t, seed, backend, library, &cfg.run))
                .collect()
        }
    };
    results.sort_by_key(|r| (r.task_num, r.seed));
    results
}

pub fn run_benchmark(
    tasks: &[TaskSpec],
    backend: &dyn PlannerBackend,
    library: &[ExampleRecord],
    cfg: &BenchmarkConfig,
) -> BenchmarkReport {
    let results = run_episodes(tasks, backend, library, cfg);
    BenchmarkReport::from_results(tasks, &results, ConfigEcho::new(backend, cfg, tasks))
}
