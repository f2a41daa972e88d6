//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::path::PathBuf;

use planbench_core::harness::{episode_prompt, FailureReason, RunConfig};
use planbench_core::planner::{ActionStep, FixtureStore, DEFAULT_MODEL};
use planbench_core::promptkit::default_library;
use planbench_core::tasks::{generate_episode, oracle_plan, task, Clause};
use planbench_core::world::Point;

pub const REPLAY_TEMPERATURE: f64 = 0.0;

pub fn replay_fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/replay.jsonl")
}

/// One replayed episode: the canned response (absent for a deliberate
/// replay miss) and the outcome it must produce.
pub struct ReplayCase {
    pub task: u32,
    pub seed: u64,
    pub label: &'static str,
    pub response: Option<String>,
    pub expected: Option<FailureReason>,
}

fn overshoot_sweep(seed: u64) -> String {
    let ep = generate_episode(&task(12).unwrap(), seed);
    let Clause::InZone { object, .. } = ep.goal.final_state[0] else {
        panic!("sweep goal starts with InZone")
    };
    let p = ep.scene.get(object).unwrap().position;
    let step = ActionStep::sweep(object, p, Point::new(p.x, 0.03));
    serde_json::json!({
        "inference": "Sweep the object all the way down to the bottom edge.",
        "action_plan": [step],
    })
    .to_string()
}

pub fn replay_cases() -> Vec<ReplayCase> {
    let oracle = |n: u32, seed: u64| oracle_plan(&generate_episode(&task(n).unwrap(), seed));
    let case = |task, seed, label, response: Option<String>, expected| ReplayCase {
        task,
        seed,
        label,
        response,
        expected,
    };
    let compact = oracle(1, 45).to_json();
    let truncated: String = oracle(1, 47).to_json().chars().take(70).collect();
    vec![
        case(1, 42, "valid plan", Some(oracle(1, 42).to_json()), None),
        case(1, 43, "valid multi-line plan", Some(oracle(1, 43).to_json_pretty()), None),
        case(
            1,
            44,
            "prose around a fenced plan",
            Some(format!(
                "Sure! First I match the objects, then I move them.\n```json\n{}\n```\nLet me know if anything is unclear.",
                oracle(1, 44).to_json_pretty()
            )),
            None,
        ),
        case(
            1,
            45,
            "prose around an inline plan",
            Some(format!("Reasoning: the object goes into the container. Final answer: {compact} Done.")),
            None,
        ),
        case(
            1,
            46,
            "no json",
            Some("I'm sorry, but I cannot see the objects in the scene.".into()),
            Some(FailureReason::ParseError),
        ),
        case(1, 47, "cut-off json", Some(truncated), Some(FailureReason::ParseError)),
        case(
            1,
            48,
            "wrong action type",
            Some(
                r#"{"inference": "Push it.", "action_plan": [{"action_type": "push", "target_object": 1, "rotation": 0, "from": [0.2, 0.2], "to": [0.5, 0.5]}]}"#
                    .into(),
            ),
            Some(FailureReason::ParseError),
        ),
        case(
            1,
            49,
            "coordinates outside the workspace",
            Some(
                r#"{"inference": "Move it far away.", "action_plan": [{"action_type": "pick_and_place", "target_object": 1, "rotation": 0, "from": [1.7, -0.4], "to": [2.5, 1.9]}]}"#
                    .into(),
            ),
            Some(FailureReason::GoalNotMet),
        ),
        case(
            1,
            50,
            "empty plan",
            Some(r#"{"inference": "Everything is already in place.", "action_plan": []}"#.into()),
            Some(FailureReason::GoalNotMet),
        ),
        case(1, 51, "no recorded response", None, Some(FailureReason::TransportError)),
        case(12, 42, "sweep past the line", Some(overshoot_sweep(42)), Some(FailureReason::ConstraintViolation)),
        case(12, 43, "valid sweep", Some(oracle(12, 43).to_json()), None),
    ]
}

/// The fixture store the committed file must equal.
pub fn build_replay_store() -> FixtureStore {
    let store = FixtureStore::in_memory();
    fill_store(&store);
    store
}

pub fn fill_store(store: &FixtureStore) {
    let lib = default_library();
    let cfg = RunConfig::default();
    for c in replay_cases() {
        let Some(response) = &c.response else { continue };
        let input = episode_prompt(&task(c.task).unwrap(), c.seed, &lib, &cfg).expect("prompt builds");
        store
            .record(&input, DEFAULT_MODEL, REPLAY_TEMPERATURE, response)
            .expect("in-memory record");
    }
}

/// Parser fixtures and the error message each must produce.
pub const PARSER_FIXTURES: [(&str, &str); 5] = [
    ("no_json_found.txt", "no-json-found"),
    ("missing_key.txt", "schema(missing key target_object at step 0)"),
    ("schema.txt", "schema(action_plan must be an array)"),
    ("bad_action_type.txt", "bad-action-type(push)"),
    ("bad_coordinate.txt", "bad-coordinate(step 0)"),
];

pub fn parser_fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/parser")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
