mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::*;
use planbench_core::harness::{run_episode, FailureReason, RunConfig};
use planbench_core::planner::{FixtureStore, ReplayBackend, DEFAULT_MODEL};
use planbench_core::promptkit::default_library;
use planbench_core::tasks::task;

fn committed_store() -> Arc<FixtureStore> {
    Arc::new(FixtureStore::open(replay_fixture_path()).expect("committed fixtures load"))
}

#[test]
fn committed_fixtures_are_current() {
    // regenerate with: cargo test -p planbench-core --test replay -- --ignored
    assert_eq!(committed_store().records(), build_replay_store().records());
}

#[test]
#[ignore]
fn regenerate_replay_fixtures() {
    let path = replay_fixture_path();
    let _ = std::fs::remove_file(&path);
    let store = FixtureStore::open(&path).unwrap();
    fill_store(&store);
}

#[test]
fn each_case_gets_its_expected_outcome() {
    let backend = ReplayBackend::new(committed_store(), DEFAULT_MODEL, REPLAY_TEMPERATURE);
    let lib = default_library();
    for c in replay_cases() {
        let r = run_episode(&task(c.task).unwrap(), c.seed, &backend, &lib, &RunConfig::default());
        assert_eq!(
            r.failure_reason, c.expected,
            "{}: {}",
            c.label, r.transcript.diagnostics
        );
        assert_eq!(r.success, c.expected.is_none());
        if let Some(response) = &c.response {
            assert_eq!(
                r.transcript.raw_response.as_deref(),
                Some(response.as_str()),
                "{}",
                c.label
            );
        }
    }
}

#[test]
fn outcome_distribution() {
    let backend = ReplayBackend::new(committed_store(), DEFAULT_MODEL, REPLAY_TEMPERATURE);
    let lib = default_library();
    let mut counts: BTreeMap<Option<FailureReason>, usize> = BTreeMap::new();
    for c in replay_cases() {
        let r = run_episode(&task(c.task).unwrap(), c.seed, &backend, &lib, &RunConfig::default());
        *counts.entry(r.failure_reason).or_default() += 1;
    }
    let expected: BTreeMap<Option<FailureReason>, usize> = [
        (None, 5),
        (Some(FailureReason::ParseError), 3),
        (Some(FailureReason::GoalNotMet), 2),
        (Some(FailureReason::TransportError), 1),
        (Some(FailureReason::ConstraintViolation), 1),
    ]
    .into_iter()
    .collect();
    assert_eq!(counts, expected);
}

#[test]
fn cot_off_prompts_miss_the_fixtures() {
    let backend = ReplayBackend::new(committed_store(), DEFAULT_MODEL, REPLAY_TEMPERATURE);
    let mut cfg = RunConfig::default();
    cfg.prompt.include_cot = false;
    let r = run_episode(&task(1).unwrap(), 42, &backend, &default_library(), &cfg);
    assert_eq!(r.failure_reason, Some(FailureReason::TransportError));
    assert!(r.transcript.diagnostics.contains("replay-miss"));
}
