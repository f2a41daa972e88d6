//! Assembles the planner input: system preamble, one worked example, and
//! the query.

mod library;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tasks::TaskSpec;

pub use library::{
    default_library, example_from_episode, file_name, format_example, generate_library, load_library, parse_example,
    save_library, LibraryError, EXAMPLE_SEED, LIBRARY_TASKS,
};

/// The two chat messages sent to a planner.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LlmInput {
    pub system: String,
    pub user: String,
}

/// One worked demonstration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleRecord {
    pub task_num: u32,
    /// Episode seed the example was written for.
    pub seed: u64,
    pub task_prompt: String,
    pub scene_description: String,
    pub reasoning: String,
    pub action_plan_json: String,
}

pub const DEFAULT_MAX_EXAMPLE_CHARS: usize = 8000;

pub const DEFAULT_SYSTEM_PREAMBLE: &str = "\
You are the planner of a robot arm working on a tabletop.
Objects are described with a shape, a texture, half-extents (size) and the center of the object in the front view. \
Coordinates are fractions of the workspace in [0, 1]: u grows to the right and v grows away from the robot.
The arm has two actions:
- pick_and_place: pick the object at `from` and place it at `to`, turning it by `rotation` degrees (0 for no turn).
- sweep: push every object near the straight path from `from` to `to` along that path without lifting it. `rotation` is ignored.
All actions are executed in order without feedback, so the whole plan must be written at once.
Answer with one JSON object and nothing else, in this format:
{\"inference\": \"<your step-by-step reasoning>\", \"action_plan\": [{\"action_type\": \"pick_and_place\" or \"sweep\", \"target_object\": <object id>, \"rotation\": <degrees>, \"from\": [u, v], \"to\": [u, v]}]}
Always write your reasoning in `inference` before the plan, even when the example output does not show any.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptConfig {
    pub include_cot: bool,
    pub system_preamble: String,
    pub max_example_chars: usize,
}

impl Default for PromptConfig {
    fn default() -> Self {
        Self {
            include_cot: true,
            system_preamble: DEFAULT_SYSTEM_PREAMBLE.to_string(),
            max_example_chars: DEFAULT_MAX_EXAMPLE_CHARS,
        }
    }
}

impl PromptConfig {
    pub fn with_cot(include_cot: bool) -> Self {
        Self {
            include_cot,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), PromptError> {
        if self.system_preamble.trim().is_empty() {
            return Err(PromptError::InvalidConfig("system preamble is empty".into()));
        }
        if self.max_example_chars == 0 {
            return Err(PromptError::InvalidConfig("max_example_chars must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("example-not-found({0})")]
    ExampleNotFound(u32),
    #[error("example-too-large: {chars} chars, limit {limit}")]
    ExampleTooLarge { chars: usize, limit: usize },
    #[error("invalid prompt config: {0}")]
    InvalidConfig(String),
}

pub const EXAMPLE_TASK: &str = "# EXAMPLE TASK";
pub const EXAMPLE_SCENE: &str = "# EXAMPLE SCENE";
pub const EXAMPLE_REASONING: &str = "# EXAMPLE REASONING";
pub const EXAMPLE_OUTPUT: &str = "# EXAMPLE OUTPUT";
pub const QUERY_TASK: &str = "# TASK";
pub const QUERY_SCENE: &str = "# SCENE";
pub const QUERY_OUTPUT: &str = "# OUTPUT:";

/// The library record used as the demonstration for `task`.
pub fn select_example<'a>(task: &TaskSpec, library: &'a [ExampleRecord]) -> Result<&'a ExampleRecord, PromptError> {
    library
        .iter()
        .find(|r| r.task_num == task.one_shot_example)
        .ok_or(PromptError::ExampleNotFound(task.one_shot_example))
}

pub fn strip_reasoning(ex: &ExampleRecord) -> ExampleRecord {
    ExampleRecord {
        reasoning: String::new(),
        ..ex.clone()
    }
}

fn section(out: &mut String, header: &str, body: &str) {
    out.push_str(header);
    out.push('\n');
    out.push_str(body);
    out.push_str("\n\n");
}

pub fn build_prompt(
    ex: &ExampleRecord,
    query_task_prompt: &str,
    query_scene: &str,
    cfg: &PromptConfig,
) -> Result<LlmInput, PromptError> {
    cfg.validate()?;
    let mut example = String::new();
    section(&mut example, EXAMPLE_TASK, &ex.task_prompt);
    section(&mut example, EXAMPLE_SCENE, &ex.scene_description);
    if cfg.include_cot && !ex.reasoning.is_empty() {
        section(&mut example, EXAMPLE_REASONING, &ex.reasoning);
    }
    section(&mut example, EXAMPLE_OUTPUT, &ex.action_plan_json);
    let chars = example.chars().count();
    if chars > cfg.max_example_chars {
        return Err(PromptError::ExampleTooLarge {
            chars,
            limit: cfg.max_example_chars,
        });
    }

    let mut user = example;
    section(&mut user, QUERY_TASK, query_task_prompt);
    section(&mut user, QUERY_SCENE, query_scene);
    user.push_str(QUERY_OUTPUT);
    Ok(LlmInput {
        system: cfg.system_preamble.clone(),
        user,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tasks::task;

    fn record(task_num: u32) -> ExampleRecord {
        ExampleRecord {
            task_num,
            seed: 0,
            task_prompt: format!("prompt {task_num}"),
            scene_description: "scene (front view):".into(),
            reasoning: "r".repeat(300),
            action_plan_json: r#"{"inference": "x", "action_plan": []}"#.into(),
        }
    }

    fn library() -> Vec<ExampleRecord> {
        [1, 2, 3, 5, 12, 15].into_iter().map(record).collect()
    }

    #[test]
    fn selection_follows_one_shot_mapping() {
        let lib = library();
        assert_eq!(select_example(&task(10).unwrap(), &lib).unwrap().task_num, 5);
        assert_eq!(select_example(&task(14).unwrap(), &lib).unwrap().task_num, 15);
        assert_eq!(select_example(&task(3).unwrap(), &lib).unwrap().task_num, 3);
        assert_eq!(
            select_example(&task(7).unwrap(), &lib).unwrap_err(),
            PromptError::ExampleNotFound(7)
        );
    }

    #[test]
    fn stripping() {
        let ex = record(1);
        let once = strip_reasoning(&ex);
        assert_eq!(once.reasoning, "");
        assert_eq!(strip_reasoning(&once), once);
        assert_eq!(once.action_plan_json, ex.action_plan_json);
    }

    #[test]
    fn cot_switch_only_removes_reasoning_section() {
        let ex = record(1);
        let on = build_prompt(&ex, "do it", "scene", &PromptConfig::with_cot(true)).unwrap();
        let off = build_prompt(&ex, "do it", "scene", &PromptConfig::with_cot(false)).unwrap();
        assert!(on.user.contains(EXAMPLE_REASONING));
        assert!(!off.user.contains(EXAMPLE_REASONING));
        let removed = format!("{EXAMPLE_REASONING}\n{}\n\n", ex.reasoning);
        assert_eq!(on.user.replacen(&removed, "", 1), off.user);
        assert_eq!(on.system, off.system);
        let stripped = build_prompt(&strip_reasoning(&ex), "do it", "scene", &PromptConfig::with_cot(true)).unwrap();
        assert_eq!(stripped, off);
        assert_eq!(
            on,
            build_prompt(&ex, "do it", "scene", &PromptConfig::with_cot(true)).unwrap()
        );
    }

    #[test]
    fn section_order() {
        let on = build_prompt(&record(1), "q", "s", &PromptConfig::default()).unwrap();
        let pos: Vec<usize> = [
            EXAMPLE_TASK,
            EXAMPLE_SCENE,
            EXAMPLE_REASONING,
            EXAMPLE_OUTPUT,
            "\n# TASK\n",
            "\n# SCENE\n",
            QUERY_OUTPUT,
        ]
        .iter()
        .map(|h| on.user.find(h).unwrap())
        .collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(on.user.ends_with(QUERY_OUTPUT));
    }

    #[test]
    fn oversize_example_is_rejected() {
        let cfg = PromptConfig {
            max_example_chars: 100,
            ..PromptConfig::default()
        };
        assert!(matches!(
            build_prompt(&record(1), "q", "s", &cfg),
            Err(PromptError::ExampleTooLarge { limit: 100, .. })
        ));
        // the reasoning alone pushes it over; without it the example fits
        let cfg = PromptConfig {
            max_example_chars: 200,
            include_cot: false,
            ..PromptConfig::default()
        };
        assert!(build_prompt(&record(1), "q", "s", &cfg).is_ok());
    }

    #[test]
    fn empty_preamble_is_invalid() {
        let cfg = PromptConfig {
            system_preamble: " ".into(),
            ..PromptConfig::default()
        };
        assert!(matches!(
            build_prompt(&record(1), "q", "s", &cfg),
            Err(PromptError::InvalidConfig(_))
        ));
    }
}
