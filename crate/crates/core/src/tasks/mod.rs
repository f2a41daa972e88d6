//! The task catalog, seeded episode generation, success predicates, and a
//! ground-truth solver per task.

mod generate;
mod goal;
mod oracle;
mod rng;

use serde::{Deserialize, Serialize};

use crate::world::{Scene, SceneObject};

pub use generate::{generate_episode, generate_episode_with, PROMPT_ID_BASE};
pub use goal::{
    evaluate, Clause, Evaluation, Forbidden, Goal, GoalError, Unmet, Violation, NEAR_POSE_TOL, ROTATION_TOL_DEG,
    STACK_RADIUS,
};
pub use oracle::{oracle_plan, oracle_reasoning, oracle_top_view_steps};
pub use rng::{episode_seed, splitmix64, EpisodeRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Placement,
    NovelTask,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Placement => "placement",
            Level::NovelTask => "novel_task",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Level::Placement => "Placement generalization",
            Level::NovelTask => "Novel task generalization",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub task_num: u32,
    pub name: String,
    pub level: Level,
    /// Task whose worked example is shown in the prompt.
    pub one_shot_example: u32,
}

const CATALOG: [(u32, &str, Level, u32); 15] = [
    (1, "visual_manipulation", Level::Placement, 1),
    (2, "scene_understanding", Level::Placement, 2),
    (3, "rotate", Level::Placement, 3),
    (4, "rearrange", Level::Placement, 4),
    (5, "rearrange_then_restore", Level::Placement, 5),
    (6, "novel_adj", Level::Placement, 6),
    (7, "novel_noun", Level::Placement, 7),
    (10, "follow_motion", Level::NovelTask, 5),
    (11, "follow_order", Level::Placement, 11),
    (12, "sweep_without_exceeding", Level::Placement, 12),
    (13, "sweep_without_touching", Level::NovelTask, 12),
    (14, "same_texture", Level::NovelTask, 15),
    (15, "same_shape", Level::Placement, 15),
    (16, "manipulate_old_neighbor", Level::Placement, 16),
    (17, "pick_in_order_then_restore", Level::Placement, 17),
];

/// The 15 evaluated tasks in ascending task number.
pub fn catalog() -> Vec<TaskSpec> {
    CATALOG
        .iter()
        .map(|&(task_num, name, level, one_shot_example)| TaskSpec {
            task_num,
            name: name.to_string(),
            level,
            one_shot_example,
        })
        .collect()
}

pub fn task(task_num: u32) -> Option<TaskSpec> {
    catalog().into_iter().find(|t| t.task_num == task_num)
}

pub fn task_name(task_num: u32) -> Option<&'static str> {
    CATALOG.iter().find(|t| t.0 == task_num).map(|t| t.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptSegment {
    Text(String),
    /// A self-contained snapshot of a single object.
    Object(SceneObject),
    /// A self-contained snapshot of a whole scene.
    Scene(Scene),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultimodalPrompt {
    pub segments: Vec<PromptSegment>,
}

impl MultimodalPrompt {
    pub fn new(segments: Vec<PromptSegment>) -> Self {
        Self { segments }
    }

    pub fn has_reference(&self) -> bool {
        self.segments
            .iter()
            .any(|s| matches!(s, PromptSegment::Object(_) | PromptSegment::Scene(_)))
    }

    pub fn has_text(&self) -> bool {
        self.segments.iter().any(|s| matches!(s, PromptSegment::Text(_)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSetup {
    pub task: TaskSpec,
    pub seed: u64,
    pub scene: Scene,
    pub prompt: MultimodalPrompt,
    pub goal: Goal,
}

impl EpisodeSetup {
    /// The episode dump format: task number, name, seed, scene, prompt
    /// segments and goal.
    pub fn dump_json(&self) -> serde_json::Value {
        serde_json::json!({
            "task_num": self.task.task_num,
            "name": self.task.name,
            "seed": self.seed,
            "scene": self.scene,
            "prompt": self.prompt,
            "goal": self.goal,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_one_shot_mapping() {
        let cat = catalog();
        assert_eq!(cat.len(), 15);
        let nums: Vec<u32> = cat.iter().map(|t| t.task_num).collect();
        assert_eq!(nums, vec![1, 2, 3, 4, 5, 6, 7, 10, 11, 12, 13, 14, 15, 16, 17]);
        assert_eq!(task(10).unwrap().one_shot_example, 5);
        assert_eq!(task(13).unwrap().one_shot_example, 12);
        assert_eq!(task(14).unwrap().one_shot_example, 15);
        assert_eq!(task(1).unwrap().one_shot_example, 1);
        for t in &cat {
            match t.level {
                Level::Placement => assert_eq!(t.one_shot_example, t.task_num),
                Level::NovelTask => assert_ne!(t.one_shot_example, t.task_num),
            }
        }
        assert!(task(8).is_none() && task(9).is_none());
    }
}
