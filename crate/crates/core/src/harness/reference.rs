//! Reference success rates of the language-model planner, in percent.
//! They depend on a proprietary model and are kept for comparison only.

/// `(task_num, without reasoning in the example, with reasoning)`.
pub const REFERENCE_RATES: [(u32, u32, u32); 15] = [
    (1, 93, 100),
    (2, 60, 67),
    (3, 93, 93),
    (4, 52, 73),
    (5, 25, 73),
    (6, 13, 43),
    (7, 8, 80),
    (11, 0, 0),
    (12, 17, 47),
    (15, 10, 80),
    (16, 8, 20),
    (17, 10, 30),
    (10, 0, 12),
    (13, 0, 3),
    (14, 3, 71),
];

/// Reference level averages `(without, with)` for placement and novel tasks.
pub const REFERENCE_AVERAGES: [(crate::tasks::Level, u32, u32); 2] = [
    (crate::tasks::Level::Placement, 32, 59),
    (crate::tasks::Level::NovelTask, 1, 29),
];

/// follow_motion with a larger model.
pub const REFERENCE_FOLLOW_MOTION_LARGER_MODEL: u32 = 90;
