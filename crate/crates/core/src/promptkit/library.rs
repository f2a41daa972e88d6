//! Example library files.
//!
//! One file per task, `task_NN.txt`:
//!
//! ```text
//! task_num: 3
//! seed: 1000
//! --- task_prompt ---
//! ...
//! --- scene_description ---
//! ...
//! --- reasoning ---
//! ...
//! --- action_plan ---
//! {...}
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::ExampleRecord;
use crate::describe::{describe_scene, render_prompt};
use crate::planner::parse_action_output;
use crate::tasks::{generate_episode, oracle_plan, oracle_reasoning, task, EpisodeSetup};

/// Tasks that serve as someone's one-shot example.
pub const LIBRARY_TASKS: [u32; 12] = [1, 2, 3, 4, 5, 6, 7, 11, 12, 15, 16, 17];
/// Seed of the episodes the committed examples were written for. Outside
/// the default benchmark range.
pub const EXAMPLE_SEED: u64 = 1000;

const SECTIONS: [&str; 4] = ["task_prompt", "scene_description", "reasoning", "action_plan"];

const EMBEDDED: [&str; 12] = [
    include_str!("../../library/task_01.txt"),
    include_str!("../../library/task_02.txt"),
    include_str!("../../library/task_03.txt"),
    include_str!("../../library/task_04.txt"),
    include_str!("../../library/task_05.txt"),
    include_str!("../../library/task_06.txt"),
    include_str!("../../library/task_07.txt"),
    include_str!("../../library/task_11.txt"),
    include_str!("../../library/task_12.txt"),
    include_str!("../../library/task_15.txt"),
    include_str!("../../library/task_16.txt"),
    include_str!("../../library/task_17.txt"),
];

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("{source_name}: line {line}: {reason}")]
    Format {
        source_name: String,
        line: usize,
        reason: String,
    },
    #[error("{source_name}: {reason}")]
    Invalid { source_name: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub fn file_name(task_num: u32) -> String {
    format!("task_{task_num:02}.txt")
}

pub fn format_example(ex: &ExampleRecord) -> String {
    let mut out = format!("task_num: {}\nseed: {}\n", ex.task_num, ex.seed);
    let bodies = [
        &ex.task_prompt,
        &ex.scene_description,
        &ex.reasoning,
        &ex.action_plan_json,
    ];
    for (name, body) in SECTIONS.iter().zip(bodies) {
        out.push_str(&format!("--- {name} ---\n{body}\n"));
    }
    out
}

/// Parses one library file. `source_name` only labels errors.
pub fn parse_example(text: &str, source_name: &str) -> Result<ExampleRecord, LibraryError> {
    let fail = |line: usize, reason: String| LibraryError::Format {
        source_name: source_name.to_string(),
        line,
        reason,
    };
    let mut task_num = None;
    let mut seed = None;
    let mut bodies: Vec<(String, Vec<&str>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if let Some(name) = line.strip_prefix("--- ").and_then(|l| l.strip_suffix(" ---")) {
            let expected = SECTIONS.get(bodies.len()).copied();
            if expected != Some(name) {
                return Err(fail(n, format!("unexpected section {name:?}")));
            }
            bodies.push((name.to_string(), Vec::new()));
        } else if let Some((_, body)) = bodies.last_mut() {
            body.push(line);
        } else if let Some(v) = line.strip_prefix("task_num:") {
            task_num = Some(v.trim().parse::<u32>().map_err(|e| fail(n, format!("task_num: {e}")))?);
        } else if let Some(v) = line.strip_prefix("seed:") {
            seed = Some(v.trim().parse::<u64>().map_err(|e| fail(n, format!("seed: {e}")))?);
        } else if !line.trim().is_empty() {
            return Err(fail(n, format!("unexpected header line {line:?}")));
        }
    }
    if bodies.len() != SECTIONS.len() {
        return Err(fail(
            text.lines().count(),
            format!("missing section {:?}", SECTIONS[bodies.len()]),
        ));
    }
    let mut texts = bodies.into_iter().map(|(_, lines)| lines.join("\n"));
    let mut next = || texts.next().unwrap_or_default();
    let record = ExampleRecord {
        task_num: task_num.ok_or_else(|| fail(1, "missing task_num".into()))?,
        seed: seed.ok_or_else(|| fail(1, "missing seed".into()))?,
        task_prompt: next(),
        scene_description: next(),
        reasoning: next(),
        action_plan_json: next(),
    };
    let invalid = |reason: String| LibraryError::Invalid {
        source_name: source_name.to_string(),
        reason,
    };
    if record.reasoning.trim().is_empty() {
        return Err(invalid("reasoning is empty".into()));
    }
    parse_action_output(&record.action_plan_json).map_err(|e| invalid(format!("action_plan: {e}")))?;
    Ok(record)
}

/// Loads every `*.txt` file in `dir`, sorted by task number.
pub fn load_library(dir: impl AsRef<Path>) -> Result<Vec<ExampleRecord>, LibraryError> {
    let dir = dir.as_ref();
    let io = |path: &Path, source| LibraryError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    paths.sort();
    let mut records = Vec::with_capacity(paths.len());
    for path in paths {
        let text = fs::read_to_string(&path).map_err(|e| io(&path, e))?;
        records.push(parse_example(&text, &path.display().to_string())?);
    }
    check_unique(records, &dir.display().to_string())
}

fn check_unique(mut records: Vec<ExampleRecord>, source_name: &str) -> Result<Vec<ExampleRecord>, LibraryError> {
    records.sort_by_key(|r| r.task_num);
    if let Some(w) = records.windows(2).find(|w| w[0].task_num == w[1].task_num) {
        return Err(LibraryError::Invalid {
            source_name: source_name.to_string(),
            reason: format!("two examples for task {}", w[0].task_num),
        });
    }
    Ok(records)
}

pub fn save_library(dir: impl AsRef<Path>, records: &[ExampleRecord]) -> Result<(), LibraryError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| LibraryError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for r in records {
        let path = dir.join(file_name(r.task_num));
        fs::write(&path, format_example(r)).map_err(|source| LibraryError::Io { path, source })?;
    }
    Ok(())
}

/// The library compiled into the crate.
pub fn default_library() -> Vec<ExampleRecord> {
    let records = EMBEDDED
        .iter()
        .zip(LIBRARY_TASKS)
        .map(|(text, n)| parse_example(text, &file_name(n)).expect("embedded library is valid"))
        .collect();
    check_unique(records, "embedded library").expect("embedded library has one example per task")
}

pub fn example_from_episode(setup: &EpisodeSetup) -> ExampleRecord {
    let cal = &setup.scene.calibration;
    ExampleRecord {
        task_num: setup.task.task_num,
        seed: setup.seed,
        task_prompt: render_prompt(&setup.prompt, cal),
        scene_description: describe_scene(&setup.scene),
        reasoning: oracle_reasoning(setup),
        action_plan_json: oracle_plan(setup).to_json_pretty(),
    }
}

/// Rebuilds the committed library from the episode generators.
pub fn generate_library() -> Vec<ExampleRecord> {
    LIBRARY_TASKS
        .iter()
        .map(|&n| {
            example_from_episode(&generate_episode(
                &task(n).expect("library task in catalog"),
                EXAMPLE_SEED,
            ))
        })
        .collect()
}
