use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{BenchmarkConfig, EpisodeResult, FailureReason};
use crate::planner::PlannerBackend;
use crate::tasks::{task_name, Level, TaskSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRow {
    pub task_num: u32,
    pub name: String,
    pub level: Level,
    pub one_shot_example: u32,
    pub episodes: usize,
    pub successes: usize,
    /// Percent, full precision.
    pub success_rate: f64,
    pub parse_failures: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelAverage {
    pub level: Level,
    pub tasks: usize,
    /// Mean of the rows' success rates, percent.
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub backend: String,
    pub model: String,
    pub cot: bool,
    pub seed_base: u64,
    pub episodes: usize,
    pub tasks: Vec<u32>,
    pub strict_ids: bool,
}

impl ConfigEcho {
    pub fn new(backend: &dyn PlannerBackend, cfg: &BenchmarkConfig, tasks: &[TaskSpec]) -> Self {
        Self {
            backend: backend.name().to_string(),
            model: backend.model().to_string(),
            cot: cfg.run.prompt.include_cot,
            seed_base: cfg.seed_base,
            episodes: cfg.episodes,
            tasks: tasks.iter().map(|t| t.task_num).collect(),
            strict_ids: cfg.run.exec.strict_ids,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub task_num: u32,
    pub seed: u64,
    pub success: bool,
    pub failure_reason: Option<FailureReason>,
    pub steps_executed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: ConfigEcho,
    pub rows: Vec<TaskRow>,
    pub averages: Vec<LevelAverage>,
    pub episodes: Vec<EpisodeSummary>,
}

/// `100 * successes / episodes` rounded half up, in integer arithmetic.
pub fn percent_half_up(successes: usize, episodes: usize) -> u64 {
    if episodes == 0 {
        return 0;
    }
    let (s, e) = (successes as u64, episodes as u64);
    (200 * s + e) / (2 * e)
}

fn round_half_up(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

impl BenchmarkReport {
    pub fn from_results(tasks: &[TaskSpec], results: &[EpisodeResult], config: ConfigEcho) -> Self {
        let mut tasks: Vec<&TaskSpec> = tasks.iter().collect();
        tasks.sort_by_key(|t| t.task_num);
        tasks.dedup_by_key(|t| t.task_num);
        let rows: Vec<TaskRow> = tasks
            .iter()
            .map(|t| {
                let mine: Vec<&EpisodeResult> = results.iter().filter(|r| r.task_num == t.task_num).collect();
                let count = |reason| mine.iter().filter(|r| r.failure_reason == Some(reason)).count();
                let successes = mine.iter().filter(|r| r.success).count();
                TaskRow {
                    task_num: t.task_num,
                    name: t.name.clone(),
                    level: t.level,
                    one_shot_example: t.one_shot_example,
                    episodes: mine.len(),
                    successes,
                    success_rate: if mine.is_empty() {
                        0.0
                    } else {
                        100.0 * successes as f64 / mine.len() as f64
                    },
                    parse_failures: count(FailureReason::ParseError),
                    violations: count(FailureReason::ConstraintViolation),
                }
            })
            .collect();
        let averages = [Level::Placement, Level::NovelTask]
            .into_iter()
            .filter_map(|level| {
                let rates: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.level == level)
                    .map(|r| r.success_rate)
                    .collect();
                (!rates.is_empty()).then(|| LevelAverage {
                    level,
                    tasks: rates.len(),
                    success_rate: rates.iter().sum::<f64>() / rates.len() as f64,
                })
            })
            .collect();
        let mut episodes: Vec<EpisodeSummary> = results
            .iter()
            .map(|r| EpisodeSummary {
                task_num: r.task_num,
                seed: r.seed,
                success: r.success,
                failure_reason: r.failure_reason,
                steps_executed: r.steps_executed,
            })
            .collect();
        episodes.sort_by_key(|e| (e.task_num, e.seed));
        Self {
            config,
            rows,
            averages,
            episodes,
        }
    }

    pub fn row(&self, task_num: u32) -> Option<&TaskRow> {
        self.rows.iter().find(|r| r.task_num == task_num)
    }

    pub fn failure_counts(&self) -> std::collections::BTreeMap<FailureReason, usize> {
        let mut counts = std::collections::BTreeMap::new();
        for e in &self.episodes {
            if let Some(r) = e.failure_reason {
                *counts.entry(r).or_default() += 1;
            }
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown report format {other:?} (json, csv, markdown)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("rendering csv: {0}")]
    Csv(#[from] csv::Error),
}

fn render_csv(report: &BenchmarkReport) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "task_num",
        "name",
        "level",
        "one_shot_example",
        "episodes",
        "successes",
        "success_rate",
        "parse_failures",
        "violations",
    ])?;
    for r in &report.rows {
        w.write_record([
            r.task_num.to_string(),
            r.name.clone(),
            r.level.as_str().to_string(),
            r.one_shot_example.to_string(),
            r.episodes.to_string(),
            r.successes.to_string(),
            percent_half_up(r.successes, r.episodes).to_string(),
            r.parse_failures.to_string(),
            r.violations.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn render_markdown(report: &BenchmarkReport) -> String {
    let c = &report.config;
    let mut out = String::from("# Benchmark results\n\n");
    let _ = writeln!(
        out,
        "Backend `{}`, model `{}`, CoT {}, {} episodes per task from seed {}.\n",
        c.backend,
        c.model,
        if c.cot { "on" } else { "off" },
        c.episodes,
        c.seed_base
    );
    for avg in &report.averages {
        let _ = writeln!(out, "## {}\n", avg.level.title());
        out.push_str("| Task | Name | One-shot example | Episodes | Success (%) | Parse failures | Violations |\n");
        out.push_str("|---:|---|---|---:|---:|---:|---:|\n");
        for r in report.rows.iter().filter(|r| r.level == avg.level) {
            let example = task_name(r.one_shot_example).unwrap_or("?");
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} |",
                r.task_num,
                r.name,
                example,
                r.episodes,
                percent_half_up(r.successes, r.episodes),
                r.parse_failures,
                r.violations
            );
        }
        let _ = writeln!(
            out,
            "| **Average** | | | | **{}** | | |\n",
            round_half_up(avg.success_rate)
        );
    }
    out
}

pub fn render_report(report: &BenchmarkReport, format: ReportFormat) -> Result<String, ReportError> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Markdown => Ok(render_markdown(report)),
    }
}

pub fn emit_report(report: &BenchmarkReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<(), ReportError> {
    let path = path.as_ref();
    let text = render_report(report, format)?;
    fs::write(path, text).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}
