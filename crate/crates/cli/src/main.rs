use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use planbench_core::harness::{render_report, run_benchmark, run_episode, BenchmarkConfig, ReportFormat, RunConfig};
use planbench_core::planner::{
    FixtureStore, LlmBackend, LlmConfig, NullBackend, OracleBackend, ParseMode, PlannerBackend, ReplayBackend,
    UreqTransport,
};
use planbench_core::promptkit::{default_library, generate_library, load_library, save_library, ExampleRecord};
use planbench_core::tasks::{catalog, generate_episode_with, task, TaskSpec};

#[derive(Parser)]
#[command(name = "plan-bench", version, about = "Seeded tabletop planning benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark and write the report.
    Run(RunArgs),
    /// Run a single episode and print its result.
    Episode(EpisodeArgs),
    /// Regenerate the example library from the task generators.
    Examples {
        #[arg(long, default_value = "examples-library")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendKind {
    Oracle,
    Llm,
    Replay,
    Null,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Markdown,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Markdown => ReportFormat::Markdown,
        }
    }
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "oracle")]
    backend: BackendKind,
    #[arg(long, value_enum, default_value = "on")]
    cot: Switch,
    /// Directory of example files; defaults to the built-in library.
    #[arg(long)]
    examples: Option<PathBuf>,
    /// Fixture store to replay from, or to record into with `--backend llm`.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Do not record live responses.
    #[arg(long)]
    no_record: bool,
    /// Snap every step's `from` to its named target object.
    #[arg(long)]
    strict_ids: bool,
    /// Require the response to be exactly one JSON object.
    #[arg(long)]
    strict_json: bool,
}

#[derive(Args)]
struct RunArgs {
    /// `all` or a comma-separated list of task numbers.
    #[arg(long, default_value = "all")]
    tasks: String,
    #[arg(long, default_value_t = 30)]
    episodes: usize,
    #[arg(long, default_value_t = 42)]
    seed_base: u64,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Worker threads, 0 for one per logical core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EpisodeArgs {
    #[arg(long)]
    task: u32,
    #[arg(long)]
    seed: u64,
    /// Print the assembled planner input.
    #[arg(long)]
    dump_prompt: bool,
    /// Print the generated episode as JSON.
    #[arg(long, alias = "dump")]
    dump_episode: bool,
    #[command(flatten)]
    common: Common,
}

const DEFAULT_RECORD_PATH: &str = "fixtures/recorded.jsonl";

fn parse_tasks(spec: &str) -> Result<Vec<TaskSpec>> {
    if spec.trim() == "all" {
        return Ok(catalog());
    }
    let mut tasks = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let n: u32 = part.parse().with_context(|| format!("bad task number {part:?}"))?;
        tasks.push(task(n).with_context(|| format!("task {n} is not in the catalog"))?);
    }
    if tasks.is_empty() {
        bail!("no tasks selected");
    }
    Ok(tasks)
}

fn library(common: &Common) -> Result<Vec<ExampleRecord>> {
    match &common.examples {
        Some(dir) => load_library(dir).with_context(|| format!("loading examples from {}", dir.display())),
        None => Ok(default_library()),
    }
}

fn open_store(path: &Path) -> Result<Arc<FixtureStore>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(Arc::new(FixtureStore::open(path)?))
}

fn backend(common: &Common) -> Result<Box<dyn PlannerBackend>> {
    Ok(match common.backend {
        BackendKind::Oracle => Box::new(OracleBackend),
        BackendKind::Null => Box::new(NullBackend),
        BackendKind::Replay => {
            let path = common
                .fixtures
                .as_ref()
                .context("--backend replay needs --fixtures <file>")?;
            if !path.exists() {
                bail!("fixture file {} does not exist", path.display());
            }
            let cfg = LlmConfig::from_env();
            Box::new(ReplayBackend::new(open_store(path)?, cfg.model, cfg.temperature))
        }
        BackendKind::Llm => {
            let mut llm = LlmBackend::new(LlmConfig::from_env(), Arc::new(UreqTransport))?;
            if !common.no_record {
                let path = common
                    .fixtures
                    .clone()
                    .unwrap_or_else(|| PathBuf::from(DEFAULT_RECORD_PATH));
                log::info!("recording responses into {}", path.display());
                llm = llm.recording_into(open_store(&path)?);
            }
            Box::new(llm)
        }
    })
}

fn run_config(common: &Common) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.prompt.include_cot = common.cot == Switch::On;
    cfg.exec.strict_ids = common.strict_ids;
    if common.strict_json {
        cfg.parse_mode = ParseMode::Strict;
    }
    cfg
}

fn cmd_run(args: RunArgs) -> Result<()> {
    if args.episodes == 0 {
        bail!("--episodes must be at least 1");
    }
    let tasks = parse_tasks(&args.tasks)?;
    let library = library(&args.common)?;
    let backend = backend(&args.common)?;
    let cfg = BenchmarkConfig {
        episodes: args.episodes,
        seed_base: args.seed_base,
        workers: args.workers,
        run: run_config(&args.common),
    };
    let report = run_benchmark(&tasks, backend.as_ref(), &library, &cfg);
    let text = render_report(&report, args.format.into())?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            for row in &report.rows {
                eprintln!(
                    "task {:>2} {:<28} {:>3}/{}",
                    row.task_num, row.name, row.successes, row.episodes
                );
            }
            eprintln!("report written to {}", path.display());
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_episode(args: EpisodeArgs) -> Result<()> {
    let spec = task(args.task).with_context(|| format!("task {} is not in the catalog", args.task))?;
    let library = library(&args.common)?;
    let backend = backend(&args.common)?;
    let cfg = run_config(&args.common);
    let mut out = std::io::stdout().lock();
    if args.dump_episode {
        let setup = generate_episode_with(&spec, args.seed, cfg.calibration);
        writeln!(out, "{}", serde_json::to_string_pretty(&setup.dump_json())?)?;
    }
    let result = run_episode(&spec, args.seed, backend.as_ref(), &library, &cfg);
    if args.dump_prompt {
        match &result.transcript.prompt {
            Some(p) => writeln!(out, "=== system ===\n{}\n=== user ===\n{}", p.system, p.user)?,
            None => writeln!(out, "=== no prompt: {} ===", result.transcript.diagnostics)?,
        }
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&result)?)?;
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Episode(args) => cmd_episode(args),
        Command::Examples { out } => {
            save_library(&out, &generate_library())?;
            eprintln!("wrote example library to {}", out.display());
            Ok(())
        }
    }
}
