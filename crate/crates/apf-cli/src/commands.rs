//! Subcommand implementations. Each returns the process exit code: `0` on
//! success, `1` on a protocol or validation failure, `2` on a usage error.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use apf_core::embedding::check_solvable;
use apf_core::geometry::BlockingMode;
use apf_core::protocol::ProtocolOptions;
use apf_core::sim::explore::{
    explore, ExploreAction, ExploreFailure, ExploreOptions, ExploreOutcome,
};
use apf_core::sim::{run, Outcome, RunOptions, SchedulerPolicy};

use crate::formats::{load_config, load_inputs, write_trace, LoadError, TraceHeader, Verdict};
use crate::fuzz::{run_trials, FuzzParams};
use crate::render::{render_svg, RenderError};
use crate::{log_enabled, verbose};

/// Everything a `run` invocation needs.
#[derive(Clone, Debug)]
pub struct RunSpec {
    /// Configuration file.
    pub config: PathBuf,
    /// Pattern file.
    pub pattern: PathBuf,
    /// Scheduler policy (with its activation probability already folded in).
    pub scheduler: SchedulerPolicy,
    /// Scheduler seed.
    pub seed: u64,
    /// Event budget.
    pub max_events: u64,
    /// Staleness bound for asynchronous schedulers.
    pub pending_window: u32,
    /// Override of the configuration file's blocking mode.
    pub blocking: Option<BlockingMode>,
    /// Let any line terminal volunteer for election, not only on the
    /// leftmost column (known-broken variant kept for counterexample demos).
    pub liftoff_any: bool,
    /// Trace output path.
    pub trace_out: PathBuf,
    /// Verdict output path.
    pub verdict_out: PathBuf,
}

/// Failures surfaced to `main`, each carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Input files could not be loaded or validated (exit 1).
    Load(LoadError),
    /// The run could not start (exit 1).
    Setup(apf_core::sim::SetupError),
    /// An artifact could not be written (exit 1).
    Io(io::Error),
    /// Rendering failed (exit 1).
    Render(RenderError),
    /// Arguments were structurally valid but unusable (exit 2).
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Load(e) => write!(f, "{e}"),
            CliError::Setup(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Render(e) => write!(f, "{e}"),
            CliError::Usage(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    /// The process exit code this failure maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError::Load(e)
    }
}

impl From<apf_core::sim::SetupError> for CliError {
    fn from(e: apf_core::sim::SetupError) -> Self {
        CliError::Setup(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Runs one simulation, writes the trace and the verdict, and prints the
/// verdict line. Exit 0 iff the pattern formed.
pub fn cmd_run(spec: &RunSpec) -> Result<i32, CliError> {
    let (mut cfg, pattern) = load_inputs(&spec.config, &spec.pattern)?;
    if let Some(blocking) = spec.blocking {
        cfg.blocking = blocking;
    }
    let opts = RunOptions {
        scheduler: spec.scheduler,
        seed: spec.seed,
        max_events: spec.max_events,
        pending_window: spec.pending_window,
        stuck_window: None,
        protocol: ProtocolOptions {
            liftoff_leftmost_only: !spec.liftoff_any,
        },
        record_trace: true,
    };
    let started = Instant::now();
    let report = run(&cfg, &pattern, &opts)?;
    verbose(|| {
        format!(
            "run finished: {:?} after {} events in {:?}",
            report.outcome,
            report.events,
            started.elapsed()
        )
    });

    let header = TraceHeader::from_run(&cfg, &pattern, &opts);
    let trace_file = fs::File::create(&spec.trace_out)?;
    write_trace(io::BufWriter::new(trace_file), &header, &cfg, &report.trace)?;

    let verdict = Verdict::from_report(&report);
    let json = verdict.to_json();
    fs::write(&spec.verdict_out, &json)?;
    print!("{json}");
    Ok(if matches!(report.outcome, Outcome::Formed { .. }) {
        0
    } else {
        1
    })
}

#[derive(Serialize)]
struct SolvabilityVerdict {
    solvable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    axis_two_y: Option<i64>,
}

/// Checks the solvability gate of a configuration. Exit 0 if solvable,
/// 1 otherwise.
pub fn cmd_validate(config: &PathBuf) -> Result<i32, CliError> {
    let cfg = load_config(config)?;
    let (verdict, code) = match check_solvable(&cfg) {
        Ok(()) => (
            SolvabilityVerdict {
                solvable: true,
                axis_two_y: None,
            },
            0,
        ),
        Err(e) => (
            SolvabilityVerdict {
                solvable: false,
                axis_two_y: Some(e.axis_two_y),
            },
            1,
        ),
    };
    println!(
        "{}",
        serde_json::to_string(&verdict).expect("verdict serializes")
    );
    Ok(code)
}

/// Runs a fuzzing campaign and prints (and optionally writes) the aggregate
/// report. Exit 0 iff every trial formed the pattern.
pub fn cmd_fuzz(params: &FuzzParams, out: Option<&PathBuf>) -> Result<i32, CliError> {
    let started = Instant::now();
    let log = log_enabled();
    let report = run_trials(params, |instance, run_report| {
        if log && (instance.index + 1) % 50 == 0 {
            eprintln!(
                "fuzz: {}/{} trials, last outcome {:?}",
                instance.index + 1,
                params.trials,
                run_report.outcome
            );
        }
    });
    verbose(|| format!("fuzz finished in {:?}", started.elapsed()));
    let json = report.to_json();
    if let Some(path) = out {
        fs::write(path, &json)?;
    }
    print!("{json}");
    Ok(if report.formed == report.trials { 0 } else { 1 })
}

/// Everything an `explore` invocation needs.
#[derive(Clone, Debug)]
pub struct ExploreSpec {
    /// Configuration file.
    pub config: PathBuf,
    /// Pattern file.
    pub pattern: PathBuf,
    /// Staleness bound of held decisions.
    pub pending_window: u8,
    /// State budget.
    pub max_states: usize,
    /// Known-broken protocol variant for counterexample demos.
    pub liftoff_any: bool,
}

#[derive(Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
enum ExploreVerdict {
    AllRunsForm {
        states: usize,
        formed_terminals: usize,
    },
    Counterexample {
        failure: ExploreFailure,
        schedule: Vec<ExploreAction>,
    },
    BudgetExceeded {
        states: usize,
    },
}

/// Exhaustively explores every schedule of a small instance. Exit 0 iff all
/// schedules form the pattern.
pub fn cmd_explore(spec: &ExploreSpec) -> Result<i32, CliError> {
    let (cfg, pattern) = load_inputs(&spec.config, &spec.pattern)?;
    let opts = ExploreOptions {
        pending_window: spec.pending_window,
        max_states: spec.max_states,
        protocol: ProtocolOptions {
            liftoff_leftmost_only: !spec.liftoff_any,
        },
    };
    let started = Instant::now();
    let outcome = explore(&cfg, &pattern, &opts)?;
    verbose(|| format!("explore finished in {:?}", started.elapsed()));
    let (verdict, code) = match outcome {
        ExploreOutcome::AllRunsForm {
            states,
            formed_terminals,
        } => (
            ExploreVerdict::AllRunsForm {
                states,
                formed_terminals,
            },
            0,
        ),
        ExploreOutcome::Counterexample { failure, schedule } => {
            (ExploreVerdict::Counterexample { failure, schedule }, 1)
        }
        ExploreOutcome::BudgetExceeded { states } => (ExploreVerdict::BudgetExceeded { states }, 1),
    };
    println!(
        "{}",
        serde_json::to_string(&verdict).expect("verdict serializes")
    );
    Ok(code)
}

#[derive(Serialize)]
struct RenderSummary {
    frames: usize,
    out_dir: PathBuf,
}

/// Renders SVG frames from a persisted trace. Exit 0 on success, 2 when the
/// stride is zero.
pub fn cmd_render(trace: &PathBuf, out_dir: &PathBuf, every_k: u64) -> Result<i32, CliError> {
    let parsed = crate::formats::read_trace_file(trace)?;
    let frames = match render_svg(&parsed, out_dir, every_k) {
        Ok(frames) => frames,
        Err(RenderError::ZeroStride) => {
            return Err(CliError::Usage(RenderError::ZeroStride.to_string()))
        }
        Err(RenderError::Io(e)) => return Err(CliError::Io(e)),
        Err(e) => return Err(CliError::Render(e)),
    };
    let summary = RenderSummary {
        frames: frames.len(),
        out_dir: out_dir.clone(),
    };
    println!(
        "{}",
        serde_json::to_string(&summary).expect("summary serializes")
    );
    io::stdout().flush()?;
    Ok(0)
}
