//! The `apf` binary: run, validate, fuzz, explore, and render subcommands.
//!
//! Exit codes: 0 success, 1 protocol/validation failure, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use apf_core::geometry::{BlockingMode, Radius};
use apf_core::sim::SchedulerPolicy;

use apf_cli::commands::{
    cmd_explore, cmd_fuzz, cmd_render, cmd_run, cmd_validate, ExploreSpec, RunSpec,
};
use apf_cli::formats::{parse_blocking, parse_radius};
use apf_cli::fuzz::FuzzParams;

#[derive(Parser)]
#[command(
    name = "apf",
    version,
    about = "Arbitrary pattern formation by opaque fat luminous robots on the grid",
    after_help = "Set APF_LOG=1 for verbose progress on stderr."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Scheduler flags shared by `run` and `fuzz`.
#[derive(Args, Clone)]
struct SchedulerArgs {
    /// Scheduler policy: fsync, ssync, async-random or async-adversarial.
    #[arg(long, default_value = "async-random", value_parser = parse_policy_name)]
    scheduler: PolicyName,
    /// Activation probability for the ssync scheduler, in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    p: f64,
}

#[derive(Clone, Copy)]
enum PolicyName {
    Fsync,
    Ssync,
    AsyncRandom,
    AsyncAdversarial,
}

fn parse_policy_name(s: &str) -> Result<PolicyName, String> {
    match s {
        "fsync" => Ok(PolicyName::Fsync),
        "ssync" => Ok(PolicyName::Ssync),
        "async-random" => Ok(PolicyName::AsyncRandom),
        "async-adversarial" => Ok(PolicyName::AsyncAdversarial),
        other => Err(format!(
            "unknown scheduler `{other}` (expected fsync, ssync, async-random or async-adversarial)"
        )),
    }
}

impl SchedulerArgs {
    fn policy(&self) -> SchedulerPolicy {
        match self.scheduler {
            PolicyName::Fsync => SchedulerPolicy::Fsync,
            PolicyName::Ssync => SchedulerPolicy::Ssync { p: self.p },
            PolicyName::AsyncRandom => SchedulerPolicy::AsyncRandom,
            PolicyName::AsyncAdversarial => SchedulerPolicy::AsyncAdversarial,
        }
    }
}

fn parse_blocking_arg(s: &str) -> Result<BlockingMode, String> {
    parse_blocking(s)
}

fn parse_radius_arg(s: &str) -> Result<Radius, String> {
    parse_radius(s)
}

/// `min:max` robot-count range, e.g. `3:15`.
fn parse_robots_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `min:max`, got `{s}`"))?;
    let lo: usize = lo.parse().map_err(|e| format!("min: {e}"))?;
    let hi: usize = hi.parse().map_err(|e| format!("max: {e}"))?;
    if lo < 1 || hi < lo {
        return Err(format!("expected 1 <= min <= max, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one simulation, writing a trace and a verdict.
    Run {
        /// Configuration file (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Pattern file (JSON).
        #[arg(long)]
        pattern: PathBuf,
        #[command(flatten)]
        scheduler: SchedulerArgs,
        /// Scheduler seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Event budget.
        #[arg(long, default_value_t = 1_000_000)]
        max_events: u64,
        /// Staleness bound of the asynchronous schedulers.
        #[arg(long, default_value_t = 8)]
        pending_window: u32,
        /// Override the configuration file's blocking mode (closed|open).
        #[arg(long, value_parser = parse_blocking_arg)]
        blocking: Option<BlockingMode>,
        /// Let any line terminal volunteer for election, not only on the
        /// leftmost column (known-broken variant for counterexample demos).
        #[arg(long)]
        liftoff_any: bool,
        /// Trace output path (JSON Lines).
        #[arg(long, default_value = "trace.jsonl")]
        trace: PathBuf,
        /// Verdict output path (JSON).
        #[arg(long, default_value = "verdict.json")]
        verdict: PathBuf,
    },
    /// Check the solvability gate of a configuration.
    Validate {
        /// Configuration file (JSON).
        #[arg(long)]
        config: PathBuf,
    },
    /// Run seeded trials over random solvable configurations.
    Fuzz {
        /// Number of trials.
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Robot-count range `min:max`.
        #[arg(long, default_value = "3:15", value_parser = parse_robots_range)]
        robots: (usize, usize),
        /// Body radius `num/den`; omitted draws 1/4 or 1/2 per trial.
        #[arg(long, value_parser = parse_radius_arg)]
        rad: Option<Radius>,
        /// Blocking mode (closed|open).
        #[arg(long, default_value = "closed", value_parser = parse_blocking_arg)]
        blocking: BlockingMode,
        #[command(flatten)]
        scheduler: SchedulerArgs,
        /// Master seed; equal seeds give byte-identical reports.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Positions and targets are drawn from `[-window, window]²`.
        #[arg(long, default_value_t = 20)]
        window: i64,
        /// Event budget per trial.
        #[arg(long, default_value_t = 1_000_000)]
        max_events: u64,
        /// Worker threads; 0 uses the available parallelism.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Report output path (in addition to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustively explore every schedule of a small instance.
    Explore {
        /// Configuration file (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Pattern file (JSON).
        #[arg(long)]
        pattern: PathBuf,
        /// Staleness bound of held decisions.
        #[arg(long, default_value_t = 1)]
        pending_window: u8,
        /// State budget.
        #[arg(long, default_value_t = 200_000)]
        max_states: usize,
        /// Let any line terminal volunteer for election, not only on the
        /// leftmost column (known-broken variant for counterexample demos).
        #[arg(long)]
        liftoff_any: bool,
    },
    /// Render SVG frames from a persisted trace.
    Render {
        /// Trace file (JSON Lines).
        #[arg(long)]
        trace: PathBuf,
        /// Output directory for the frames.
        #[arg(long)]
        out: PathBuf,
        /// Emit one frame per this many events.
        #[arg(long, default_value_t = 1)]
        every_k: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run {
            config,
            pattern,
            scheduler,
            seed,
            max_events,
            pending_window,
            blocking,
            liftoff_any,
            trace,
            verdict,
        } => cmd_run(&RunSpec {
            config,
            pattern,
            scheduler: scheduler.policy(),
            seed,
            max_events,
            pending_window,
            blocking,
            liftoff_any,
            trace_out: trace,
            verdict_out: verdict,
        }),
        Cmd::Validate { config } => cmd_validate(&config),
        Cmd::Fuzz {
            trials,
            robots,
            rad,
            blocking,
            scheduler,
            seed,
            window,
            max_events,
            workers,
            out,
        } => cmd_fuzz(
            &FuzzParams {
                trials,
                n_min: robots.0,
                n_max: robots.1,
                rad,
                blocking,
                scheduler: scheduler.policy(),
                seed,
                half_window: window,
                max_events,
                record_traces: false,
                workers,
                liftoff_leftmost_only: true,
            },
            out.as_ref(),
        ),
        Cmd::Explore {
            config,
            pattern,
            pending_window,
            max_states,
            liftoff_any,
        } => cmd_explore(&ExploreSpec {
            config,
            pattern,
            pending_window,
            max_states,
            liftoff_any,
        }),
        Cmd::Render {
            trace,
            out,
            every_k,
        } => cmd_render(&trace, &out, every_k),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
