//! Seeded fuzzing: random solvable configurations and random patterns, run
//! in batches with a deterministic, single-threaded report reduction.
//!
//! Every trial derives its own RNG stream from the master seed and the trial
//! index, so reports are identical for identical seeds no matter how many
//! worker threads execute the batch.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use apf_core::embedding::{check_solvable, TargetPattern};
use apf_core::geometry::{BlockingMode, Chirality, GridPoint, Radius, WorldConfig};
use apf_core::protocol::ProtocolOptions;
use apf_core::sim::{run, Outcome, RunOptions, RunReport, SchedulerPolicy};

/// Knobs of a fuzzing campaign.
#[derive(Clone, Debug)]
pub struct FuzzParams {
    /// Number of trials.
    pub trials: usize,
    /// Smallest robot count (inclusive).
    pub n_min: usize,
    /// Largest robot count (inclusive).
    pub n_max: usize,
    /// Body radius; `None` draws 1/4 or 1/2 per trial.
    pub rad: Option<Radius>,
    /// Grazing convention.
    pub blocking: BlockingMode,
    /// Scheduler driving every trial.
    pub scheduler: SchedulerPolicy,
    /// Master seed; equal seeds give byte-identical reports.
    pub seed: u64,
    /// Positions and targets are drawn from `[-half_window, half_window]²`.
    pub half_window: i64,
    /// Event budget per trial.
    pub max_events: u64,
    /// Record per-event traces into the run reports handed to the visitor.
    pub record_traces: bool,
    /// Worker threads; `0` uses the available parallelism.
    pub workers: usize,
    /// Protocol switch: only leftmost-column terminals may volunteer.
    pub liftoff_leftmost_only: bool,
}

impl Default for FuzzParams {
    fn default() -> Self {
        FuzzParams {
            trials: 500,
            n_min: 3,
            n_max: 15,
            rad: None,
            blocking: BlockingMode::ClosedDisks,
            scheduler: SchedulerPolicy::AsyncRandom,
            seed: 7,
            half_window: 20,
            max_events: 1_000_000,
            record_traces: false,
            workers: 0,
            liftoff_leftmost_only: true,
        }
    }
}

/// One generated trial: a solvable configuration and a same-size pattern.
#[derive(Clone, Debug)]
pub struct TrialInstance {
    /// Trial index within the campaign.
    pub index: usize,
    /// The initial world.
    pub cfg: WorldConfig,
    /// The pattern to form.
    pub pattern: TargetPattern,
    /// Seed of the trial's scheduler.
    pub run_seed: u64,
    /// Configurations discarded by the solvability gate before this one.
    pub config_rejections: u32,
}

fn distinct_points(rng: &mut ChaCha8Rng, n: usize, half_window: i64) -> Vec<GridPoint> {
    let mut set = BTreeSet::new();
    while set.len() < n {
        set.insert((
            rng.random_range(-half_window..=half_window),
            rng.random_range(-half_window..=half_window),
        ));
    }
    set.into_iter().map(|(x, y)| GridPoint::new(x, y)).collect()
}

/// Generates the `index`-th trial of a campaign: robot sets are rejection-
/// sampled inside the window until the solvability gate passes; chirality
/// bits are drawn per robot; the pattern is any same-size point set.
pub fn generate_instance(params: &FuzzParams, index: usize) -> TrialInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(index as u64);
    let n = rng.random_range(params.n_min..=params.n_max);
    let rad = params.rad.unwrap_or_else(|| {
        if rng.random_bool(0.5) {
            Radius::HALF
        } else {
            Radius::QUARTER
        }
    });
    let mut config_rejections = 0u32;
    let cfg = loop {
        let robots: Vec<(GridPoint, Chirality)> = distinct_points(&mut rng, n, params.half_window)
            .into_iter()
            .map(|p| {
                (
                    p,
                    if rng.random_bool(0.5) {
                        Chirality::Plus
                    } else {
                        Chirality::Minus
                    },
                )
            })
            .collect();
        let cfg = WorldConfig::new(robots, rad, params.blocking);
        if check_solvable(&cfg).is_ok() {
            break cfg;
        }
        config_rejections += 1;
        assert!(
            config_rejections < 100_000,
            "trial {index}: could not draw a solvable configuration"
        );
    };
    let pattern = TargetPattern::new(distinct_points(&mut rng, n, params.half_window));
    let run_seed = rng.random::<u64>();
    TrialInstance {
        index,
        cfg,
        pattern,
        run_seed,
        config_rejections,
    }
}

/// Runs one generated trial.
pub fn run_trial(params: &FuzzParams, instance: &TrialInstance) -> RunReport {
    let opts = RunOptions {
        scheduler: params.scheduler,
        seed: instance.run_seed,
        max_events: params.max_events,
        protocol: ProtocolOptions {
            liftoff_leftmost_only: params.liftoff_leftmost_only,
        },
        record_trace: params.record_traces,
        ..RunOptions::default()
    };
    run(&instance.cfg, &instance.pattern, &opts)
        .expect("generated instances are validated before running")
}

/// One failed trial in a report.
#[derive(Clone, Serialize, Deserialize, PartialEq, Debug)]
pub struct FailureLine {
    /// Trial index.
    pub trial: usize,
    /// How the trial ended.
    pub outcome: Outcome,
}

/// Deterministic aggregate of a fuzzing campaign.
#[derive(Clone, Serialize, Deserialize, PartialEq, Debug)]
pub struct FuzzReport {
    /// Trials executed.
    pub trials: usize,
    /// Trials that formed the pattern.
    pub formed: usize,
    /// Trials ending in a collision.
    pub collisions: usize,
    /// Trials ending in a monitor violation.
    pub monitor_violations: usize,
    /// Trials ending stuck.
    pub stuck: usize,
    /// Trials that exhausted their event budget.
    pub budget_exceeded: usize,
    /// Configurations discarded by the solvability gate, all trials.
    pub config_rejections: u64,
    /// Power-of-two histogram of events per trial: `[bucket_upper, count]`,
    /// meaning `count` trials consumed at most `bucket_upper` events (and
    /// more than the previous bucket's bound).
    pub event_histogram: Vec<[u64; 2]>,
    /// Every non-formed trial.
    pub failures: Vec<FailureLine>,
}

impl FuzzReport {
    /// Pretty JSON document, newline-terminated; stable for equal seeds.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn histogram_bucket(events: u64) -> u64 {
    events.max(1).next_power_of_two().max(256)
}

/// Runs a whole campaign. Trials execute in index-sized batches (possibly on
/// worker threads — each trial owns its state); the visitor and the report
/// reduction then consume each batch single-threaded, in index order.
pub fn run_trials(
    params: &FuzzParams,
    mut visit: impl FnMut(&TrialInstance, &RunReport),
) -> FuzzReport {
    let workers = if params.workers == 0 {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    } else {
        params.workers
    };
    let mut report = FuzzReport {
        trials: params.trials,
        formed: 0,
        collisions: 0,
        monitor_violations: 0,
        stuck: 0,
        budget_exceeded: 0,
        config_rejections: 0,
        event_histogram: Vec::new(),
        failures: Vec::new(),
    };
    let mut histogram = BTreeMap::new();
    let mut reduce = |report: &mut FuzzReport,
                      histogram: &mut BTreeMap<u64, u64>,
                      instance: TrialInstance,
                      run_report: RunReport| {
        match run_report.outcome {
            Outcome::Formed { .. } => report.formed += 1,
            Outcome::Collision { .. } => report.collisions += 1,
            Outcome::MonitorViolation { .. } => report.monitor_violations += 1,
            Outcome::Stuck { .. } => report.stuck += 1,
            Outcome::BudgetExceeded => report.budget_exceeded += 1,
        }
        if !matches!(run_report.outcome, Outcome::Formed { .. }) {
            report.failures.push(FailureLine {
                trial: instance.index,
                outcome: run_report.outcome,
            });
        }
        report.config_rejections += u64::from(instance.config_rejections);
        *histogram
            .entry(histogram_bucket(run_report.events))
            .or_insert(0) += 1;
        visit(&instance, &run_report);
    };

    let mut start = 0;
    while start < params.trials {
        let end = (start + workers).min(params.trials);
        if workers == 1 {
            for index in start..end {
                let instance = generate_instance(params, index);
                let run_report = run_trial(params, &instance);
                reduce(&mut report, &mut histogram, instance, run_report);
            }
        } else {
            let batch: Vec<(TrialInstance, RunReport)> = std::thread::scope(|scope| {
                let handles: Vec<_> = (start..end)
                    .map(|index| {
                        scope.spawn(move || {
                            let instance = generate_instance(params, index);
                            let run_report = run_trial(params, &instance);
                            (instance, run_report)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("trial worker panicked"))
                    .collect()
            });
            for (instance, run_report) in batch {
                reduce(&mut report, &mut histogram, instance, run_report);
            }
        }
        start = end;
    }
    report.event_histogram = histogram.into_iter().map(|(k, v)| [k, v]).collect();
    report
}
