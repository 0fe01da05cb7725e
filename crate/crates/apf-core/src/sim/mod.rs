//! Discrete-event execution of the protocol under adversarial activation.
//!
//! Every robot repeatedly runs a look–compute–move cycle, but the scheduler
//! decides *when*: a robot's decision is computed from a snapshot taken at
//! its look event and committed — color and position together — at its move
//! event, which may fire long after the snapshot went stale. The schedulers
//! range from fully synchronous rounds to an adversarial asynchronous one
//! that hoards stale decisions as long as the activation model allows.
//!
//! While a run progresses, a set of monitors checks the safety properties
//! the protocol is supposed to maintain: distinct cells, a unique election
//! winner, clean color transitions, a separated beacon, and so on. A
//! violation ends the run immediately with the offending robot named; a
//! correct protocol never trips them.
//!
//! [`explore`] complements the random schedulers with a bounded exhaustive
//! search over *all* schedules of small instances.

pub mod explore;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{
    check_solvable, embed_pattern, positions_form_pattern, EmbeddedTargets, PatternError,
    TargetPattern, Unsolvable,
};
use crate::geometry::{
    validate_config, Chirality, ConfigError, GridPoint, Robot, RobotId, VisibilityCache,
    WorldConfig,
};
use crate::protocol::view::build_local_view_cached;
use crate::protocol::{
    color_transition_allowed, transition, Color, Decision, MoveDir, ProtocolError, ProtocolOptions,
};

/// Activation model driving a run.
#[derive(Clone, Copy, PartialEq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SchedulerPolicy {
    /// Fully synchronous rounds: every robot looks, then every robot moves.
    Fsync,
    /// Semi-synchronous rounds: each robot joins a round with probability
    /// `p` (at least one always runs); a round is look-all-then-move-all
    /// for the chosen subset.
    Ssync {
        /// Per-robot activation probability, in `(0, 1]`.
        p: f64,
    },
    /// Fully asynchronous: each event activates one robot chosen uniformly
    /// at random (a look if it holds no decision, a move otherwise).
    AsyncRandom,
    /// Fully asynchronous with an adversarial bias: keeps taking fresh
    /// snapshots while decisions go stale, and when a move is unavoidable
    /// commits the freshest decision first, maximizing the age of the rest.
    AsyncAdversarial,
}

impl fmt::Display for SchedulerPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchedulerPolicy::Fsync => write!(f, "fsync"),
            SchedulerPolicy::Ssync { p } => write!(f, "ssync({p})"),
            SchedulerPolicy::AsyncRandom => write!(f, "async-random"),
            SchedulerPolicy::AsyncAdversarial => write!(f, "async-adversarial"),
        }
    }
}

/// Knobs of a single run.
#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Activation model.
    pub scheduler: SchedulerPolicy,
    /// Seed for all scheduler randomness; equal seeds give equal runs.
    pub seed: u64,
    /// Hard cap on events (each look and each move counts one); exceeding
    /// it ends the run with [`Outcome::BudgetExceeded`].
    pub max_events: u64,
    /// Staleness bound of the asynchronous schedulers: once `pending_window`
    /// other moves committed since a robot's look, its decision must commit
    /// before any further move.
    pub pending_window: u32,
    /// Declare [`Outcome::Stuck`] after this many consecutive no-effect
    /// moves covering every robot; `None` picks `16 * n + 64`.
    pub stuck_window: Option<u64>,
    /// Protocol variant under test.
    pub protocol: ProtocolOptions,
    /// Record a [`TraceRecord`] per event into [`RunReport::trace`].
    pub record_trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            scheduler: SchedulerPolicy::Fsync,
            seed: 0,
            max_events: 1_000_000,
            pending_window: 8,
            stuck_window: None,
            protocol: ProtocolOptions::default(),
            record_trace: false,
        }
    }
}

/// Safety properties watched while a run progresses.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Monitor {
    /// No two robots ever occupy the same grid cell.
    DistinctCells,
    /// At most one robot ever shows a winner light (`leader1` or `leader`),
    /// over the whole run.
    UniqueWinner,
    /// A marching winner always has its west-adjacent cell free.
    WinnerWestFree,
    /// Every light change follows the protocol's color graph.
    ColorDiscipline,
    /// When the beacon lights up, every other robot lies strictly on one
    /// side of the leader's row.
    BeaconSeparated,
    /// Once the beacon is lit and a robot has finished, at most one robot
    /// is traveling off the assembly row and no election light survives.
    SingleStraggler,
    /// All robots agree on the global frame the leader anchors.
    FrameAgreement,
    /// A robot's view matched no rule of its phase.
    RuleDomain,
    /// All robots finished but their cells do not realize the pattern.
    FinishedOffTarget,
}

impl fmt::Display for Monitor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Monitor::DistinctCells => "distinct-cells",
            Monitor::UniqueWinner => "unique-winner",
            Monitor::WinnerWestFree => "winner-west-free",
            Monitor::ColorDiscipline => "color-discipline",
            Monitor::BeaconSeparated => "beacon-separated",
            Monitor::SingleStraggler => "single-straggler",
            Monitor::FrameAgreement => "frame-agreement",
            Monitor::RuleDomain => "rule-domain",
            Monitor::FinishedOffTarget => "finished-off-target",
        };
        f.write_str(name)
    }
}

/// How a run ended.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Outcome {
    /// Every robot is `done` and the cells realize the target pattern, up
    /// to translation and the recorded vertical flip.
    Formed {
        /// Vertical flip of the matching embedding: `+1` or `-1`.
        sigma: i8,
    },
    /// A robot moved onto an occupied cell (or two moves clashed).
    Collision {
        /// The robot whose move caused the clash.
        moving: RobotId,
        /// The robot already on (or also entering, or swapping through)
        /// the contested cell.
        obstacle: RobotId,
        /// The contested cell.
        at: GridPoint,
    },
    /// A safety monitor fired.
    MonitorViolation {
        /// The property that failed.
        monitor: Monitor,
        /// The robot that exposed the failure.
        robot: RobotId,
    },
    /// Every robot kept committing no-effect moves for a full window.
    Stuck {
        /// The window that elapsed without any effect.
        window: u64,
    },
    /// The event budget ran out first.
    BudgetExceeded,
}

/// One recorded scheduler event.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceRecord {
    /// Event counter value (1-based, shared by the sub-steps of one move).
    pub seq: u64,
    /// The activated robot.
    pub robot: RobotId,
    /// What happened.
    pub step: TraceStep,
}

/// Payload of a [`TraceRecord`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TraceStep {
    /// The robot snapshotted its surroundings and computed a decision.
    Looked {
        /// Color part of the decision.
        color: Color,
        /// Move part of the decision.
        mv: MoveDir,
    },
    /// The robot's move event changed its position.
    Moved {
        /// Cell before the move.
        from: GridPoint,
        /// Cell after the move.
        to: GridPoint,
    },
    /// The robot's move event changed its light.
    Lit {
        /// Light before the move.
        from: Color,
        /// Light after the move.
        to: Color,
    },
}

/// Result of a completed run.
#[derive(Clone, Debug)]
pub struct RunReport {
    /// How the run ended.
    pub outcome: Outcome,
    /// Total events consumed.
    pub events: u64,
    /// Per-event records; empty unless [`RunOptions::record_trace`] was set.
    pub trace: Vec<TraceRecord>,
    /// The robots at the end of the run.
    pub final_robots: Vec<Robot>,
    /// The embedded target cells the run was aiming for.
    pub targets: EmbeddedTargets,
}

/// Rejections raised before a run starts.
#[derive(Clone, PartialEq, Debug)]
pub enum SetupError {
    /// The initial configuration is malformed.
    Config(ConfigError),
    /// The target pattern is malformed.
    Pattern(PatternError),
    /// The initial configuration admits no leader election.
    Unsolvable(Unsolvable),
    /// Robot count and pattern size differ.
    SizeMismatch {
        /// Number of robots.
        robots: usize,
        /// Number of target points.
        targets: usize,
    },
    /// The semi-synchronous activation probability is outside `(0, 1]`.
    InvalidActivationRate(f64),
}

impl fmt::Display for SetupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetupError::Config(e) => write!(f, "invalid configuration: {e}"),
            SetupError::Pattern(e) => write!(f, "invalid pattern: {e}"),
            SetupError::Unsolvable(e) => write!(f, "{e}"),
            SetupError::SizeMismatch { robots, targets } => {
                write!(f, "{robots} robots cannot form a {targets}-point pattern")
            }
            SetupError::InvalidActivationRate(p) => {
                write!(f, "activation probability {p} is outside (0, 1]")
            }
        }
    }
}

impl From<ConfigError> for SetupError {
    fn from(e: ConfigError) -> Self {
        SetupError::Config(e)
    }
}

impl From<PatternError> for SetupError {
    fn from(e: PatternError) -> Self {
        SetupError::Pattern(e)
    }
}

impl From<Unsolvable> for SetupError {
    fn from(e: Unsolvable) -> Self {
        SetupError::Unsolvable(e)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SetupError {}

/// Runs the protocol from `cfg` toward `pattern` under `opts`.
///
/// Rejects malformed inputs up front; any started run terminates with a
/// [`RunReport`] (the event budget bounds even a diverging protocol).
pub fn run(
    cfg: &WorldConfig,
    pattern: &TargetPattern,
    opts: &RunOptions,
) -> Result<RunReport, SetupError> {
    validate_config(cfg)?;
    if let SchedulerPolicy::Ssync { p } = opts.scheduler {
        if !(p > 0.0 && p <= 1.0) {
            return Err(SetupError::InvalidActivationRate(p));
        }
    }
    let targets = embed_pattern(pattern)?;
    if targets.len() != cfg.len() {
        return Err(SetupError::SizeMismatch {
            robots: cfg.len(),
            targets: targets.len(),
        });
    }
    check_solvable(cfg)?;
    Ok(Sim::new(cfg, targets, opts).drive())
}

/// A computed but not yet committed decision.
struct Held {
    decision: Decision,
    /// Number of other moves committed since the snapshot.
    age: u32,
}

/// `Err` carries the terminal outcome of the run (not necessarily a
/// failure — forming the pattern ends a run the same way).
type StepEnd = Result<(), Outcome>;

struct Sim<'a> {
    opts: &'a RunOptions,
    targets: EmbeddedTargets,
    positions: Vec<GridPoint>,
    colors: Vec<Color>,
    chirality: Vec<Chirality>,
    pending: Vec<Option<Held>>,
    cache: VisibilityCache,
    rng: ChaCha8Rng,
    events: u64,
    last_act: Vec<u64>,
    idle_rounds: Vec<u32>,
    trace: Vec<TraceRecord>,
    ever_winners: BTreeSet<RobotId>,
    null_streak: u64,
    nullers: BTreeSet<RobotId>,
    stuck_window: u64,
}

/// A robot starved of events for this long is activated out of turn.
fn fairness_bound(n: usize) -> u64 {
    64 * n as u64 + 256
}

/// Rounds a semi-synchronous robot may sit out before it is forced in.
const SSYNC_FAIR_ROUNDS: u32 = 64;

impl<'a> Sim<'a> {
    fn new(cfg: &WorldConfig, targets: EmbeddedTargets, opts: &'a RunOptions) -> Self {
        let n = cfg.len();
        Self {
            opts,
            targets,
            positions: cfg.robots.iter().map(|r| r.pos).collect(),
            colors: cfg.robots.iter().map(|r| r.color).collect(),
            chirality: cfg.robots.iter().map(|r| r.chirality).collect(),
            pending: (0..n).map(|_| None).collect(),
            cache: VisibilityCache::new(cfg.rad, cfg.blocking),
            rng: ChaCha8Rng::seed_from_u64(opts.seed),
            events: 0,
            last_act: alloc::vec![0; n],
            idle_rounds: alloc::vec![0; n],
            trace: Vec::new(),
            ever_winners: BTreeSet::new(),
            null_streak: 0,
            nullers: BTreeSet::new(),
            stuck_window: opts.stuck_window.unwrap_or(16 * n as u64 + 64),
        }
    }

    fn drive(mut self) -> RunReport {
        loop {
            if self.events >= self.opts.max_events {
                return self.finish(Outcome::BudgetExceeded);
            }
            let step = match self.opts.scheduler {
                SchedulerPolicy::Fsync => self.round_sync(None),
                SchedulerPolicy::Ssync { p } => self.round_sync(Some(p)),
                SchedulerPolicy::AsyncRandom => self.step_async(false),
                SchedulerPolicy::AsyncAdversarial => self.step_async(true),
            };
            if let Err(outcome) = step {
                return self.finish(outcome);
            }
        }
    }

    fn finish(self, outcome: Outcome) -> RunReport {
        let final_robots = (0..self.positions.len())
            .map(|id| Robot {
                id,
                pos: self.positions[id],
                color: self.colors[id],
                chirality: self.chirality[id],
            })
            .collect();
        RunReport {
            outcome,
            events: self.events,
            trace: self.trace,
            final_robots,
            targets: self.targets,
        }
    }

    /// One synchronous round: the chosen robots (everyone under `None`)
    /// look on the common pre-round state, then all commit together.
    fn round_sync(&mut self, p: Option<f64>) -> StepEnd {
        let n = self.positions.len();
        let selected: Vec<RobotId> = match p {
            None => (0..n).collect(),
            Some(p) => {
                let rng = &mut self.rng;
                let mut s: Vec<RobotId> = (0..n).filter(|_| rng.random_bool(p)).collect();
                if s.is_empty() {
                    s.push(self.rng.random_range(0..n));
                }
                for r in 0..n {
                    if self.idle_rounds[r] >= SSYNC_FAIR_ROUNDS && !s.contains(&r) {
                        s.push(r);
                    }
                }
                s.sort_unstable();
                s
            }
        };
        for r in 0..n {
            self.idle_rounds[r] = if selected.contains(&r) {
                0
            } else {
                self.idle_rounds[r].saturating_add(1)
            };
        }
        for &r in &selected {
            self.look(r)?;
        }
        self.commit_batch(&selected)
    }

    /// One asynchronous event, honoring the staleness bound and fairness.
    fn step_async(&mut self, adversarial: bool) -> StepEnd {
        let n = self.positions.len();
        // A decision at the staleness bound must commit before any other
        // move: this is the activation model's promise, not a policy.
        let overdue: Vec<RobotId> = (0..n)
            .filter(|&r| {
                self.pending[r]
                    .as_ref()
                    .is_some_and(|h| h.age >= self.opts.pending_window)
            })
            .collect();
        if !overdue.is_empty() {
            let r = overdue[self.rng.random_range(0..overdue.len())];
            return self.commit_single(r);
        }
        // Fairness: no robot sits idle forever.
        let starved = (0..n)
            .filter(|&r| self.events.saturating_sub(self.last_act[r]) >= fairness_bound(n))
            .max_by_key(|&r| self.events.saturating_sub(self.last_act[r]));
        if let Some(r) = starved {
            return self.act(r);
        }
        if adversarial {
            let idle: Vec<RobotId> = (0..n).filter(|&r| self.pending[r].is_none()).collect();
            let held: Vec<RobotId> = (0..n).filter(|&r| self.pending[r].is_some()).collect();
            if !idle.is_empty() && (held.is_empty() || self.rng.random_bool(0.7)) {
                let r = idle[self.rng.random_range(0..idle.len())];
                return self.look(r);
            }
            let freshest = held
                .into_iter()
                .min_by_key(|&r| (self.pending[r].as_ref().map(|h| h.age), r))
                .expect("some robot always has a legal action");
            return self.commit_single(freshest);
        }
        // Uniform over robots = uniform over legal actions, since each
        // robot has exactly one (look when idle, move when holding).
        let r = self.rng.random_range(0..n);
        self.act(r)
    }

    /// The robot's single legal action: move if holding, look otherwise.
    fn act(&mut self, r: RobotId) -> StepEnd {
        if self.pending[r].is_some() {
            self.commit_single(r)
        } else {
            self.look(r)
        }
    }

    /// Look event: snapshot, compute, hold the decision.
    fn look(&mut self, r: RobotId) -> StepEnd {
        let view = build_local_view_cached(
            &self.positions,
            &self.colors,
            self.chirality[r],
            r,
            &mut self.cache,
        );
        let decision = match transition(&view, &self.targets, &self.opts.protocol) {
            Ok(d) => d,
            Err(e) => {
                let monitor = match e {
                    ProtocolError::FrameConflict => Monitor::FrameAgreement,
                    ProtocolError::MultipleLeaders => Monitor::UniqueWinner,
                    ProtocolError::IllegalViewState | ProtocolError::NoLeaderVisible => {
                        Monitor::RuleDomain
                    }
                };
                return Err(Outcome::MonitorViolation { monitor, robot: r });
            }
        };
        self.events += 1;
        self.last_act[r] = self.events;
        if self.opts.record_trace {
            self.trace.push(TraceRecord {
                seq: self.events,
                robot: r,
                step: TraceStep::Looked {
                    color: decision.color,
                    mv: decision.mv,
                },
            });
        }
        self.pending[r] = Some(Held { decision, age: 0 });
        Ok(())
    }

    /// Move event of a single robot (asynchronous schedulers).
    fn commit_single(&mut self, r: RobotId) -> StepEnd {
        let held = self.pending[r]
            .take()
            .expect("move event without a held decision");
        for (q, slot) in self.pending.iter_mut().enumerate() {
            if q != r {
                if let Some(h) = slot {
                    h.age = h.age.saturating_add(1);
                }
            }
        }
        self.events += 1;
        self.last_act[r] = self.events;
        let mut effective = false;
        let lit_leader = self.apply_color(r, held.decision.color, &mut effective)?;
        if held.decision.mv != MoveDir::None {
            let (dx, dy) = held.decision.mv.global_offset(self.chirality[r]);
            let to = self.positions[r].offset(dx, dy);
            if let Some(obstacle) = self.robot_at(to, r) {
                return Err(Outcome::Collision {
                    moving: r,
                    obstacle,
                    at: to,
                });
            }
            if self.opts.record_trace {
                self.trace.push(TraceRecord {
                    seq: self.events,
                    robot: r,
                    step: TraceStep::Moved {
                        from: self.positions[r],
                        to,
                    },
                });
            }
            self.positions[r] = to;
            effective = true;
        }
        self.note_effect(r, effective);
        let flips = if lit_leader {
            alloc::vec![r]
        } else {
            Vec::new()
        };
        self.post_commit(&flips)
    }

    /// Move events of a whole round, committed simultaneously: colors flip
    /// together, then all position changes apply to the common pre-move
    /// occupancy. Moves are atomic cell hops; a robot may enter a cell its
    /// occupant leaves in the same round (a train), but two robots may not
    /// land together, land on a stationary robot, or swap cells head-on.
    fn commit_batch(&mut self, selected: &[RobotId]) -> StepEnd {
        let mut effective = alloc::vec![false; self.positions.len()];
        let mut flips: Vec<RobotId> = Vec::new();
        let mut moves: Vec<(RobotId, GridPoint, GridPoint)> = Vec::new();
        for &r in selected {
            let held = self.pending[r]
                .take()
                .expect("round member without a held decision");
            self.events += 1;
            self.last_act[r] = self.events;
            if self.apply_color(r, held.decision.color, &mut effective[r])? {
                flips.push(r);
            }
            if held.decision.mv != MoveDir::None {
                let (dx, dy) = held.decision.mv.global_offset(self.chirality[r]);
                let from = self.positions[r];
                moves.push((r, from, from.offset(dx, dy)));
            }
        }
        let movers: BTreeSet<RobotId> = moves.iter().map(|&(r, _, _)| r).collect();
        for &(r, from, to) in &moves {
            if let Some(q) = self.robot_at(to, r) {
                if !movers.contains(&q) {
                    return Err(Outcome::Collision {
                        moving: r,
                        obstacle: q,
                        at: to,
                    });
                }
                let swaps_back = moves.iter().any(|&(m, _, mt)| m == q && mt == from);
                if swaps_back {
                    return Err(Outcome::Collision {
                        moving: r,
                        obstacle: q,
                        at: to,
                    });
                }
            }
            if let Some(&(q, _, _)) = moves.iter().find(|&&(q, _, qt)| q != r && qt == to) {
                return Err(Outcome::Collision {
                    moving: r.max(q),
                    obstacle: r.min(q),
                    at: to,
                });
            }
        }
        for &(r, from, to) in &moves {
            if self.opts.record_trace {
                self.trace.push(TraceRecord {
                    seq: self.events,
                    robot: r,
                    step: TraceStep::Moved { from, to },
                });
            }
            self.positions[r] = to;
            effective[r] = true;
        }
        for &r in selected {
            self.note_effect(r, effective[r]);
        }
        self.post_commit(&flips)
    }

    /// Commits the color half of a decision; returns whether the beacon
    /// was just switched on.
    fn apply_color(
        &mut self,
        r: RobotId,
        to: Color,
        effective: &mut bool,
    ) -> Result<bool, Outcome> {
        let from = self.colors[r];
        if to == from {
            return Ok(false);
        }
        if !color_transition_allowed(from, to) {
            return Err(Outcome::MonitorViolation {
                monitor: Monitor::ColorDiscipline,
                robot: r,
            });
        }
        if self.opts.record_trace {
            self.trace.push(TraceRecord {
                seq: self.events,
                robot: r,
                step: TraceStep::Lit { from, to },
            });
        }
        self.colors[r] = to;
        *effective = true;
        if matches!(to, Color::Leader1 | Color::Leader) {
            self.ever_winners.insert(r);
        }
        Ok(to == Color::Leader)
    }

    fn note_effect(&mut self, r: RobotId, effective: bool) {
        if effective {
            self.null_streak = 0;
            self.nullers.clear();
        } else {
            self.null_streak += 1;
            self.nullers.insert(r);
        }
    }

    fn robot_at(&self, cell: GridPoint, excluding: RobotId) -> Option<RobotId> {
        self.positions
            .iter()
            .position(|&p| p == cell)
            .filter(|&q| q != excluding)
    }

    /// Safety monitors, the formation check and the stuck check, in that
    /// order; `beacon_flips` lists robots whose light just turned `leader`.
    fn post_commit(&mut self, beacon_flips: &[RobotId]) -> StepEnd {
        let n = self.positions.len();
        if let Some((monitor, robot)) =
            violated_state_monitor(&self.positions, &self.colors, beacon_flips)
        {
            return Err(Outcome::MonitorViolation { monitor, robot });
        }
        if self.ever_winners.len() > 1 {
            let robot = *self.ever_winners.iter().next_back().expect("nonempty");
            return Err(Outcome::MonitorViolation {
                monitor: Monitor::UniqueWinner,
                robot,
            });
        }
        if self.colors.iter().all(|&c| c == Color::Done) {
            return match positions_form_pattern(&self.positions, &self.targets) {
                Some(sigma) => Err(Outcome::Formed { sigma }),
                None => Err(Outcome::MonitorViolation {
                    monitor: Monitor::FinishedOffTarget,
                    robot: 0,
                }),
            };
        }
        if self.null_streak >= self.stuck_window && self.nullers.len() == n {
            return Err(Outcome::Stuck {
                window: self.stuck_window,
            });
        }
        Ok(())
    }
}

/// The state-invariant monitors, checked after every committed move by the
/// runner and the explorer alike; `beacon_flips` lists robots whose light
/// turned `leader` in that move. Returns the first violated monitor.
pub(crate) fn violated_state_monitor(
    positions: &[GridPoint],
    colors: &[Color],
    beacon_flips: &[RobotId],
) -> Option<(Monitor, RobotId)> {
    let n = positions.len();
    let mut seen = BTreeSet::new();
    for r in 0..n {
        if !seen.insert(positions[r]) {
            return Some((Monitor::DistinctCells, r));
        }
    }
    let winners: Vec<RobotId> = (0..n)
        .filter(|&r| matches!(colors[r], Color::Leader1 | Color::Leader))
        .collect();
    if winners.len() > 1 {
        return Some((Monitor::UniqueWinner, winners[1]));
    }
    for &r in &winners {
        if colors[r] == Color::Leader1 {
            let west = positions[r].offset(-1, 0);
            if positions.iter().any(|&p| p == west) {
                return Some((Monitor::WinnerWestFree, r));
            }
        }
    }
    for &r in beacon_flips {
        let ly = positions[r].y;
        let mut above = false;
        let mut below = false;
        for q in 0..n {
            if q == r {
                continue;
            }
            match positions[q].y.cmp(&ly) {
                core::cmp::Ordering::Greater => above = true,
                core::cmp::Ordering::Less => below = true,
                core::cmp::Ordering::Equal => return Some((Monitor::BeaconSeparated, r)),
            }
        }
        if above && below {
            return Some((Monitor::BeaconSeparated, r));
        }
    }
    let leader = (0..n).find(|&r| colors[r] == Color::Leader);
    let any_done = colors.iter().any(|&c| c == Color::Done);
    if let (Some(l), true) = (leader, any_done) {
        let ly = positions[l].y;
        let mut travelers = 0usize;
        for r in 0..n {
            match colors[r] {
                Color::Off if positions[r].y != ly => {
                    travelers += 1;
                    if travelers > 1 {
                        return Some((Monitor::SingleStraggler, r));
                    }
                }
                Color::Terminal1
                | Color::Candidate
                | Color::Call
                | Color::Moving1
                | Color::Reached
                | Color::Leader1 => {
                    return Some((Monitor::SingleStraggler, r));
                }
                _ => {}
            }
        }
    }
    None
}
