//! Bounded exhaustive exploration of every schedule of a small instance.
//!
//! The random schedulers in [`super`] sample the space of asynchronous
//! runs; this module enumerates it. A state is the robots' cells, lights
//! and held (not yet committed) decisions; an edge is one look or one
//! committed move. Held decisions age as other moves commit and must flush
//! once they hit the staleness window, exactly as in the event-driven
//! runner, so the graph contains precisely the schedules that activation
//! model admits.
//!
//! Breadth-first search classifies the whole graph:
//!
//! * a reachable collision, monitor violation or rule-domain error is
//!   returned as a replayable counterexample schedule;
//! * a *quiescent* state (no held decisions, every fresh snapshot decides
//!   to do nothing) must be the formed pattern, otherwise it is a deadlock
//!   counterexample;
//! * every state must still be able to reach a formed quiescent state,
//!   otherwise some schedule traps the system in a live but sterile cycle.
//!
//! If none of that triggers, every schedule within the window forms the
//! pattern.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;

use crate::embedding::{check_solvable, embed_pattern, positions_form_pattern, TargetPattern};
use crate::geometry::{
    validate_config, Chirality, GridPoint, RobotId, VisibilityCache, WorldConfig,
};
use crate::protocol::view::build_local_view_cached;
use crate::protocol::{
    color_transition_allowed, transition, Color, Decision, MoveDir, ProtocolError, ProtocolOptions,
};
use crate::sim::{violated_state_monitor, Monitor, SetupError};

use crate::embedding::EmbeddedTargets;

/// Knobs of an exploration.
#[derive(Clone, Debug)]
pub struct ExploreOptions {
    /// Staleness window: a held decision must commit once this many other
    /// moves landed after its snapshot. Small windows keep the graph
    /// tractable; `1` already covers every single-overlap interleaving.
    pub pending_window: u8,
    /// Abort with [`ExploreOutcome::BudgetExceeded`] beyond this many
    /// distinct states.
    pub max_states: usize,
    /// Protocol variant under test.
    pub protocol: ProtocolOptions,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        Self {
            pending_window: 1,
            max_states: 200_000,
            protocol: ProtocolOptions::default(),
        }
    }
}

/// One scheduler choice in a replayable counterexample.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ExploreAction {
    /// The robot snapshots its surroundings and computes a decision.
    Look(RobotId),
    /// The robot's held decision commits.
    Commit(RobotId),
}

/// What broke on a counterexample schedule.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ExploreFailure {
    /// A committed move entered an occupied cell.
    Collision {
        /// The robot that moved.
        moving: RobotId,
        /// The robot already there.
        obstacle: RobotId,
        /// The contested cell.
        at: GridPoint,
    },
    /// A safety monitor fired (or a robot's view matched no rule).
    MonitorViolation {
        /// The property that failed.
        monitor: Monitor,
        /// The robot that exposed the failure.
        robot: RobotId,
    },
    /// A deadlock: nothing is held, every fresh decision is a no-op, and
    /// the pattern is not formed.
    Quiescent,
    /// A live lock: the state can keep changing forever but no schedule
    /// from here reaches the formed pattern.
    Livelock,
}

/// Verdict of an exploration.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExploreOutcome {
    /// Every schedule admitted by the window forms the pattern.
    AllRunsForm {
        /// Distinct states enumerated.
        states: usize,
        /// Quiescent states reached (all of them the formed pattern).
        formed_terminals: usize,
    },
    /// Some schedule breaks the protocol; replay it with the steps given.
    Counterexample {
        /// What went wrong at the end of the schedule.
        failure: ExploreFailure,
        /// The scheduler choices, from the initial state to the failure.
        schedule: Vec<ExploreAction>,
    },
    /// The state budget ran out before the graph was closed.
    BudgetExceeded {
        /// Distinct states enumerated before giving up.
        states: usize,
    },
}

/// Exhaustively explores every schedule of `cfg` toward `pattern`.
pub fn explore(
    cfg: &WorldConfig,
    pattern: &TargetPattern,
    opts: &ExploreOptions,
) -> Result<ExploreOutcome, SetupError> {
    validate_config(cfg)?;
    let targets = embed_pattern(pattern)?;
    if targets.len() != cfg.len() {
        return Err(SetupError::SizeMismatch {
            robots: cfg.len(),
            targets: targets.len(),
        });
    }
    check_solvable(cfg)?;
    Ok(Explorer::new(cfg, targets, opts).search())
}

/// Full scheduling state of the system between events.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct State {
    positions: Vec<GridPoint>,
    colors: Vec<Color>,
    /// Held decision and its age (other moves since its snapshot).
    pending: Vec<Option<(Decision, u8)>>,
}

struct Explorer<'a> {
    opts: &'a ExploreOptions,
    targets: EmbeddedTargets,
    chirality: Vec<Chirality>,
    cache: VisibilityCache,
    /// Interned states; a state's id is its index here.
    states: Vec<State>,
    index: BTreeMap<State, usize>,
    /// BFS tree edge that discovered each state.
    parent: Vec<Option<(usize, ExploreAction)>>,
    /// All outgoing edges, for the terminal co-reachability pass.
    edges: Vec<Vec<usize>>,
    queue: VecDeque<usize>,
    formed_terminals: Vec<usize>,
}

impl<'a> Explorer<'a> {
    fn new(cfg: &WorldConfig, targets: EmbeddedTargets, opts: &'a ExploreOptions) -> Self {
        let n = cfg.len();
        let initial = State {
            positions: cfg.robots.iter().map(|r| r.pos).collect(),
            colors: cfg.robots.iter().map(|r| r.color).collect(),
            pending: (0..n).map(|_| None).collect(),
        };
        let mut index = BTreeMap::new();
        index.insert(initial.clone(), 0);
        Self {
            opts,
            targets,
            chirality: cfg.robots.iter().map(|r| r.chirality).collect(),
            cache: VisibilityCache::new(cfg.rad, cfg.blocking),
            states: alloc::vec![initial],
            index,
            parent: alloc::vec![None],
            edges: alloc::vec![Vec::new()],
            queue: VecDeque::from([0usize]),
            formed_terminals: Vec::new(),
        }
    }

    fn search(mut self) -> ExploreOutcome {
        while let Some(id) = self.queue.pop_front() {
            let state = self.states[id].clone();
            let n = state.positions.len();
            if state.pending.iter().all(Option::is_none) {
                match self.classify_quiescent(id, &state) {
                    Ok(true) => continue,
                    Ok(false) => {}
                    Err(outcome) => return outcome,
                }
            }
            // The staleness window restricts which moves may fire next;
            // looks are always allowed for idle robots.
            let capped: Vec<RobotId> = (0..n)
                .filter(|&r| {
                    state.pending[r].is_some_and(|(_, age)| age >= self.opts.pending_window)
                })
                .collect();
            let movable: Vec<RobotId> = if capped.is_empty() {
                (0..n).filter(|&r| state.pending[r].is_some()).collect()
            } else {
                capped
            };
            let mut actions: Vec<ExploreAction> =
                movable.into_iter().map(ExploreAction::Commit).collect();
            actions.extend(
                (0..n)
                    .filter(|&r| state.pending[r].is_none())
                    .map(ExploreAction::Look),
            );
            for action in actions {
                let next = match self.apply(&state, action) {
                    Ok(next) => next,
                    Err(failure) => {
                        return ExploreOutcome::Counterexample {
                            failure,
                            schedule: self.schedule_to(id, Some(action)),
                        }
                    }
                };
                let next_id = match self.index.get(&next) {
                    Some(&existing) => existing,
                    None => {
                        if self.states.len() >= self.opts.max_states {
                            return ExploreOutcome::BudgetExceeded {
                                states: self.states.len(),
                            };
                        }
                        let new_id = self.states.len();
                        self.index.insert(next.clone(), new_id);
                        self.states.push(next);
                        self.parent.push(Some((id, action)));
                        self.edges.push(Vec::new());
                        self.queue.push_back(new_id);
                        new_id
                    }
                };
                self.edges[id].push(next_id);
            }
        }
        // Liveness: every state must still be able to reach a formed
        // quiescent state, or some schedule circles forever unformed.
        let mut reverse: Vec<Vec<usize>> = alloc::vec![Vec::new(); self.states.len()];
        for (from, outs) in self.edges.iter().enumerate() {
            for &to in outs {
                reverse[to].push(from);
            }
        }
        let mut co_reaches = alloc::vec![false; self.states.len()];
        let mut back = VecDeque::new();
        for &t in &self.formed_terminals {
            co_reaches[t] = true;
            back.push_back(t);
        }
        while let Some(id) = back.pop_front() {
            for &from in &reverse[id] {
                if !co_reaches[from] {
                    co_reaches[from] = true;
                    back.push_back(from);
                }
            }
        }
        if let Some(trapped) = co_reaches.iter().position(|&ok| !ok) {
            return ExploreOutcome::Counterexample {
                failure: ExploreFailure::Livelock,
                schedule: self.schedule_to(trapped, None),
            };
        }
        ExploreOutcome::AllRunsForm {
            states: self.states.len(),
            formed_terminals: self.formed_terminals.len(),
        }
    }

    /// Checks whether an all-idle state is quiescent (every fresh decision
    /// is a no-op). Returns `Ok(true)` when the state is terminal and was
    /// classified, `Ok(false)` when it still has live decisions, `Err` on
    /// a counterexample.
    fn classify_quiescent(&mut self, id: usize, state: &State) -> Result<bool, ExploreOutcome> {
        let n = state.positions.len();
        for r in 0..n {
            let decision = match self.decide(state, r) {
                Ok(d) => d,
                Err(failure) => {
                    return Err(ExploreOutcome::Counterexample {
                        failure,
                        schedule: self.schedule_to(id, Some(ExploreAction::Look(r))),
                    })
                }
            };
            if decision.color != state.colors[r] || decision.mv != MoveDir::None {
                return Ok(false);
            }
        }
        let all_done = state.colors.iter().all(|&c| c == Color::Done);
        if all_done && positions_form_pattern(&state.positions, &self.targets).is_some() {
            self.formed_terminals.push(id);
            return Ok(true);
        }
        let failure = if all_done {
            ExploreFailure::MonitorViolation {
                monitor: Monitor::FinishedOffTarget,
                robot: 0,
            }
        } else {
            ExploreFailure::Quiescent
        };
        Err(ExploreOutcome::Counterexample {
            failure,
            schedule: self.schedule_to(id, None),
        })
    }

    fn decide(&mut self, state: &State, r: RobotId) -> Result<Decision, ExploreFailure> {
        let view = build_local_view_cached(
            &state.positions,
            &state.colors,
            self.chirality[r],
            r,
            &mut self.cache,
        );
        transition(&view, &self.targets, &self.opts.protocol).map_err(|e| {
            let monitor = match e {
                ProtocolError::FrameConflict => Monitor::FrameAgreement,
                ProtocolError::MultipleLeaders => Monitor::UniqueWinner,
                ProtocolError::IllegalViewState | ProtocolError::NoLeaderVisible => {
                    Monitor::RuleDomain
                }
            };
            ExploreFailure::MonitorViolation { monitor, robot: r }
        })
    }

    fn apply(&mut self, state: &State, action: ExploreAction) -> Result<State, ExploreFailure> {
        let mut next = state.clone();
        match action {
            ExploreAction::Look(r) => {
                let decision = self.decide(state, r)?;
                next.pending[r] = Some((decision, 0));
            }
            ExploreAction::Commit(r) => {
                let (decision, _) = next.pending[r]
                    .take()
                    .expect("commit without held decision");
                for (q, slot) in next.pending.iter_mut().enumerate() {
                    if q != r {
                        if let Some((_, age)) = slot {
                            *age = age.saturating_add(1).min(self.opts.pending_window);
                        }
                    }
                }
                let from = next.colors[r];
                let mut lit_leader = false;
                if decision.color != from {
                    if !color_transition_allowed(from, decision.color) {
                        return Err(ExploreFailure::MonitorViolation {
                            monitor: Monitor::ColorDiscipline,
                            robot: r,
                        });
                    }
                    next.colors[r] = decision.color;
                    lit_leader = decision.color == Color::Leader;
                }
                if decision.mv != MoveDir::None {
                    let (dx, dy) = decision.mv.global_offset(self.chirality[r]);
                    let to = next.positions[r].offset(dx, dy);
                    if let Some(obstacle) = next
                        .positions
                        .iter()
                        .position(|&p| p == to)
                        .filter(|&q| q != r)
                    {
                        return Err(ExploreFailure::Collision {
                            moving: r,
                            obstacle,
                            at: to,
                        });
                    }
                    next.positions[r] = to;
                }
                let flips = if lit_leader {
                    alloc::vec![r]
                } else {
                    Vec::new()
                };
                if let Some((monitor, robot)) =
                    violated_state_monitor(&next.positions, &next.colors, &flips)
                {
                    return Err(ExploreFailure::MonitorViolation { monitor, robot });
                }
            }
        }
        Ok(next)
    }

    /// The scheduler choices from the initial state to `id`, optionally
    /// extended by the action that failed there.
    fn schedule_to(&self, id: usize, last: Option<ExploreAction>) -> Vec<ExploreAction> {
        let mut steps = Vec::new();
        let mut at = id;
        while let Some((prev, action)) = self.parent[at] {
            steps.push(action);
            at = prev;
        }
        steps.reverse();
        steps.extend(last);
        steps
    }
}
