//! The distributed pattern-formation protocol.
//!
//! Every robot repeatedly runs look–compute–move cycles: it snapshots the
//! robots it can see ([`view::LocalView`]), feeds the snapshot to the pure
//! transition function [`transition`], and later commits the returned
//! [`Decision`] (a new light color plus a unit move). All coordination
//! happens through the nine visible light colors; there is no other
//! communication and no persistent memory besides the light.
//!
//! The protocol has two phases, dispatched purely on what a robot sees:
//!
//! * [`phase1`] — leader election. Robots on the boundary of their vertical
//!   line negotiate a unique leader using the colors
//!   `terminal1 → candidate → call/reached → leader1 → leader`, with
//!   `moving1` marking robots migrating off contested lines.
//! * [`phase2`] — formation. Once a `leader` light is visible, every robot
//!   can reconstruct a common coordinate frame from it and walks to its
//!   assigned target, switching to `done` on arrival; the leader moves last.

pub mod phase1;
pub mod phase2;
pub mod view;

use core::fmt;

pub use view::{
    build_local_view, compute_k, dominant_side, infer_global_frame, lambda_and_symmetry, Frame,
    FrameError, KError, KLine, LocalView, Side, ViewEntry,
};

/// The nine light colors of the protocol.
///
/// `Off` is the initial color; `Done` is terminal. The election colors are
/// `Terminal1`, `Candidate`, `Call`, `Moving1`, `Reached`, `Leader1`; the
/// formation phase runs under a unique `Leader`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Color {
    /// Initial color; also the color of robots travelling in the formation
    /// phase.
    Off,
    /// Terminal robot of a vertical line volunteering for election.
    Terminal1,
    /// Member of the unique closest candidate pair of its line.
    Candidate,
    /// Candidate calling the robots of the next line over to its side.
    Call,
    /// Robot migrating off a line that lost the election round.
    Moving1,
    /// Former caller acknowledging that all summoned robots arrived.
    Reached,
    /// Provisional leader clearing space to its left.
    Leader1,
    /// The unique elected leader anchoring the global frame.
    Leader,
    /// Robot parked on its final target.
    Done,
}

impl Color {
    /// All colors in serialization order.
    pub const ALL: [Color; 9] = [
        Color::Off,
        Color::Terminal1,
        Color::Candidate,
        Color::Call,
        Color::Moving1,
        Color::Reached,
        Color::Leader1,
        Color::Leader,
        Color::Done,
    ];

    /// Canonical lowercase name, stable across versions.
    pub const fn name(self) -> &'static str {
        match self {
            Color::Off => "off",
            Color::Terminal1 => "terminal1",
            Color::Candidate => "candidate",
            Color::Call => "call",
            Color::Moving1 => "moving1",
            Color::Reached => "reached",
            Color::Leader1 => "leader1",
            Color::Leader => "leader",
            Color::Done => "done",
        }
    }

    /// Parses a canonical color name.
    pub fn parse(s: &str) -> Option<Color> {
        Color::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The move part of a decision, in the deciding robot's own terms: the
/// horizontal axis is shared by all robots, the vertical axis is private
/// (see [`crate::geometry::Chirality`]).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MoveDir {
    /// Stay put.
    #[default]
    None,
    /// One cell toward smaller x.
    Left,
    /// One cell toward larger x.
    Right,
    /// One cell toward the robot's private "up".
    LocalUp,
    /// One cell toward the robot's private "down".
    LocalDown,
}

impl MoveDir {
    /// The global grid offset of this move for a robot of the given
    /// chirality.
    pub const fn global_offset(self, chirality: crate::geometry::Chirality) -> (i64, i64) {
        match self {
            MoveDir::None => (0, 0),
            MoveDir::Left => (-1, 0),
            MoveDir::Right => (1, 0),
            MoveDir::LocalUp => (0, chirality.y_sign()),
            MoveDir::LocalDown => (0, -chirality.y_sign()),
        }
    }

    /// Short stable tag used in traces: `N`, `L`, `R`, `U`, `D`.
    pub const fn tag(self) -> &'static str {
        match self {
            MoveDir::None => "N",
            MoveDir::Left => "L",
            MoveDir::Right => "R",
            MoveDir::LocalUp => "U",
            MoveDir::LocalDown => "D",
        }
    }
}

/// Output of one compute step: the color to show and the move to make. Both
/// are committed atomically when the robot's move event fires, possibly long
/// after the snapshot that produced them.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Decision {
    /// Color to show from the move on.
    pub color: Color,
    /// Unit move to perform, in the deciding robot's local terms.
    pub mv: MoveDir,
}

impl Decision {
    /// Builds a decision.
    pub const fn new(color: Color, mv: MoveDir) -> Self {
        Self { color, mv }
    }

    /// A decision that keeps the color and stays put.
    pub const fn stay(color: Color) -> Self {
        Self {
            color,
            mv: MoveDir::None,
        }
    }
}

/// Tunable protocol details. The defaults implement the full protocol;
/// loosening a knob deliberately weakens a guard so the explorer can exhibit
/// the failure the guard prevents.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ProtocolOptions {
    /// Keep the rule that only the leftmost non-leader robot of the
    /// leader's row may lift off toward its target. Disabling it allows two
    /// robots of the bottom row to depart concurrently, which breaks the
    /// formation phase under asynchrony.
    pub liftoff_leftmost_only: bool,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self {
            liftoff_leftmost_only: true,
        }
    }
}

/// Errors a transition can raise. These indicate a view no reachable
/// execution should produce; the simulator surfaces them as monitor
/// violations rather than panicking.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ProtocolError {
    /// The view matches no rule of the current phase.
    IllegalViewState,
    /// Robots visible on both sides of the leader's row while inferring the
    /// global frame.
    FrameConflict,
    /// The formation phase ran without a visible leader.
    NoLeaderVisible,
    /// More than one leader-colored robot in view.
    MultipleLeaders,
}

impl fmt::Display for ProtocolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolError::IllegalViewState => f.write_str("view matches no protocol rule"),
            ProtocolError::FrameConflict => {
                f.write_str("robots on both sides of the leader row: frame undecidable")
            }
            ProtocolError::NoLeaderVisible => {
                f.write_str("formation step without a visible leader")
            }
            ProtocolError::MultipleLeaders => f.write_str("more than one leader in view"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ProtocolError {}

impl From<view::FrameError> for ProtocolError {
    fn from(e: view::FrameError) -> Self {
        match e {
            view::FrameError::NoLeaderVisible => ProtocolError::NoLeaderVisible,
            view::FrameError::MultipleLeaders => ProtocolError::MultipleLeaders,
            view::FrameError::FrameConflict => ProtocolError::FrameConflict,
        }
    }
}

/// The full transition function: picks the phase from the view and runs it.
///
/// A robot runs the formation phase exactly when it is the leader itself or
/// sees a `leader` light; otherwise it runs the election phase. `targets`
/// are the embedded pattern points (needed only by the formation phase) and
/// `n` is the total number of robots.
pub fn transition(
    view: &LocalView,
    targets: &crate::embedding::EmbeddedTargets,
    opts: &ProtocolOptions,
) -> Result<Decision, ProtocolError> {
    if view.self_color == Color::Done {
        return Ok(Decision::stay(Color::Done));
    }
    let leader_in_sight =
        view.self_color == Color::Leader || view.others.iter().any(|e| e.color == Color::Leader);
    if leader_in_sight {
        phase2::phase2_transition(view, targets, opts)
    } else {
        phase1::phase1_transition(view)
    }
}

/// Whether the protocol ever changes a light from `from` directly to `to`.
/// Self-loops are always legal. The simulator's transition monitor checks
/// every committed color change against this relation.
pub fn color_transition_allowed(from: Color, to: Color) -> bool {
    use Color::*;
    if from == to {
        return true;
    }
    matches!(
        (from, to),
        // Election entry and exits.
        (Off, Terminal1) | (Off, Moving1) | (Off, Leader1) | (Off, Done)
            | (Terminal1, Candidate)
            | (Candidate, Leader1) | (Candidate, Call)
            | (Call, Reached)
            | (Moving1, Off)
            | (Reached, Candidate)
            | (Leader1, Leader)
            | (Leader, Done)
            // Leftover election lights re-absorbed by the formation phase.
            | (Terminal1, Off) | (Candidate, Off) | (Call, Off) | (Reached, Off)
    )
}
