//! Local views: what a single robot can deduce from one instantaneous
//! snapshot of the robots it can see.
//!
//! A view is egocentric. Positions are relative offsets `(dx, dy)` with the
//! viewer at the origin, `dx` in the globally agreed x-direction and `dy`
//! already multiplied by the viewer's private chirality, so "up" in a view
//! means the viewer's local up. All protocol rules consume these views and
//! nothing else; the simulator is the only code that ever touches global
//! coordinates.
//!
//! Beyond raw entries this module derives the handful of perceptions the
//! rules are phrased in: terminality on the own vertical line, the nearest
//! occupied vertical lines to the left and right, the midline of the unique
//! visible candidate pair ([`compute_k`]), occupancy bit-vectors of the two
//! half-lines around that midline ([`lambda_and_symmetry`]), and — once a
//! `leader` is visible — the shared coordinate frame it anchors
//! ([`infer_global_frame`]).

use alloc::vec::Vec;
use core::fmt;

use crate::geometry::{Chirality, ConfigError, GridPoint, RobotId, VisibilityCache, WorldConfig};
use crate::protocol::{Color, MoveDir};

/// One visible robot, in viewer-relative coordinates.
///
/// `dy` is expressed in the viewer's chirality: positive means the viewer's
/// local up.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ViewEntry {
    /// Offset along the agreed x-axis.
    pub dx: i64,
    /// Offset along the viewer's local y-axis.
    pub dy: i64,
    /// The robot's light as captured by the snapshot.
    pub color: Color,
}

/// An instantaneous local view: the viewer's own light plus every robot it
/// can see, sorted by `(dx, dy)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LocalView {
    /// The viewer's own light.
    pub self_color: Color,
    /// Visible robots, viewer excluded, sorted by `(dx, dy)`.
    pub others: Vec<ViewEntry>,
}

impl LocalView {
    /// Builds a view directly from entries (sorts them).
    pub fn new(self_color: Color, mut others: Vec<ViewEntry>) -> Self {
        others.sort_by_key(|e| (e.dx, e.dy));
        Self { self_color, others }
    }

    /// Entries on the vertical line `dx` columns away.
    pub fn on_line(&self, dx: i64) -> impl Iterator<Item = &ViewEntry> {
        self.others.iter().filter(move |e| e.dx == dx)
    }

    /// Entries on the viewer's own vertical line.
    pub fn own_line(&self) -> impl Iterator<Item = &ViewEntry> {
        self.on_line(0)
    }

    /// True when no robot is visible strictly to the left.
    pub fn left_open_half_empty(&self) -> bool {
        !self.others.iter().any(|e| e.dx < 0)
    }

    /// True when no other robot is visible at `dx <= 0` (closed left half).
    pub fn singleton_in_left_closed_half(&self) -> bool {
        !self.others.iter().any(|e| e.dx <= 0)
    }

    /// The nearest occupied vertical line strictly to the left, if any.
    pub fn li_dx(&self) -> Option<i64> {
        self.others.iter().filter(|e| e.dx < 0).map(|e| e.dx).max()
    }

    /// The nearest occupied vertical line strictly to the right, if any.
    pub fn ri_dx(&self) -> Option<i64> {
        self.others.iter().filter(|e| e.dx > 0).map(|e| e.dx).min()
    }

    /// Entries on the nearest occupied line to the left.
    pub fn li_entries(&self) -> impl Iterator<Item = &ViewEntry> {
        let dx = self.li_dx();
        self.others.iter().filter(move |e| Some(e.dx) == dx)
    }

    /// Entries on the nearest occupied line to the right.
    pub fn ri_entries(&self) -> impl Iterator<Item = &ViewEntry> {
        let dx = self.ri_dx();
        self.others.iter().filter(move |e| Some(e.dx) == dx)
    }

    /// True when the viewer is terminal on its own vertical line: it does
    /// not have visible own-line robots on both sides.
    pub fn is_terminal_on_own_line(&self) -> bool {
        let above = self.own_line().any(|e| e.dy > 0);
        let below = self.own_line().any(|e| e.dy < 0);
        !(above && below)
    }

    /// True when every robot on the nearest occupied line to the right is
    /// `off`; vacuously true when no line is occupied to the right.
    pub fn all_off_on_right_inner(&self) -> bool {
        self.ri_entries().all(|e| e.color == Color::Off)
    }

    /// True when some visible robot at `dx == +1` exists (the vertical line
    /// immediately to the right).
    pub fn right_adjacent_line_occupied(&self) -> bool {
        self.others.iter().any(|e| e.dx == 1)
    }

    /// True when the exact cell at `(dx, dy)` holds a visible robot.
    pub fn cell_occupied(&self, dx: i64, dy: i64) -> bool {
        self.others.iter().any(|e| e.dx == dx && e.dy == dy)
    }

    /// True when some visible robot shows `color`.
    pub fn sees_color(&self, color: Color) -> bool {
        self.others.iter().any(|e| e.color == color)
    }

    /// True when some entry on line `dx` shows `color`.
    pub fn line_has_color(&self, dx: i64, color: Color) -> bool {
        self.on_line(dx).any(|e| e.color == color)
    }
}

/// The horizontal midline of a visible candidate pair, stored as twice its
/// y-offset from the viewer so half-integer lines stay exact.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct KLine {
    /// Twice the midline's viewer-relative y-coordinate; equivalently the
    /// sum of the pair's `dy` values.
    pub two_y: i64,
}

impl KLine {
    /// Twice the signed distance of a view row `dy` from the midline.
    pub fn delta(&self, dy: i64) -> i64 {
        2 * dy - self.two_y
    }

    /// True when the view row `dy` lies exactly on the midline.
    pub fn on_axis(&self, dy: i64) -> bool {
        self.delta(dy) == 0
    }
}

/// Failure to locate the candidate-pair midline in a view.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum KError {
    /// No pair of `candidate`/`call`/`reached` robots is visible.
    NoCandidatePair,
    /// More than one plausible pair is visible — the midline is ambiguous.
    MoreThanOnePair,
}

impl fmt::Display for KError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KError::NoCandidatePair => f.write_str("no candidate pair visible"),
            KError::MoreThanOnePair => f.write_str("candidate pair is ambiguous"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for KError {}

fn is_pair_color(c: Color) -> bool {
    matches!(c, Color::Candidate | Color::Call | Color::Reached)
}

/// Locates the unique visible pair of election markers (`candidate`,
/// `call`, or `reached` lights, the viewer's own included) and returns
/// their midline. The two markers must share a vertical line; anything
/// other than exactly one such pair is an error.
pub fn compute_k(view: &LocalView) -> Result<KLine, KError> {
    let mut marks: Vec<(i64, i64)> = Vec::new();
    if is_pair_color(view.self_color) {
        marks.push((0, 0));
    }
    for e in &view.others {
        if is_pair_color(e.color) {
            marks.push((e.dx, e.dy));
        }
    }
    match marks.as_slice() {
        [] | [_] => Err(KError::NoCandidatePair),
        [(dx1, dy1), (dx2, dy2)] if dx1 == dx2 => Ok(KLine { two_y: dy1 + dy2 }),
        _ => Err(KError::MoreThanOnePair),
    }
}

/// Occupancy bit-vectors of the two half-lines of a vertical line around a
/// midline: `up[i]` is true when the `(i+1)`-th grid point above the
/// midline is occupied, and symmetrically for `down`. Both vectors have
/// equal length.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LambdaPair {
    /// Occupancy outward on the viewer's local up side.
    pub up: Vec<bool>,
    /// Occupancy outward on the viewer's local down side.
    pub down: Vec<bool>,
}

impl LambdaPair {
    /// True when the two half-lines mirror each other exactly.
    pub fn symmetric(&self) -> bool {
        self.up == self.down
    }
}

/// Computes the half-line occupancies of the vertical line `dx` columns
/// away (the viewer itself included when `dx == 0`) around the midline
/// `k`. A robot exactly on the midline belongs to neither half and is
/// skipped.
pub fn lambda_and_symmetry(view: &LocalView, dx: i64, k: KLine) -> LambdaPair {
    let mut deltas: Vec<i64> = view.on_line(dx).map(|e| k.delta(e.dy)).collect();
    if dx == 0 {
        deltas.push(k.delta(0));
    }
    // A row at |delta| = 2i (midline on a grid row) or 2i - 1 (midline
    // between rows) is the i-th grid point out from the midline.
    let level = |d: i64| ((d.unsigned_abs() + 1) / 2) as usize;
    let len = deltas
        .iter()
        .filter(|&&d| d != 0)
        .map(|&d| level(d))
        .max()
        .unwrap_or(0);
    let mut up = alloc::vec![false; len];
    let mut down = alloc::vec![false; len];
    for d in deltas {
        if d > 0 {
            up[level(d) - 1] = true;
        } else if d < 0 {
            down[level(d) - 1] = true;
        }
    }
    LambdaPair { up, down }
}

/// A half-plane relative to a midline, in the viewer's orientation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    /// The viewer's local up side.
    Up,
    /// The viewer's local down side.
    Down,
}

/// The lexicographically larger half of a [`LambdaPair`], or `None` when
/// the halves are equal. Both viewers of a pair agree on the winning half
/// as a set of robots, whatever their chiralities, because the bit-vectors
/// are compared outward from the midline.
pub fn dominant_side(pair: &LambdaPair) -> Option<Side> {
    use core::cmp::Ordering;
    match pair.up.cmp(&pair.down) {
        Ordering::Greater => Some(Side::Up),
        Ordering::Less => Some(Side::Down),
        Ordering::Equal => None,
    }
}

/// The coordinate frame anchored at a visible `leader`: the leader's cell
/// is `(0, -1)`, x runs in the agreed direction, and y points toward the
/// half-plane holding the other robots.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Frame {
    /// The leader's view-relative x offset.
    pub leader_dx: i64,
    /// The leader's view-relative y offset (viewer chirality).
    pub leader_dy: i64,
    /// `+1` when frame-up equals the viewer's local up, `-1` when it is
    /// the viewer's local down, `None` when every visible robot sits on
    /// the leader's row and the orientation is immaterial.
    pub y_sign: Option<i8>,
}

impl Frame {
    /// The frame orientation, defaulting to the viewer's local up when
    /// undetermined.
    pub fn sign(&self) -> i64 {
        self.y_sign.unwrap_or(1) as i64
    }

    /// Converts a view offset into frame coordinates.
    pub fn to_frame(&self, dx: i64, dy: i64) -> (i64, i64) {
        (dx - self.leader_dx, self.sign() * (dy - self.leader_dy) - 1)
    }

    /// The viewer's own frame coordinates.
    pub fn self_frame(&self) -> (i64, i64) {
        self.to_frame(0, 0)
    }

    /// The local move realizing a unit step along frame +y.
    pub fn frame_up(&self) -> MoveDir {
        if self.sign() >= 0 {
            MoveDir::LocalUp
        } else {
            MoveDir::LocalDown
        }
    }

    /// The local move realizing a unit step along frame -y.
    pub fn frame_down(&self) -> MoveDir {
        if self.sign() >= 0 {
            MoveDir::LocalDown
        } else {
            MoveDir::LocalUp
        }
    }

    /// The view offset `(dx, dy)` of a frame cell.
    pub fn from_frame(&self, fx: i64, fy: i64) -> (i64, i64) {
        (fx + self.leader_dx, self.sign() * (fy + 1) + self.leader_dy)
    }
}

/// Failure to anchor the shared frame in a view.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FrameError {
    /// No `leader` light is visible.
    NoLeaderVisible,
    /// Two or more `leader` lights are visible at once.
    MultipleLeaders,
    /// Visible robots lie strictly on both sides of the leader's row, so
    /// no consistent frame orientation exists.
    FrameConflict,
}

impl fmt::Display for FrameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameError::NoLeaderVisible => f.write_str("no leader visible"),
            FrameError::MultipleLeaders => f.write_str("multiple leaders visible"),
            FrameError::FrameConflict => f.write_str("robots on both sides of the leader row"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FrameError {}

/// Anchors the shared frame at the unique visible `leader`: frame y points
/// toward the side of the leader's row where the viewer and the other
/// visible robots live. Robots exactly on the row don't vote; mixed votes
/// are a [`FrameError::FrameConflict`].
pub fn infer_global_frame(view: &LocalView) -> Result<Frame, FrameError> {
    let mut leaders = view.others.iter().filter(|e| e.color == Color::Leader);
    let leader = leaders.next().ok_or(FrameError::NoLeaderVisible)?;
    if leaders.next().is_some() {
        return Err(FrameError::MultipleLeaders);
    }
    let (ldx, ldy) = (leader.dx, leader.dy);
    let mut sign: Option<i8> = None;
    let mut vote = |dy: i64| -> Result<(), FrameError> {
        let s = match (dy - ldy).signum() {
            0 => return Ok(()),
            d => d as i8,
        };
        match sign {
            None => {
                sign = Some(s);
                Ok(())
            }
            Some(prev) if prev == s => Ok(()),
            Some(_) => Err(FrameError::FrameConflict),
        }
    };
    vote(0)?; // the viewer itself
    for e in &view.others {
        if e.color != Color::Leader {
            vote(e.dy)?;
        }
    }
    Ok(Frame {
        leader_dx: ldx,
        leader_dy: ldy,
        y_sign: sign,
    })
}

/// Builds the local view of robot `id` from a full configuration, running
/// the visibility engine against every other robot.
pub fn build_local_view(cfg: &WorldConfig, id: RobotId) -> Result<LocalView, ConfigError> {
    let me = cfg.robot(id)?;
    let mut others = Vec::new();
    for other in &cfg.robots {
        if other.id == id {
            continue;
        }
        if crate::geometry::visible(cfg, id, other.id)? {
            others.push(ViewEntry {
                dx: other.pos.x - me.pos.x,
                dy: me.chirality.y_sign() * (other.pos.y - me.pos.y),
                color: other.color,
            });
        }
    }
    Ok(LocalView::new(me.color, others))
}

/// Builds the local view of robot `me` from parallel position/color slices
/// using a visibility cache. This is the simulator's fast path: positions
/// repeat heavily across activations, and the cache memoizes each relative
/// geometry once.
pub fn build_local_view_cached(
    positions: &[GridPoint],
    colors: &[Color],
    chirality: Chirality,
    me: usize,
    cache: &mut VisibilityCache,
) -> LocalView {
    debug_assert_eq!(positions.len(), colors.len());
    let mine = positions[me];
    let mut others = Vec::new();
    for other in 0..positions.len() {
        if other == me {
            continue;
        }
        if cache.visible_between(positions, me, other) {
            others.push(ViewEntry {
                dx: positions[other].x - mine.x,
                dy: chirality.y_sign() * (positions[other].y - mine.y),
                color: colors[other],
            });
        }
    }
    LocalView::new(colors[me], others)
}
