//! Solvability of initial configurations, canonical embedding of the target
//! pattern into the coordinate frame anchored at the leader, and the
//! "pattern formed" predicate.
//!
//! Robots agree on the x-axis but not on the sign of y, so a configuration
//! that is mirror-symmetric about a horizontal axis through no robot is
//! unformable: the adversary can keep the two mirror halves perfectly
//! interchangeable forever. [`check_solvable`] rejects exactly those
//! configurations, and [`pattern_formed`] accepts a formation up to integer
//! translation and an optional global y-flip.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::geometry::{GridPoint, WorldConfig};

/// A target pattern as given: one grid point per robot, arbitrary absolute
/// coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TargetPattern {
    /// The pattern's points, in no particular order.
    pub points: Vec<GridPoint>,
}

impl TargetPattern {
    /// Builds a pattern from points.
    pub fn new(points: impl IntoIterator<Item = GridPoint>) -> Self {
        Self {
            points: points.into_iter().collect(),
        }
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// True when the pattern has no points.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Errors in pattern inputs.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PatternError {
    /// The same grid point appears twice.
    DuplicateTargetPoint(GridPoint),
    /// The pattern has no points.
    EmptyPattern,
}

impl fmt::Display for PatternError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternError::DuplicateTargetPoint(p) => {
                write!(f, "target point {p:?} appears more than once")
            }
            PatternError::EmptyPattern => f.write_str("target pattern is empty"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PatternError {}

/// The target pattern embedded into the formation frame and indexed in
/// service order.
///
/// Invariants established by [`embed_pattern`]:
/// * every point has `x >= 1` and `y >= 1`, with both minima attained;
/// * points are indexed top row first, and right-to-left within a row, so
///   the last point is the leftmost point of the lowest row — the spot
///   reserved for the robot that anchors the frame and moves last.
#[derive(Clone, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmbeddedTargets {
    points: Vec<GridPoint>,
}

impl EmbeddedTargets {
    /// The ordered target points.
    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    /// Number of targets.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// True when there are no targets.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The `i`-th target in service order.
    pub fn get(&self, i: usize) -> GridPoint {
        self.points[i]
    }
}

/// Embeds a pattern into the formation frame: translates it so the minimum
/// x and y coordinates both become 1, then orders the points top row first
/// and right-to-left within each row.
pub fn embed_pattern(pattern: &TargetPattern) -> Result<EmbeddedTargets, PatternError> {
    if pattern.points.is_empty() {
        return Err(PatternError::EmptyPattern);
    }
    let mut seen = BTreeSet::new();
    for &p in &pattern.points {
        if !seen.insert(p) {
            return Err(PatternError::DuplicateTargetPoint(p));
        }
    }
    let min_x = pattern.points.iter().map(|p| p.x).min().expect("nonempty");
    let min_y = pattern.points.iter().map(|p| p.y).min().expect("nonempty");
    let mut points: Vec<GridPoint> = pattern
        .points
        .iter()
        .map(|p| GridPoint::new(p.x - min_x + 1, p.y - min_y + 1))
        .collect();
    // Top row first; within a row, rightmost first.
    points.sort_by(|a, b| b.y.cmp(&a.y).then(b.x.cmp(&a.x)));
    Ok(EmbeddedTargets { points })
}

/// The verdict of [`check_solvable`] for an unformable configuration: the
/// horizontal mirror axis the robots can never break, reported as `2*y` so
/// half-integer axes stay exact.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Unsolvable {
    /// Twice the y-coordinate of the mirror axis.
    pub axis_two_y: i64,
}

impl fmt::Display for Unsolvable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "configuration is mirror-symmetric about the horizontal axis y = {}{} with no robot on it",
            self.axis_two_y / 2,
            if self.axis_two_y % 2 == 0 { "" } else { ".5" }
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Unsolvable {}

/// Checks whether arbitrary patterns are formable from `cfg`.
///
/// The configuration is rejected exactly when it is mirror-symmetric about
/// some horizontal line that passes through no robot: with one-axis
/// agreement the two halves can never be told apart. A symmetric
/// configuration with a robot *on* the axis is fine — that robot breaks the
/// tie. Only the candidate axis through the configuration's vertical center
/// needs testing: a mirror symmetry must map the point set onto itself, so
/// its axis sits at `(min_y + max_y) / 2`.
pub fn check_solvable(cfg: &WorldConfig) -> Result<(), Unsolvable> {
    let points: BTreeSet<GridPoint> = cfg.robots.iter().map(|r| r.pos).collect();
    let min_y = points.iter().map(|p| p.y).min().expect("validated config");
    let max_y = points.iter().map(|p| p.y).max().expect("validated config");
    let axis_two_y = min_y + max_y;
    let symmetric = points
        .iter()
        .all(|p| points.contains(&GridPoint::new(p.x, axis_two_y - p.y)));
    if !symmetric {
        return Ok(());
    }
    let robot_on_axis = points.iter().any(|p| 2 * p.y == axis_two_y);
    if robot_on_axis {
        Ok(())
    } else {
        Err(Unsolvable { axis_two_y })
    }
}

/// Whether the robot positions realize the embedded targets up to an
/// integer translation and an optional flip of the y-axis. Returns the flip
/// sign (`+1` or `-1`) of the first matching orientation, preferring `+1`.
pub fn pattern_formed(cfg: &WorldConfig, targets: &EmbeddedTargets) -> Option<i8> {
    let positions: Vec<GridPoint> = cfg.robots.iter().map(|r| r.pos).collect();
    positions_form_pattern(&positions, targets)
}

/// [`pattern_formed`] on a bare list of occupied cells.
pub fn positions_form_pattern(positions: &[GridPoint], targets: &EmbeddedTargets) -> Option<i8> {
    let positions: BTreeSet<GridPoint> = positions.iter().copied().collect();
    if positions.len() != targets.len() {
        return None;
    }
    for sigma in [1i64, -1] {
        let flipped: BTreeSet<GridPoint> = targets
            .points
            .iter()
            .map(|t| GridPoint::new(t.x, sigma * t.y))
            .collect();
        // Align the lexicographically smallest points of both sets; a match
        // under translation must map minimum to minimum.
        let pos_min = positions.iter().next().expect("nonempty");
        let t_min = flipped.iter().next().expect("nonempty");
        let (dx, dy) = (pos_min.x - t_min.x, pos_min.y - t_min.y);
        if flipped
            .iter()
            .all(|t| positions.contains(&GridPoint::new(t.x + dx, t.y + dy)))
        {
            return Some(sigma as i8);
        }
    }
    None
}
