//! Pattern formation once a `leader` beacon is visible.
//!
//! The leader's cell anchors the shared frame at `(0, -1)`: x runs in the
//! agreed direction, y points toward the other robots. Formation has three
//! stages, all driven by the same stateless rules:
//!
//! 1. *Drain*: every leftover election light resets to `off` and every
//!    robot above the leader's row descends, one at a time, onto the
//!    leader's row, filling cells `(1, -1), (2, -1), ...` left to right.
//!    A strict corridor discipline — act only if the rows strictly between
//!    you and the leader's row are empty and you are the leftmost robot of
//!    your row — serializes the descents without any communication.
//! 2. *Lift*: once nothing unfinished remains above, the row robots peel
//!    off left to right. The `i`-th robot to leave sees the row remnant
//!    `{i+1, ..., n-1}`, deduces its own index, and climbs to its target,
//!    lighting `done` on arrival. The last one recognizes the empty row
//!    (with `done` lights in sight) and takes the last non-leader target.
//! 3. *Leader*: seeing only `done` lights, the leader localizes itself off
//!    the lowest-leftmost `done` robot and walks to the remaining target.
//!
//! Targets are indexed top row first and right to left within a row, so
//! cells fill from the top down and no traveler ever crosses an occupied
//! row. Each step re-derives everything from the current view; a robot
//! whose destination cell is visibly occupied simply waits.

use alloc::vec::Vec;

use crate::embedding::EmbeddedTargets;
use crate::protocol::view::{infer_global_frame, Frame, LocalView};
use crate::protocol::{Color, Decision, MoveDir, ProtocolError, ProtocolOptions};

/// Decides the next action of a robot that sees a `leader` (or is one).
pub fn phase2_transition(
    view: &LocalView,
    targets: &EmbeddedTargets,
    opts: &ProtocolOptions,
) -> Result<Decision, ProtocolError> {
    match view.self_color {
        Color::Leader => leader_rules(view, targets),
        Color::Off => off_rules(view, targets, opts),
        // Any election light that survives into the beacon era — parked
        // migrators always, pair lights after a raced round — is a
        // leftover: it resets to off and joins the drain queue.
        Color::Moving1 | Color::Candidate | Color::Terminal1 | Color::Call | Color::Reached => {
            reset_rules(view)
        }
        // The beacon is `leader1`'s own successor; a second one in the
        // beacon era means the election double-fired.
        Color::Leader1 => Err(ProtocolError::IllegalViewState),
        Color::Done => Ok(Decision::stay(Color::Done)),
    }
}

/// Frame coordinates of every visible non-leader robot.
fn frame_others<'v>(
    view: &'v LocalView,
    frame: &'v Frame,
) -> impl Iterator<Item = (i64, i64, Color)> + 'v {
    view.others.iter().filter_map(move |e| {
        if e.color == Color::Leader {
            None
        } else {
            let (fx, fy) = frame.to_frame(e.dx, e.dy);
            Some((fx, fy, e.color))
        }
    })
}

fn frame_cell_occupied(view: &LocalView, frame: &Frame, fx: i64, fy: i64) -> bool {
    let (dx, dy) = frame.from_frame(fx, fy);
    view.cell_occupied(dx, dy)
}

/// Emit `dir` unless the destination cell is visibly occupied; wait then.
fn unless_occupied(dir: MoveDir, dest: (i64, i64), view: &LocalView, frame: &Frame) -> MoveDir {
    if frame_cell_occupied(view, frame, dest.0, dest.1) {
        MoveDir::None
    } else {
        dir
    }
}

/// One step of the descent toward line cell `(col, -1)`: down the own
/// column to row 0, along row 0 to the column, then down into the line.
fn goto_line_step(view: &LocalView, frame: &Frame, from: (i64, i64), col: i64) -> MoveDir {
    let (fx, fy) = from;
    if fy > 0 {
        return unless_occupied(frame.frame_down(), (fx, fy - 1), view, frame);
    }
    debug_assert_eq!(fy, 0);
    if fx > col {
        unless_occupied(MoveDir::Left, (fx - 1, 0), view, frame)
    } else if fx < col {
        unless_occupied(MoveDir::Right, (fx + 1, 0), view, frame)
    } else {
        unless_occupied(frame.frame_down(), (col, -1), view, frame)
    }
}

/// One step of the climb toward target `t`: up the own column to the row
/// below the target, along it to the target's column, then up into it.
fn goto_target_step(view: &LocalView, frame: &Frame, from: (i64, i64), t: (i64, i64)) -> MoveDir {
    let (fx, fy) = from;
    if fy < t.1 - 1 {
        unless_occupied(frame.frame_up(), (fx, fy + 1), view, frame)
    } else if fy == t.1 - 1 {
        if fx > t.0 {
            unless_occupied(MoveDir::Left, (fx - 1, fy), view, frame)
        } else if fx < t.0 {
            unless_occupied(MoveDir::Right, (fx + 1, fy), view, frame)
        } else {
            unless_occupied(frame.frame_up(), (t.0, t.1), view, frame)
        }
    } else {
        // Above the approach row without being at the target: out of the
        // protocol's reachable states — hold and let the monitors decide.
        MoveDir::None
    }
}

/// Sorted frame x-coordinates of the robots on the leader's row.
fn line_row(view: &LocalView, frame: &Frame) -> Result<Vec<i64>, ProtocolError> {
    let mut row: Vec<i64> = Vec::new();
    for (fx, fy, _) in frame_others(view, frame) {
        if fy == -1 {
            if fx <= 0 {
                // Left of (or under) the beacon: no rule ever sends a
                // robot there.
                return Err(ProtocolError::IllegalViewState);
            }
            row.push(fx);
        }
    }
    row.sort_unstable();
    Ok(row)
}

/// `Some(i)` when `row` is exactly `{1, ..., i}` with `i >= 1`.
fn as_prefix(row: &[i64]) -> Option<usize> {
    if row.is_empty() {
        return None;
    }
    row.iter()
        .enumerate()
        .all(|(k, &x)| x == k as i64 + 1)
        .then_some(row.len())
}

/// `Some(i)` when `row` is exactly `{n-i, ..., n-1}` with `i >= 1`.
fn as_suffix(row: &[i64], n: usize) -> Option<usize> {
    if row.is_empty() {
        return None;
    }
    let start = n as i64 - row.len() as i64;
    row.iter()
        .enumerate()
        .all(|(k, &x)| x == start + k as i64)
        .then_some(row.len())
}

fn corridor_empty(view: &LocalView, frame: &Frame, self_fy: i64) -> bool {
    !frame_others(view, frame).any(|(_, fy, _)| (0..self_fy).contains(&fy))
}

fn leftmost_on_own_row(view: &LocalView, frame: &Frame, self_f: (i64, i64)) -> bool {
    !frame_others(view, frame).any(|(fx, fy, _)| fy == self_f.1 && fx < self_f.0)
}

fn off_rules(
    view: &LocalView,
    targets: &EmbeddedTargets,
    opts: &ProtocolOptions,
) -> Result<Decision, ProtocolError> {
    let frame = infer_global_frame(view)?;
    let self_f = frame.self_frame();
    let n = targets.len();

    if self_f.1 >= 0 {
        // Above the line: act only with exclusive claim to the airspace.
        if !leftmost_on_own_row(view, &frame, self_f) || !corridor_empty(view, &frame, self_f.1) {
            return Ok(Decision::stay(Color::Off));
        }
        let row = line_row(view, &frame)?;
        if row.is_empty() {
            return if view.sees_color(Color::Done) {
                // Line already dissolved: this is the last non-leader.
                let t = targets.get(n - 2);
                finish_or_climb(view, &frame, self_f, (t.x, t.y))
            } else {
                // Line not started: this robot founds it.
                Ok(Decision::new(
                    Color::Off,
                    goto_line_step(view, &frame, self_f, 1),
                ))
            };
        }
        if let Some(i) = as_prefix(&row) {
            // Line under construction: take the next cell.
            return Ok(Decision::new(
                Color::Off,
                goto_line_step(view, &frame, self_f, i as i64 + 1),
            ));
        }
        if let Some(i) = as_suffix(&row, n) {
            // Line dissolving: the remnant reveals this robot's index.
            let t = targets.get(n - i - 2);
            return finish_or_climb(view, &frame, self_f, (t.x, t.y));
        }
        return Err(ProtocolError::IllegalViewState);
    }

    debug_assert_eq!(self_f.1, -1);
    if self_f.0 <= 0 {
        return Err(ProtocolError::IllegalViewState);
    }
    // On the line: lift off once nothing unfinished remains above and —
    // under the default discipline — no line robot waits further left.
    let above_clear = !frame_others(view, &frame).any(|(_, fy, c)| fy >= 0 && c != Color::Done);
    let is_leftmost = !opts.liftoff_leftmost_only
        || !frame_others(view, &frame).any(|(fx, fy, _)| fy == -1 && fx < self_f.0);
    if above_clear && is_leftmost {
        return Ok(Decision::new(
            Color::Off,
            unless_occupied(frame.frame_up(), (self_f.0, 0), view, &frame),
        ));
    }
    Ok(Decision::stay(Color::Off))
}

/// `done` at the target cell, otherwise one climbing step toward it.
fn finish_or_climb(
    view: &LocalView,
    frame: &Frame,
    self_f: (i64, i64),
    t: (i64, i64),
) -> Result<Decision, ProtocolError> {
    if self_f == t {
        return Ok(Decision::stay(Color::Done));
    }
    Ok(Decision::new(
        Color::Off,
        goto_target_step(view, frame, self_f, t),
    ))
}

fn reset_rules(view: &LocalView) -> Result<Decision, ProtocolError> {
    let frame = infer_global_frame(view)?;
    let self_f = frame.self_frame();
    if self_f.1 < 0 {
        // Election lights never stand on the beacon's row.
        return Err(ProtocolError::IllegalViewState);
    }
    // Leftover election lights reset exactly like a descending off robot,
    // but only before any robot has finished — and under the same
    // exclusive-airspace discipline.
    if !leftmost_on_own_row(view, &frame, self_f)
        || !corridor_empty(view, &frame, self_f.1)
        || view.sees_color(Color::Done)
    {
        return Ok(Decision::stay(view.self_color));
    }
    let row = line_row(view, &frame)?;
    let col = match as_prefix(&row) {
        _ if row.is_empty() => 1,
        Some(i) => i as i64 + 1,
        None => return Ok(Decision::stay(view.self_color)),
    };
    Ok(Decision::new(
        Color::Off,
        goto_line_step(view, &frame, self_f, col),
    ))
}

fn leader_rules(view: &LocalView, targets: &EmbeddedTargets) -> Result<Decision, ProtocolError> {
    // The beacon holds its cell — and so the whole frame — until every
    // visible robot has finished.
    if view.others.iter().any(|e| e.color != Color::Done) || view.others.is_empty() {
        return Ok(Decision::stay(Color::Leader));
    }
    // Orient: the finished robots lie on one side. Robots sharing the
    // leader's row abstain — on arrival at a goal in the pattern's bottom
    // row the leader has row-mates, and with a single-row pattern the vote
    // can come back empty, in which case every formula below degrades to
    // the row itself (sign 0) and the arrival check still fires.
    let mut sign = 0i64;
    for e in &view.others {
        match e.dy.signum() {
            0 => {}
            s if sign == 0 => sign = s,
            s if s != sign => return Err(ProtocolError::FrameConflict),
            _ => {}
        }
    }
    let n = targets.len();
    // Localize off the lowest, then leftmost, finished robot: the service
    // order guarantees it occupies the last non-leader target.
    let anchor = view
        .others
        .iter()
        .min_by_key(|e| (sign * e.dy, e.dx))
        .expect("nonempty");
    let t_anchor = targets.get(n - 2);
    let self_f = (t_anchor.x - anchor.dx, t_anchor.y - sign * anchor.dy);
    let goal = targets.get(n - 1);
    if self_f == (goal.x, goal.y) {
        return Ok(Decision::stay(Color::Done));
    }
    // Walk: up to the empty row below the targets, across, then up into
    // the goal (its row is the pattern's lowest, so row 0 is free).
    let occupied = |fx: i64, fy: i64| {
        view.others
            .iter()
            .any(|e| self_f.0 + e.dx == fx && self_f.1 + sign * e.dy == fy)
    };
    let step = |dir: MoveDir, dest: (i64, i64)| {
        let dir = if occupied(dest.0, dest.1) {
            MoveDir::None
        } else {
            dir
        };
        Ok(Decision::new(Color::Leader, dir))
    };
    let up = if sign >= 0 {
        MoveDir::LocalUp
    } else {
        MoveDir::LocalDown
    };
    if self_f.1 < 0 {
        step(up, (self_f.0, self_f.1 + 1))
    } else if self_f.1 == 0 && self_f.0 > goal.x {
        step(MoveDir::Left, (self_f.0 - 1, 0))
    } else if self_f.1 == 0 && self_f.0 < goal.x {
        step(MoveDir::Right, (self_f.0 + 1, 0))
    } else if self_f.1 == 0 {
        step(up, (goal.x, goal.y))
    } else {
        // Off the planned path: hold rather than improvise.
        Ok(Decision::stay(Color::Leader))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{embed_pattern, TargetPattern};
    use crate::geometry::GridPoint;
    use crate::protocol::view::ViewEntry;
    use alloc::vec;
    use alloc::vec::Vec;

    fn entry(dx: i64, dy: i64, color: Color) -> ViewEntry {
        ViewEntry { dx, dy, color }
    }

    fn view(self_color: Color, others: Vec<ViewEntry>) -> LocalView {
        LocalView::new(self_color, others)
    }

    fn targets_n4() -> EmbeddedTargets {
        // t0 = (1,2), t1 = (3,1), t2 = (2,1), t3 = (1,1).
        embed_pattern(&TargetPattern::new([
            GridPoint::new(1, 2),
            GridPoint::new(3, 1),
            GridPoint::new(2, 1),
            GridPoint::new(1, 1),
        ]))
        .unwrap()
    }

    fn opts() -> ProtocolOptions {
        ProtocolOptions::default()
    }

    fn decide(v: &LocalView, t: &EmbeddedTargets) -> Decision {
        phase2_transition(v, t, &opts()).unwrap()
    }

    #[test]
    fn leftover_resets_and_descends() {
        // Leader three rows below-left; empty sky in between.
        let t = targets_n4();
        let v = view(Color::Moving1, vec![entry(-2, -3, Color::Leader)]);
        assert_eq!(
            decide(&v, &t),
            Decision::new(Color::Off, MoveDir::LocalDown)
        );
        // Same geometry for a viewer with the opposite handedness.
        let v = view(Color::Moving1, vec![entry(-2, 3, Color::Leader)]);
        assert_eq!(decide(&v, &t), Decision::new(Color::Off, MoveDir::LocalUp));
    }

    #[test]
    fn leftover_respects_corridor_and_done_guards() {
        let t = targets_n4();
        // A robot in the corridor (row 0 in frame terms) blocks the reset.
        let v = view(
            Color::Moving1,
            vec![entry(-2, -3, Color::Leader), entry(1, -2, Color::Off)],
        );
        assert_eq!(decide(&v, &t), Decision::stay(Color::Moving1));
        // A robot already finished blocks it too.
        let v = view(
            Color::Moving1,
            vec![entry(-2, -3, Color::Leader), entry(1, 1, Color::Done)],
        );
        assert_eq!(decide(&v, &t), Decision::stay(Color::Moving1));
        // A row mate further left goes first.
        let v = view(
            Color::Moving1,
            vec![entry(-2, -3, Color::Leader), entry(-1, 0, Color::Terminal1)],
        );
        assert_eq!(decide(&v, &t), Decision::stay(Color::Moving1));
    }

    #[test]
    fn descent_walks_column_row_then_drops() {
        let t = targets_n4();
        // Off robot at frame (2, 0), line row holding {1}: target col 2.
        // Frame: leader at dy -1 means s=+1, self fy 0.
        let v = view(
            Color::Off,
            vec![entry(-2, -1, Color::Leader), entry(-1, -1, Color::Off)],
        );
        // fx 2 == col 2: drop into (2,-1).
        assert_eq!(
            decide(&v, &t),
            Decision::new(Color::Off, MoveDir::LocalDown)
        );
        // Same but line row empty and no done: found the line at col 1.
        let v = view(Color::Off, vec![entry(-2, -1, Color::Leader)]);
        assert_eq!(decide(&v, &t), Decision::new(Color::Off, MoveDir::Left));
        // High above: descend the own column first.
        let v = view(Color::Off, vec![entry(-2, -4, Color::Leader)]);
        assert_eq!(
            decide(&v, &t),
            Decision::new(Color::Off, MoveDir::LocalDown)
        );
    }

    #[test]
    fn descent_waits_when_destination_is_taken() {
        let t = targets_n4();
        // Dropping into (1,-1) blocked by a robot already there… which
        // would make the row non-empty; instead block the horizontal step:
        // self at (3,0) heading to col 1 with a robot at (2,0)? That robot
        // would be in no corridor (same row) — but it is left of self, so
        // the leftmost gate holds self anyway.
        let v = view(
            Color::Off,
            vec![entry(-3, -1, Color::Leader), entry(-1, 0, Color::Off)],
        );
        assert_eq!(decide(&v, &t), Decision::stay(Color::Off));
    }

    #[test]
    fn lift_requires_clear_sky_and_leftmost_slot() {
        let t = targets_n4();
        // Row robot at (1,-1); mates at (2,-1), (3,-1); nothing above.
        let v = view(
            Color::Off,
            vec![
                entry(-1, 0, Color::Leader),
                entry(1, 0, Color::Off),
                entry(2, 0, Color::Off),
            ],
        );
        assert_eq!(decide(&v, &t), Decision::new(Color::Off, MoveDir::LocalUp));
        // The (2,-1) robot holds: a line mate waits further left.
        let v = view(
            Color::Off,
            vec![
                entry(-2, 0, Color::Leader),
                entry(-1, 0, Color::Off),
                entry(1, 0, Color::Off),
            ],
        );
        assert_eq!(decide(&v, &t), Decision::stay(Color::Off));
        // …but lifts under the permissive discipline.
        let relaxed = ProtocolOptions {
            liftoff_leftmost_only: false,
        };
        let d = phase2_transition(&v, &t, &relaxed).unwrap();
        assert_eq!(d, Decision::new(Color::Off, MoveDir::LocalUp));
        // An unfinished robot overhead blocks the lift even when leftmost.
        let v = view(
            Color::Off,
            vec![
                entry(-1, 0, Color::Leader),
                entry(1, 0, Color::Off),
                entry(0, 3, Color::Moving1),
            ],
        );
        assert_eq!(decide(&v, &t), Decision::stay(Color::Off));
        // A finished robot overhead does not.
        let v = view(
            Color::Off,
            vec![
                entry(-1, 0, Color::Leader),
                entry(1, 0, Color::Off),
                entry(0, 3, Color::Done),
            ],
        );
        assert_eq!(decide(&v, &t), Decision::new(Color::Off, MoveDir::LocalUp));
    }

    #[test]
    fn lifted_robot_reads_its_index_from_the_remnant() {
        let t = targets_n4();
        // Self at (1,0); remnant {2,3} of n=4 is the full suffix: index 0,
        // so the target is t0 = (1,2); from (1,0) climb to the approach row.
        let v = view(
            Color::Off,
            vec![
                entry(-1, -1, Color::Leader),
                entry(1, -1, Color::Off),
                entry(2, -1, Color::Off),
            ],
        );
        assert_eq!(decide(&v, &t), Decision::new(Color::Off, MoveDir::LocalUp));
        // Self at (1,1) = approach row of t0: already at its column: climb in.
        let v = view(
            Color::Off,
            vec![
                entry(-1, -2, Color::Leader),
                entry(1, -2, Color::Off),
                entry(2, -2, Color::Off),
            ],
        );
        assert_eq!(decide(&v, &t), Decision::new(Color::Off, MoveDir::LocalUp));
        // Arrived at t0 = (1,2): light done.
        let v = view(
            Color::Off,
            vec![
                entry(-1, -3, Color::Leader),
                entry(1, -3, Color::Off),
                entry(2, -3, Color::Off),
            ],
        );
        assert_eq!(decide(&v, &t), Decision::stay(Color::Done));
    }

    #[test]
    fn second_lifter_takes_the_next_target() {
        let t = targets_n4();
        // Self lifted to (2,0); remnant {3}: suffix of length 1 → index 1,
        // target t1 = (3,1); approach row is 0: step right.
        let v = view(
            Color::Off,
            vec![
                entry(-2, -1, Color::Leader),
                entry(1, -1, Color::Off),
                entry(-1, 3, Color::Done),
            ],
        );
        assert_eq!(decide(&v, &t), Decision::new(Color::Off, MoveDir::Right));
    }

    #[test]
    fn last_robot_recognizes_the_dissolved_line() {
        let t = targets_n4();
        // Row empty, finished robots visible: head to t_{n-2} = (2,1).
        // Self at (3,0): step left along the approach row.
        let v = view(
            Color::Off,
            vec![
                entry(-3, -1, Color::Leader),
                entry(-2, 2, Color::Done),
                entry(0, 1, Color::Done),
            ],
        );
        assert_eq!(decide(&v, &t), Decision::new(Color::Off, MoveDir::Left));
    }

    #[test]
    fn malformed_row_is_a_fault() {
        let t = targets_n4();
        // Row holds {2} while n = 4: neither prefix nor suffix.
        let v = view(
            Color::Off,
            vec![entry(-1, -2, Color::Leader), entry(1, -2, Color::Off)],
        );
        assert_eq!(
            phase2_transition(&v, &t, &opts()),
            Err(ProtocolError::IllegalViewState)
        );
        // A robot left of the beacon on its row is always a fault.
        let v = view(
            Color::Off,
            vec![entry(-2, -2, Color::Leader), entry(-3, -2, Color::Off)],
        );
        assert_eq!(
            phase2_transition(&v, &t, &opts()),
            Err(ProtocolError::IllegalViewState)
        );
    }

    #[test]
    fn raced_pair_lights_reset_like_any_leftover() {
        let t = targets_n4();
        for c in [Color::Call, Color::Reached] {
            let v = view(c, vec![entry(-1, -3, Color::Leader)]);
            assert_eq!(
                phase2_transition(&v, &t, &opts()).unwrap(),
                Decision::new(Color::Off, MoveDir::LocalDown)
            );
        }
    }

    #[test]
    fn second_winner_in_the_beacon_era_is_a_fault() {
        let t = targets_n4();
        let v = view(Color::Leader1, vec![entry(-1, -2, Color::Leader)]);
        assert_eq!(
            phase2_transition(&v, &t, &opts()),
            Err(ProtocolError::IllegalViewState)
        );
    }

    #[test]
    fn leader_waits_until_everyone_finished() {
        let t = targets_n4();
        let v = view(
            Color::Leader,
            vec![entry(1, 2, Color::Done), entry(2, 1, Color::Off)],
        );
        assert_eq!(decide(&v, &t), Decision::stay(Color::Leader));
    }

    #[test]
    fn leader_walks_to_the_last_target() {
        let t = targets_n4();
        // Dones at t0 (1,2), t1 (3,1), t2 (2,1) with the leader at (0,-1):
        // view offsets are +1 in y relative to frame rows.
        let v = view(
            Color::Leader,
            vec![
                entry(1, 3, Color::Done),
                entry(3, 2, Color::Done),
                entry(2, 2, Color::Done),
            ],
        );
        // First step: up from (0,-1) to (0,0).
        assert_eq!(
            decide(&v, &t),
            Decision::new(Color::Leader, MoveDir::LocalUp)
        );
        // Mid-walk at (0,0): step right toward goal column 1.
        let v = view(
            Color::Leader,
            vec![
                entry(1, 2, Color::Done),
                entry(3, 1, Color::Done),
                entry(2, 1, Color::Done),
            ],
        );
        assert_eq!(decide(&v, &t), Decision::new(Color::Leader, MoveDir::Right));
        // At (1,0): climb into the goal t3 = (1,1).
        let v = view(
            Color::Leader,
            vec![
                entry(0, 2, Color::Done),
                entry(2, 1, Color::Done),
                entry(1, 1, Color::Done),
            ],
        );
        assert_eq!(
            decide(&v, &t),
            Decision::new(Color::Leader, MoveDir::LocalUp)
        );
        // At the goal: finish.
        let v = view(
            Color::Leader,
            vec![
                entry(0, 1, Color::Done),
                entry(2, 0, Color::Done),
                entry(1, 0, Color::Done),
            ],
        );
        assert_eq!(decide(&v, &t), Decision::stay(Color::Done));
    }

    #[test]
    fn leader_with_chirality_minus_population() {
        let t = targets_n4();
        // Same world as the first leader step, seen with inverted local y.
        let v = view(
            Color::Leader,
            vec![
                entry(1, -3, Color::Done),
                entry(3, -2, Color::Done),
                entry(2, -2, Color::Done),
            ],
        );
        assert_eq!(
            decide(&v, &t),
            Decision::new(Color::Leader, MoveDir::LocalDown)
        );
    }

    #[test]
    fn leader_conflicting_population_is_a_fault() {
        let t = targets_n4();
        let v = view(
            Color::Leader,
            vec![entry(1, 2, Color::Done), entry(2, -1, Color::Done)],
        );
        assert_eq!(
            phase2_transition(&v, &t, &opts()),
            Err(ProtocolError::FrameConflict)
        );
    }
}
