//! Leader election for robots that see no `leader` light yet.
//!
//! The election walks the configuration's vertical lines from the left. The
//! two terminal robots of the leftmost line step one cell further left and
//! become the *pair* (`candidate`/`call`/`reached` lights), defining the
//! horizontal midline K between them. Each line to the pair's right either
//! breaks the up/down symmetry — electing a `leader1` in the dominant half
//! or exactly on K — or is perfectly symmetric, in which case its robots
//! turn `moving1`, travel around the pair, and park on the far left while
//! the pair moves on to the next line. The elected `leader1` finally walks
//! left out of the crowd and lights `leader`, anchoring the shared frame.
//!
//! Every rule reads only the local view. Rules are ordered; the first match
//! wins and anything else is a deliberate no-op (the robot waits).

use crate::protocol::view::{compute_k, dominant_side, lambda_and_symmetry, LocalView, Side};
use crate::protocol::{Color, Decision, MoveDir, ProtocolError};

/// Decides the next action of a robot that cannot see a `leader`.
pub fn phase1_transition(view: &LocalView) -> Result<Decision, ProtocolError> {
    match view.self_color {
        Color::Off => off_rules(view),
        Color::Terminal1 => terminal1_rules(view),
        Color::Candidate => candidate_rules(view),
        Color::Moving1 => moving1_rules(view),
        Color::Call => call_rules(view),
        Color::Reached => reached_rules(view),
        Color::Leader1 => leader1_rules(view),
        // A leader or finished robot never runs election rules; keep them
        // inert if dispatch ever sends one here.
        Color::Leader | Color::Done => Ok(Decision::stay(view.self_color)),
    }
}

fn off_rules(view: &LocalView) -> Result<Decision, ProtocolError> {
    // A migration cascades outward along the line. This must be checked
    // before volunteering: the topmost robot of a migrating line can have
    // the calling pair occluded by its own-line neighbour and would
    // otherwise see itself as a leftmost terminal. The cascade only makes
    // sense while the migration is live, which this robot recognizes by
    // the nearest left line being the calling pair itself (possibly fully
    // occluded, hence "no left line" counts) — any other left sight
    // (a finished round's marks, parked migrators, plain bystanders) means
    // the own-line neighbour is a leftover, not a mid-flight migrant, and
    // relighting would strand this robot in a stale state.
    let li_is_call = match view.li_dx() {
        None => true,
        Some(dx) => view.line_has_color(dx, Color::Call),
    };
    if view.line_has_color(0, Color::Moving1) && li_is_call && !view.sees_color(Color::Leader1) {
        return Ok(Decision::stay(Color::Moving1));
    }

    // Terminal robot of the leftmost occupied line, with no election
    // winner in sight: volunteer as a pair endpoint.
    let leader1_nearby = view.line_has_color(0, Color::Leader1)
        || view
            .ri_dx()
            .is_some_and(|dx| view.line_has_color(dx, Color::Leader1));
    if view.left_open_half_empty() && !leader1_nearby && view.is_terminal_on_own_line() {
        return Ok(Decision::stay(Color::Terminal1));
    }

    // A calling pair on the nearest left line asks this line to resolve:
    // the robot nearest their midline reacts first — it either wins on the
    // midline or starts the line's migration. A visible winner anywhere
    // freezes this: a pair whose stand-down lags (the call may have been
    // decided on a snapshot taken just before the winner lit up) must not
    // recruit a second election.
    let li: alloc::vec::Vec<_> = view.li_entries().collect();
    if li.len() == 2
        && li.iter().all(|e| e.color == Color::Call)
        && !view.sees_color(Color::Leader1)
    {
        let k = compute_k(view).map_err(|_| ProtocolError::IllegalViewState)?;
        let mine = k.delta(0).abs();
        let closest = view.own_line().all(|e| k.delta(e.dy).abs() >= mine);
        if closest {
            return if k.on_axis(0) {
                Ok(Decision::stay(Color::Leader1))
            } else {
                Ok(Decision::stay(Color::Moving1))
            };
        }
    }

    Ok(Decision::stay(Color::Off))
}

fn terminal1_rules(view: &LocalView) -> Result<Decision, ProtocolError> {
    // Nothing to the left: step out of the configuration and found the
    // pair's own line.
    if view.left_open_half_empty() {
        return Ok(Decision::new(Color::Candidate, MoveDir::Left));
    }
    // Someone else founded it first: stand down.
    if view
        .li_dx()
        .is_some_and(|dx| view.line_has_color(dx, Color::Candidate))
    {
        return Ok(Decision::stay(Color::Off));
    }
    Ok(Decision::stay(Color::Terminal1))
}

fn candidate_rules(view: &LocalView) -> Result<Decision, ProtocolError> {
    // Everyone else has drained away: the candidate itself wins.
    if view.singleton_in_left_closed_half() && view.all_off_on_right_inner() {
        return Ok(Decision::stay(Color::Leader1));
    }

    // Pair formed and the next line to the right is quiescent: test that
    // line's symmetry about the pair midline.
    let partner_visible = view
        .own_line()
        .any(|e| matches!(e.color, Color::Candidate | Color::Call));
    if partner_visible && view.is_terminal_on_own_line() && view.all_off_on_right_inner() {
        let k = compute_k(view).map_err(|_| ProtocolError::IllegalViewState)?;
        if let Some(ri) = view.ri_dx() {
            let lambda = lambda_and_symmetry(view, ri, k);
            if lambda.symmetric() {
                return Ok(Decision::stay(Color::Call));
            }
            let side = dominant_side(&lambda).expect("asymmetric lambda has a winner");
            // The candidate below the midline has two_y > 0 (its partner is
            // above) and owns the Down side, and vice versa.
            let self_dominant = match side {
                Side::Up => k.two_y < 0,
                Side::Down => k.two_y > 0,
            };
            if self_dominant {
                return Ok(Decision::stay(Color::Leader1));
            }
            return Ok(Decision::stay(Color::Candidate));
        }
        // No line left to examine: announce and wait. Reachable only from
        // configurations whose every line is midline-symmetric, which are
        // rejected as unformable before a run starts.
        return Ok(Decision::stay(Color::Call));
    }

    // The election concluded: a winner is in sight (usually the partner
    // itself, but stale interleavings can park the winner further away).
    if view.sees_color(Color::Leader1) {
        return Ok(Decision::stay(Color::Off));
    }

    Ok(Decision::stay(Color::Candidate))
}

fn moving1_rules(view: &LocalView) -> Result<Decision, ProtocolError> {
    let li_call = view
        .li_dx()
        .is_some_and(|dx| view.line_has_color(dx, Color::Call));
    let li_reached = view
        .li_dx()
        .is_some_and(|dx| view.line_has_color(dx, Color::Reached));

    // In transit toward the calling pair.
    if li_call && !li_reached && view.is_terminal_on_own_line() {
        let straddles =
            view.li_entries().any(|e| e.dy >= 0) && view.li_entries().any(|e| e.dy <= 0);
        if straddles {
            // The nearest left line blocks a straight pass: slide vertically
            // out of its span, away from the rest of the own line.
            return Ok(Decision::new(Color::Moving1, vertical_escape(view)));
        }
        return Ok(Decision::new(Color::Moving1, MoveDir::Left));
    }

    // The pair has acknowledged everyone's arrival: file off to the left
    // and park. If the exit cell is taken by an earlier parker, slide
    // along the own line until a free exit row appears.
    if view.line_has_color(0, Color::Reached) && view.all_off_on_right_inner() {
        if !view.cell_occupied(-1, 0) {
            return Ok(Decision::new(Color::Moving1, MoveDir::Left));
        }
        if view.is_terminal_on_own_line() && view.own_line().next().is_some() {
            return Ok(Decision::new(Color::Moving1, vertical_escape(view)));
        }
        return Ok(Decision::stay(Color::Moving1));
    }

    // The round finished without this robot: rejoin the electorate.
    if view.li_dx().is_some_and(|dx| {
        view.line_has_color(dx, Color::Reached) || view.line_has_color(dx, Color::Candidate)
    }) {
        return Ok(Decision::stay(Color::Off));
    }

    // Parked west of the pair with a later wave's migrator filing onto this
    // row from the east: shuffle one cell further west so the exit row frees
    // up. Robots near the live round never match — they still see one of the
    // pair's marks on their own line or somewhere to their left.
    let marks = [Color::Call, Color::Reached, Color::Candidate];
    let own_marked = marks.iter().any(|&c| view.line_has_color(0, c));
    let li_marked = view
        .li_dx()
        .is_some_and(|dx| marks.iter().any(|&c| view.line_has_color(dx, c)));
    let pushed_from_east = view
        .others
        .iter()
        .any(|e| e.dx == 1 && e.dy == 0 && e.color == Color::Moving1);
    if !own_marked && !li_marked && pushed_from_east && !view.cell_occupied(-1, 0) {
        return Ok(Decision::new(Color::Moving1, MoveDir::Left));
    }

    Ok(Decision::stay(Color::Moving1))
}

/// One vertical step away from the nearest own-line robot; local up when
/// the own line is otherwise empty.
fn vertical_escape(view: &LocalView) -> MoveDir {
    let nearest = view.own_line().min_by_key(|e| e.dy.abs());
    match nearest {
        Some(e) if e.dy > 0 => MoveDir::LocalDown,
        Some(_) => MoveDir::LocalUp,
        None => MoveDir::LocalUp,
    }
}

fn call_rules(view: &LocalView) -> Result<Decision, ProtocolError> {
    // The summoned line has fully arrived (migrators joined this line and
    // every line between has drained).
    let arrivals = view.line_has_color(0, Color::Moving1) || view.line_has_color(0, Color::Reached);
    if arrivals && view.all_off_on_right_inner() {
        return Ok(Decision::stay(Color::Reached));
    }
    // A winner emerged (on the midline, or — after a raced round — already
    // marching west): stand down.
    if view.sees_color(Color::Leader1) {
        return Ok(Decision::stay(Color::Off));
    }
    Ok(Decision::stay(Color::Call))
}

fn reached_rules(view: &LocalView) -> Result<Decision, ProtocolError> {
    // A round can be won and acknowledged concurrently: the midline robot
    // and the pair may both act on snapshots of the same instant. If a
    // winner is in sight the acknowledgement is void — stand down instead
    // of restarting the election on the next line.
    if view.sees_color(Color::Leader1) {
        return Ok(Decision::stay(Color::Off));
    }
    // Migration round complete: revert to candidate and examine the next
    // line. The terminality check waits out migrators still filing off.
    let partner = view
        .own_line()
        .any(|e| matches!(e.color, Color::Reached | Color::Candidate));
    if partner && view.is_terminal_on_own_line() && view.all_off_on_right_inner() {
        return Ok(Decision::stay(Color::Candidate));
    }
    Ok(Decision::stay(Color::Reached))
}

fn leader1_rules(view: &LocalView) -> Result<Decision, ProtocolError> {
    let crowded_left = !view.singleton_in_left_closed_half();
    if crowded_left || view.right_adjacent_line_occupied() {
        // March west, but only after the pair remnants have stood down:
        // a live call or a candidate sharing the line still needs to see
        // this light where it is.
        let li_call = view
            .li_dx()
            .is_some_and(|dx| view.line_has_color(dx, Color::Call));
        let own_candidate = view.line_has_color(0, Color::Candidate);
        if !li_call && !own_candidate {
            return Ok(Decision::new(Color::Leader1, MoveDir::Left));
        }
        return Ok(Decision::stay(Color::Leader1));
    }
    // Isolated on the far left with a one-column buffer: climb until every
    // other robot lies strictly on one side, then switch the beacon on.
    let above = view.others.iter().any(|e| e.dy >= 0);
    let below = view.others.iter().any(|e| e.dy <= 0);
    if above && below {
        return Ok(Decision::new(Color::Leader1, MoveDir::LocalUp));
    }
    Ok(Decision::stay(Color::Leader))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::view::ViewEntry;
    use alloc::vec;
    use alloc::vec::Vec;

    fn entry(dx: i64, dy: i64, color: Color) -> ViewEntry {
        ViewEntry { dx, dy, color }
    }

    fn view(self_color: Color, others: Vec<ViewEntry>) -> LocalView {
        LocalView::new(self_color, others)
    }

    fn decide(v: &LocalView) -> Decision {
        phase1_transition(v).unwrap()
    }

    #[test]
    fn leftmost_terminal_volunteers() {
        let v = view(
            Color::Off,
            vec![entry(0, 1, Color::Off), entry(1, 0, Color::Off)],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Terminal1));
    }

    #[test]
    fn mid_line_robot_does_not_volunteer() {
        let v = view(
            Color::Off,
            vec![entry(0, 1, Color::Off), entry(0, -1, Color::Off)],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Off));
    }

    #[test]
    fn visible_winner_suppresses_volunteering() {
        let v = view(Color::Off, vec![entry(0, 2, Color::Leader1)]);
        assert_eq!(decide(&v), Decision::stay(Color::Off));
        let v = view(Color::Off, vec![entry(2, 1, Color::Leader1)]);
        assert_eq!(decide(&v), Decision::stay(Color::Off));
    }

    #[test]
    fn called_robot_on_midline_wins() {
        // Calls at rows +-1: the midline passes through this robot.
        let v = view(
            Color::Off,
            vec![entry(-2, 1, Color::Call), entry(-2, -1, Color::Call)],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Leader1));
    }

    #[test]
    fn called_robot_nearest_midline_migrates() {
        // Calls at rows 0 and 3 (midline at 1.5); self row 0 is nearest
        // among an own line reaching up to row 3.
        let v = view(
            Color::Off,
            vec![
                entry(-1, 1, Color::Call),
                entry(-1, 2, Color::Call),
                entry(0, 3, Color::Off),
            ],
        );
        // deltas: self |2*0-3|=3, mate |2*3-3|=3 — tie counts as nearest.
        assert_eq!(decide(&v), Decision::stay(Color::Moving1));

        // A strictly nearer mate suppresses the flip.
        let v = view(
            Color::Off,
            vec![
                entry(-1, 2, Color::Call),
                entry(-1, 5, Color::Call),
                entry(0, 3, Color::Off),
            ],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Off));
    }

    #[test]
    fn migration_cascades_along_line() {
        let v = view(Color::Off, vec![entry(0, -1, Color::Moving1)]);
        assert_eq!(decide(&v), Decision::stay(Color::Moving1));
    }

    #[test]
    fn terminal1_steps_out_left() {
        let v = view(Color::Terminal1, vec![entry(0, -3, Color::Off)]);
        assert_eq!(decide(&v), Decision::new(Color::Candidate, MoveDir::Left));
    }

    #[test]
    fn terminal1_yields_to_existing_candidate() {
        let v = view(
            Color::Terminal1,
            vec![entry(-1, 1, Color::Candidate), entry(0, -2, Color::Off)],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Off));
        // No candidate on the nearest left line: keep waiting.
        let v = view(
            Color::Terminal1,
            vec![entry(-1, 1, Color::Off), entry(0, -2, Color::Off)],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Terminal1));
    }

    #[test]
    fn lone_candidate_wins() {
        let v = view(Color::Candidate, vec![entry(1, 2, Color::Off)]);
        assert_eq!(decide(&v), Decision::stay(Color::Leader1));
    }

    #[test]
    fn symmetric_line_makes_pair_call() {
        // Pair rows 0 and 4 (midline row 2); right line rows 1 and 3 —
        // symmetric about the midline.
        let v = view(
            Color::Candidate,
            vec![
                entry(0, 4, Color::Candidate),
                entry(1, 1, Color::Off),
                entry(1, 3, Color::Off),
            ],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Call));
    }

    #[test]
    fn dominant_candidate_wins_election_round() {
        // Pair rows 0 and 4; right line occupied at rows 1 and 2. Midline
        // row 2: the row-2 robot sits on it and votes for neither side, so
        // only row 1 counts — the down half dominates and self (two_y = 4,
        // the lower pair member) wins.
        let v = view(
            Color::Candidate,
            vec![
                entry(0, 4, Color::Candidate),
                entry(1, 1, Color::Off),
                entry(1, 2, Color::Off),
            ],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Leader1));

        // Seen from the upper pair member (partner below at -4, two_y =
        // -4, same line rows now at local dy -3 and -2): not dominant.
        let v = view(
            Color::Candidate,
            vec![
                entry(0, -4, Color::Candidate),
                entry(1, -3, Color::Off),
                entry(1, -2, Color::Off),
            ],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Candidate));
    }

    #[test]
    fn candidate_waits_while_right_line_busy() {
        let v = view(
            Color::Candidate,
            vec![entry(0, 4, Color::Candidate), entry(1, 1, Color::Moving1)],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Candidate));
    }

    #[test]
    fn candidate_stands_down_after_loss() {
        let v = view(
            Color::Candidate,
            vec![entry(0, 4, Color::Leader1), entry(1, 1, Color::Off)],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Off));
    }

    #[test]
    fn migrator_marches_left_when_pass_is_clear() {
        // Calls both strictly above: no straddle, go left.
        let v = view(
            Color::Moving1,
            vec![entry(-1, 2, Color::Call), entry(-1, 4, Color::Call)],
        );
        assert_eq!(decide(&v), Decision::new(Color::Moving1, MoveDir::Left));
    }

    #[test]
    fn migrator_slides_out_of_the_span() {
        // Calls straddle this row; own line has a mate above: slide down.
        let v = view(
            Color::Moving1,
            vec![
                entry(-1, 1, Color::Call),
                entry(-1, -1, Color::Call),
                entry(0, 2, Color::Off),
            ],
        );
        assert_eq!(
            decide(&v),
            Decision::new(Color::Moving1, MoveDir::LocalDown)
        );
        // Alone on the line: slide local-up by convention.
        let v = view(
            Color::Moving1,
            vec![entry(-1, 1, Color::Call), entry(-1, -1, Color::Call)],
        );
        assert_eq!(decide(&v), Decision::new(Color::Moving1, MoveDir::LocalUp));
        // A robot exactly on this row on the left line counts as blocking
        // both half-planes: still a straddle.
        let v = view(
            Color::Moving1,
            vec![
                entry(-1, 0, Color::Moving1),
                entry(-2, 1, Color::Call),
                entry(-2, -3, Color::Call),
            ],
        );
        // Nearest left line is the dx=-1 one; it holds no call, so the
        // transit rule does not even fire — the robot holds.
        assert_eq!(decide(&v), Decision::stay(Color::Moving1));
    }

    #[test]
    fn arrived_migrator_parks_left() {
        let v = view(
            Color::Moving1,
            vec![entry(0, -2, Color::Reached), entry(0, -4, Color::Reached)],
        );
        assert_eq!(decide(&v), Decision::new(Color::Moving1, MoveDir::Left));
    }

    #[test]
    fn blocked_parker_slides_to_a_free_row() {
        // Exit cell taken by an earlier parker: slide away from the line.
        let v = view(
            Color::Moving1,
            vec![
                entry(-1, 0, Color::Moving1),
                entry(0, -2, Color::Reached),
                entry(0, -4, Color::Reached),
            ],
        );
        assert_eq!(decide(&v), Decision::new(Color::Moving1, MoveDir::LocalUp));
    }

    #[test]
    fn leftover_migrator_rejoins_electorate() {
        let v = view(Color::Moving1, vec![entry(-1, 1, Color::Candidate)]);
        assert_eq!(decide(&v), Decision::stay(Color::Off));
    }

    #[test]
    fn call_acknowledges_arrivals() {
        let v = view(
            Color::Call,
            vec![entry(0, 2, Color::Call), entry(0, 1, Color::Moving1)],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Reached));
        // Transit columns not yet drained: keep calling.
        let v = view(
            Color::Call,
            vec![
                entry(0, 2, Color::Call),
                entry(0, 1, Color::Moving1),
                entry(2, 5, Color::Moving1),
            ],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Call));
    }

    #[test]
    fn call_stands_down_after_midline_win() {
        let v = view(Color::Call, vec![entry(2, -1, Color::Leader1)]);
        assert_eq!(decide(&v), Decision::stay(Color::Off));
        // Same once the winner already marched to the far side.
        let v = view(
            Color::Call,
            vec![entry(-2, 1, Color::Leader1), entry(0, 2, Color::Call)],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Off));
    }

    #[test]
    fn raced_acknowledgement_stands_down_too() {
        // A reached pair member with a winner in sight must not restart
        // the election on the next line.
        let v = view(
            Color::Reached,
            vec![entry(0, 3, Color::Reached), entry(-1, 1, Color::Leader1)],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Off));
        // An off robot never answers a stale call when a winner is in sight.
        let v = view(
            Color::Off,
            vec![
                entry(-1, 1, Color::Call),
                entry(-1, -1, Color::Call),
                entry(-3, 0, Color::Leader1),
            ],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Off));
    }

    #[test]
    fn reached_reverts_to_candidate_when_round_settles() {
        let v = view(
            Color::Reached,
            vec![entry(0, 3, Color::Reached), entry(1, 1, Color::Off)],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Candidate));
        // A migrator still filing off keeps this robot non-terminal.
        let v = view(
            Color::Reached,
            vec![
                entry(0, 3, Color::Reached),
                entry(0, -1, Color::Moving1),
                entry(0, 5, Color::Moving1),
            ],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Reached));
    }

    #[test]
    fn winner_marches_west_when_crowd_allows() {
        let v = view(Color::Leader1, vec![entry(-1, 3, Color::Moving1)]);
        assert_eq!(decide(&v), Decision::new(Color::Leader1, MoveDir::Left));
        // A live call on the nearest left line pins the winner in place.
        let v = view(
            Color::Leader1,
            vec![entry(-1, 1, Color::Call), entry(-1, -1, Color::Call)],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Leader1));
        // So does a candidate sharing the line.
        let v = view(
            Color::Leader1,
            vec![entry(0, -4, Color::Candidate), entry(1, 1, Color::Off)],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Leader1));
    }

    #[test]
    fn winner_climbs_clear_of_the_crowd() {
        let v = view(
            Color::Leader1,
            vec![entry(2, 1, Color::Off), entry(2, -1, Color::Off)],
        );
        assert_eq!(decide(&v), Decision::new(Color::Leader1, MoveDir::LocalUp));
        // A robot exactly on this row occupies both closed half-planes.
        let v = view(Color::Leader1, vec![entry(2, 0, Color::Off)]);
        assert_eq!(decide(&v), Decision::new(Color::Leader1, MoveDir::LocalUp));
    }

    #[test]
    fn winner_lights_the_beacon_once_clear() {
        let v = view(
            Color::Leader1,
            vec![entry(2, -1, Color::Off), entry(3, -4, Color::Moving1)],
        );
        assert_eq!(decide(&v), Decision::stay(Color::Leader));
    }
}
