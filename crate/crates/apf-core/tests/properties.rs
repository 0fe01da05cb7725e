//! Randomized cross-module properties.
//!
//! Each test states an invariant the library promises — symmetry and
//! soundness of the visibility engine, frame-independence of the protocol,
//! agreement of the solvability gate with an exhaustive mirror search,
//! reproducibility and fairness of the scheduler — and checks it over many
//! seeded random instances. Seeds are fixed so failures reproduce exactly.

use std::collections::BTreeSet;

use apf_core::embedding::{
    check_solvable, embed_pattern, positions_form_pattern, TargetPattern, Unsolvable,
};
use apf_core::geometry::{
    sample_visibility_oracle, segment_clearance, visible, visible_with_witness, BlockingMode,
    Chirality, GridPoint, Radius, Vec2, WorldConfig, CLEARANCE_TOLERANCE,
};
use apf_core::protocol::{
    compute_k, dominant_side, lambda_and_symmetry, transition, Color, KLine, LocalView, MoveDir,
    ProtocolOptions, Side, ViewEntry,
};
use apf_core::sim::{run, Outcome, RunOptions, SchedulerPolicy, TraceStep};
use proptest::prelude::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn p(x: i64, y: i64) -> GridPoint {
    GridPoint::new(x, y)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` distinct grid points with both coordinates in `[-span, span]`.
fn random_positions(rng: &mut ChaCha8Rng, n: usize, span: i64) -> Vec<GridPoint> {
    let mut set = BTreeSet::new();
    while set.len() < n {
        set.insert(p(
            rng.random_range(-span..=span),
            rng.random_range(-span..=span),
        ));
    }
    set.into_iter().collect()
}

fn random_world(rng: &mut ChaCha8Rng, n: usize, span: i64) -> WorldConfig {
    let rad = if rng.random_bool(0.5) {
        Radius::HALF
    } else {
        Radius::QUARTER
    };
    let blocking = if rng.random_bool(0.5) {
        BlockingMode::ClosedDisks
    } else {
        BlockingMode::OpenDisks
    };
    WorldConfig::from_positions(random_positions(rng, n, span), rad, blocking)
}

// ---------------------------------------------------------------------------
// Visibility engine
// ---------------------------------------------------------------------------

#[test]
fn visibility_is_symmetric_in_the_pair() {
    let mut rng = rng(0x5711);
    for case in 0..60 {
        let n = rng.random_range(3..=8);
        let cfg = random_world(&mut rng, n, 5);
        for a in 0..n {
            for b in (a + 1)..n {
                let ab = visible(&cfg, a, b).unwrap();
                let ba = visible(&cfg, b, a).unwrap();
                assert_eq!(ab, ba, "case {case}: pair ({a},{b}) asymmetric in {cfg:?}");
            }
        }
    }
}

#[test]
fn sampling_oracle_never_contradicts_the_engine() {
    // The sampling oracle is one-sided: a sampled sight segment certifies
    // visibility, so the engine must agree whenever the oracle says yes.
    let mut rng = rng(0x09AC1E);
    for case in 0..40 {
        let n = rng.random_range(3..=8);
        let cfg = random_world(&mut rng, n, 5);
        for a in 0..n {
            for b in (a + 1)..n {
                let sampled = sample_visibility_oracle(&cfg, a, b, 200, 0xBEEF + case).unwrap();
                if sampled {
                    assert!(
                        visible(&cfg, a, b).unwrap(),
                        "case {case}: oracle found a sight segment for ({a},{b}) but the \
                         engine denies it in {cfg:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn removing_a_robot_never_hides_a_visible_pair() {
    // Obstacles only ever block sight, so deleting one cannot disconnect a
    // visible pair.
    let mut rng = rng(0x0DE1E7E);
    let mut checked = 0;
    for _ in 0..250 {
        let n = rng.random_range(4..=7);
        let cfg = random_world(&mut rng, n, 4);
        let a = rng.random_range(0..n);
        let b = (a + rng.random_range(1..n)) % n;
        if !visible(&cfg, a, b).unwrap() {
            continue;
        }
        let gone = loop {
            let g = rng.random_range(0..n);
            if g != a && g != b {
                break g;
            }
        };
        let keep: Vec<GridPoint> = cfg
            .robots
            .iter()
            .filter(|r| r.id != gone)
            .map(|r| r.pos)
            .collect();
        // Ids shift down past the removed robot.
        let shift = |id: usize| if id > gone { id - 1 } else { id };
        let reduced = WorldConfig::from_positions(keep, cfg.rad, cfg.blocking);
        assert!(
            visible(&reduced, shift(a), shift(b)).unwrap(),
            "removing robot {gone} hid the visible pair ({a},{b}) in {cfg:?}"
        );
        checked += 1;
    }
    assert!(checked >= 50, "too few visible pairs sampled: {checked}");
}

#[test]
fn visibility_is_translation_invariant() {
    let mut rng = rng(0x7A4515);
    for case in 0..30 {
        let n = rng.random_range(3..=7);
        let cfg = random_world(&mut rng, n, 4);
        let (tx, ty) = (rng.random_range(-20..=20), rng.random_range(-20..=20));
        let moved = WorldConfig::from_positions(
            cfg.robots.iter().map(|r| r.pos.offset(tx, ty)),
            cfg.rad,
            cfg.blocking,
        );
        for a in 0..n {
            for b in (a + 1)..n {
                assert_eq!(
                    visible(&cfg, a, b).unwrap(),
                    visible(&moved, a, b).unwrap(),
                    "case {case}: pair ({a},{b}) changed under translation ({tx},{ty})"
                );
            }
        }
    }
}

#[test]
fn orthogonally_adjacent_robots_always_see_each_other() {
    // Robots one cell apart see each other no matter how crowded the
    // neighborhood is: no third grid-centered disk of radius <= 1/2 can
    // cover the gap between two touching disks.
    let mut rng = rng(0xAD7ACE);
    let mut adjacent_pairs = 0;
    for _ in 0..60 {
        let n = rng.random_range(5..=9);
        let cfg = random_world(&mut rng, n, 2);
        for a in 0..n {
            for b in (a + 1)..n {
                let (pa, pb) = (cfg.robots[a].pos, cfg.robots[b].pos);
                if (pa.x - pb.x).abs() + (pa.y - pb.y).abs() == 1 {
                    adjacent_pairs += 1;
                    assert!(
                        visible(&cfg, a, b).unwrap(),
                        "adjacent pair {pa:?}-{pb:?} not visible in {cfg:?}"
                    );
                }
            }
        }
    }
    assert!(
        adjacent_pairs >= 100,
        "too few adjacent pairs sampled: {adjacent_pairs}"
    );
}

#[test]
fn accepted_witnesses_check_out() {
    // Every positive answer with a witness must survive an independent
    // recheck: endpoints on the two boundary circles, and the clearance
    // recomputed from scratch compatible with the blocking mode.
    let mut rng = rng(0x817AE55);
    let mut witnesses = 0;
    for _ in 0..40 {
        let n = rng.random_range(3..=8);
        let cfg = random_world(&mut rng, n, 4);
        let rad = cfg.rad.as_f64();
        for a in 0..n {
            for b in (a + 1)..n {
                let (vis, wit) = visible_with_witness(&cfg, a, b).unwrap();
                let Some(w) = wit else { continue };
                assert!(vis, "witness returned for an invisible pair");
                witnesses += 1;
                let ca = cfg.robots[a].pos.to_vec2();
                let cb = cfg.robots[b].pos.to_vec2();
                let on = |pt: Vec2, c: Vec2| {
                    (((pt.x - c.x).powi(2) + (pt.y - c.y).powi(2)).sqrt() - rad).abs() < 1e-6
                };
                assert!(
                    on(w.a, ca),
                    "witness endpoint {:?} off the observer boundary",
                    w.a
                );
                assert!(
                    on(w.b, cb),
                    "witness endpoint {:?} off the observed boundary",
                    w.b
                );
                let obstacles: Vec<Vec2> = cfg
                    .robots
                    .iter()
                    .filter(|r| r.id != a && r.id != b)
                    .map(|r| r.pos.to_vec2())
                    .collect();
                let clear = segment_clearance(w.a, w.b, &obstacles, rad);
                assert!(
                    (clear - w.clearance).abs() < 1e-6,
                    "stored clearance {} disagrees with recheck {clear}",
                    w.clearance
                );
                match cfg.blocking {
                    BlockingMode::ClosedDisks => assert!(
                        clear > 0.0,
                        "closed-disk witness grazes an obstacle: clearance {clear}"
                    ),
                    BlockingMode::OpenDisks => assert!(
                        clear >= -2.0 * CLEARANCE_TOLERANCE,
                        "open-disk witness crosses an obstacle: clearance {clear}"
                    ),
                }
            }
        }
    }
    assert!(witnesses >= 100, "too few witnesses sampled: {witnesses}");
}

// ---------------------------------------------------------------------------
// Staged sight-line facts the election relies on
// ---------------------------------------------------------------------------

#[test]
fn both_pair_robots_are_seen_from_every_off_robot_on_the_next_line() {
    // Staging of the election's key sight fact. The pair always sits alone
    // on a column it founded by stepping west, so only two shapes are
    // reachable when it examines the next occupied line to its right:
    //   - that line is the old home column, directly adjacent (d = 1), and
    //     everyone left on it sits strictly between the pair's rows (the
    //     pair robots were its topmost and bottommost);
    //   - at least one empty column separates them (d >= 2), and the line's
    //     rows are arbitrary.
    // In both shapes every robot of that line sees both pair robots, no
    // matter what sits west of the pair or east of the examined line.
    let mut rng = rng(0x1E2A02);
    let mut checked = 0;
    for case in 0..200 {
        let rad = if rng.random_bool(0.5) {
            Radius::HALF
        } else {
            Radius::QUARTER
        };
        let mode = if rng.random_bool(0.5) {
            BlockingMode::ClosedDisks
        } else {
            BlockingMode::OpenDisks
        };
        let adjacent = rng.random_bool(0.5);
        let (d, ya, yb) = if adjacent {
            let ya = rng.random_range(-4..=0);
            (1, ya, ya + rng.random_range(2..=6))
        } else {
            let ya = rng.random_range(-4..=0);
            (rng.random_range(2..=3), ya, ya + rng.random_range(1..=6))
        };
        let mut right_rows: BTreeSet<i64> = BTreeSet::new();
        for _ in 0..rng.random_range(1..=3) {
            if adjacent {
                right_rows.insert(rng.random_range(ya + 1..yb));
            } else {
                right_rows.insert(rng.random_range(ya - 3..=yb + 3));
            }
        }

        let mut positions: Vec<GridPoint> = vec![p(0, ya), p(0, yb)];
        let right_start = positions.len();
        for &y in &right_rows {
            positions.push(p(d, y));
        }
        // Robots parked west of the pair (earlier rounds) and robots on
        // further-right lines never matter.
        for _ in 0..rng.random_range(0..=2) {
            let q = p(-rng.random_range(1..=2), rng.random_range(ya - 3..=yb + 3));
            if !positions.contains(&q) {
                positions.push(q);
            }
        }
        for _ in 0..rng.random_range(0..=2) {
            let q = p(d + rng.random_range(1..=3), rng.random_range(-6..=6));
            if !positions.contains(&q) {
                positions.push(q);
            }
        }
        let cfg = WorldConfig::from_positions(positions, rad, mode);
        for (i, _) in right_rows.iter().enumerate() {
            let viewer = right_start + i;
            for pair in [0, 1] {
                assert!(
                    visible(&cfg, viewer, pair).unwrap(),
                    "case {case}: next-line robot {viewer} cannot see pair robot {pair} in {cfg:?}"
                );
                checked += 1;
            }
        }
    }
    assert!(checked >= 200, "too few pair sightings checked: {checked}");
}

#[test]
fn a_terminal_migrator_sees_at_least_one_caller() {
    // Staging of the migration invariant: while a calling pair waits on its
    // own column, the extreme (topmost or bottommost) migrant on the next
    // occupied line to its right always sees at least one of the two
    // callers. Reachable shapes: at d = 1 the migrants started strictly
    // between the callers' rows and at most one has escaped vertically past
    // either caller row (the escape needs terminal status, so a second one
    // cannot pass the first); at d >= 2 rows are arbitrary. Robots that
    // already crossed over sit on the callers' column outside the pair's
    // row band, and earlier rounds' robots are parked further west.
    let mut rng = rng(0x7E8311A);
    let mut checked = 0;
    for case in 0..200 {
        let rad = if rng.random_bool(0.5) {
            Radius::HALF
        } else {
            Radius::QUARTER
        };
        let mode = if rng.random_bool(0.5) {
            BlockingMode::ClosedDisks
        } else {
            BlockingMode::OpenDisks
        };
        let adjacent = rng.random_bool(0.5);
        let ya = rng.random_range(-4..=0);
        let (d, yb) = if adjacent {
            (1, ya + rng.random_range(2..=6))
        } else {
            (rng.random_range(2..=3), ya + rng.random_range(1..=6))
        };
        let mut right_rows: BTreeSet<i64> = BTreeSet::new();
        for _ in 0..rng.random_range(1..=3) {
            if adjacent {
                right_rows.insert(rng.random_range(ya + 1..yb));
            } else {
                right_rows.insert(rng.random_range(ya - 4..=yb + 4));
            }
        }
        if adjacent {
            // Vertical escapees past the callers' rows, one per side.
            if rng.random_bool(0.4) {
                right_rows.insert(yb + rng.random_range(1..=3));
            }
            if rng.random_bool(0.4) {
                right_rows.insert(ya - rng.random_range(1..=3));
            }
        }
        let mut positions: Vec<GridPoint> = vec![p(0, ya), p(0, yb)];
        let right_start = positions.len();
        for &y in &right_rows {
            positions.push(p(d, y));
        }
        // Migrants that already arrived on the callers' column, outside the
        // pair's row band, plus parked robots further west.
        for _ in 0..rng.random_range(0..=1) {
            let q = p(
                0,
                if rng.random_bool(0.5) {
                    yb + rng.random_range(1..=3)
                } else {
                    ya - rng.random_range(1..=3)
                },
            );
            if !positions.contains(&q) {
                positions.push(q);
            }
        }
        for _ in 0..rng.random_range(0..=2) {
            let q = p(-rng.random_range(1..=2), rng.random_range(ya - 3..=yb + 3));
            if !positions.contains(&q) {
                positions.push(q);
            }
        }
        let cfg = WorldConfig::from_positions(positions, rad, mode);
        for terminal in [right_start, right_start + right_rows.len() - 1] {
            assert!(
                visible(&cfg, terminal, 0).unwrap() || visible(&cfg, terminal, 1).unwrap(),
                "case {case}: terminal migrant {terminal} sees neither caller in {cfg:?}"
            );
            checked += 1;
        }
    }
    assert!(
        checked >= 200,
        "too few terminal sightings checked: {checked}"
    );
}

// ---------------------------------------------------------------------------
// Protocol as a pure, frame-independent function
// ---------------------------------------------------------------------------

const ALL_COLORS: [Color; 9] = [
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

fn random_view(rng: &mut ChaCha8Rng) -> LocalView {
    let self_color = ALL_COLORS[rng.random_range(0..ALL_COLORS.len())];
    let n = rng.random_range(0..=7);
    let mut cells = BTreeSet::new();
    while cells.len() < n {
        let c = (rng.random_range(-4i64..=4), rng.random_range(-4i64..=4));
        if c != (0, 0) {
            cells.insert(c);
        }
    }
    let others = cells
        .into_iter()
        .map(|(dx, dy)| ViewEntry {
            dx,
            dy,
            color: ALL_COLORS[rng.random_range(0..ALL_COLORS.len())],
        })
        .collect();
    LocalView::new(self_color, others)
}

fn flip_view(view: &LocalView) -> LocalView {
    let others = view
        .others
        .iter()
        .map(|e| ViewEntry {
            dx: e.dx,
            dy: -e.dy,
            color: e.color,
        })
        .collect();
    LocalView::new(view.self_color, others)
}

fn swap_vertical(mv: MoveDir) -> MoveDir {
    match mv {
        MoveDir::LocalUp => MoveDir::LocalDown,
        MoveDir::LocalDown => MoveDir::LocalUp,
        other => other,
    }
}

#[test]
fn repeated_transitions_agree() {
    // The decision function is pure: same view, same answer, including the
    // rejected views.
    let targets = embed_pattern(&TargetPattern::new([
        p(0, 0),
        p(1, 0),
        p(0, 1),
        p(2, 1),
        p(1, 2),
    ]))
    .unwrap();
    let opts = ProtocolOptions::default();
    let mut rng = rng(0x9082);
    for _ in 0..500 {
        let view = random_view(&mut rng);
        let first = transition(&view, &targets, &opts);
        let second = transition(&view, &targets, &opts);
        assert_eq!(first, second, "transition not reproducible on {view:?}");
    }
}

#[test]
fn flipping_the_frame_swaps_vertical_moves() {
    // Negating every dy (= handing the same world to a robot of opposite
    // handedness) must keep the color and swap LocalUp/LocalDown, so the
    // global action is unchanged. The one sanctioned exception: views that
    // give no clue about the shared vertical orientation are tie-broken
    // toward the robot's own local up, in which case both handednesses
    // report the same local vertical.
    let targets = embed_pattern(&TargetPattern::new([
        p(0, 0),
        p(1, 0),
        p(0, 1),
        p(2, 1),
        p(1, 2),
    ]))
    .unwrap();
    let opts = ProtocolOptions::default();
    let mut rng = rng(0xF11B);
    let mut swapped_verticals = 0;
    for _ in 0..4000 {
        let view = random_view(&mut rng);
        let mirrored = flip_view(&view);
        let d = transition(&view, &targets, &opts);
        let dm = transition(&mirrored, &targets, &opts);
        match (d, dm) {
            (Ok(d), Ok(dm)) => {
                assert_eq!(d.color, dm.color, "color depends on the frame for {view:?}");
                let tie_break =
                    dm.mv == d.mv && matches!(d.mv, MoveDir::LocalUp | MoveDir::LocalDown);
                assert!(
                    dm.mv == swap_vertical(d.mv) || tie_break,
                    "move {:?} became {:?} under a frame flip for {view:?}",
                    d.mv,
                    dm.mv
                );
                if dm.mv == swap_vertical(d.mv) && dm.mv != d.mv {
                    swapped_verticals += 1;
                }
            }
            (Err(e), Err(em)) => assert_eq!(e, em, "rejection differs under a frame flip"),
            (a, b) => panic!("frame flip changed acceptance: {a:?} vs {b:?} for {view:?}"),
        }
    }
    assert!(
        swapped_verticals >= 20,
        "vertical moves never exercised: {swapped_verticals}"
    );
}

#[test]
fn the_marker_midline_is_frame_independent() {
    // compute_k reports twice the midline y of the unique visible marker
    // pair; flipping the frame negates it (same physical line).
    let mut rng = rng(0x31D11E);
    let mut located = 0;
    for _ in 0..2000 {
        let view = random_view(&mut rng);
        let mirrored = flip_view(&view);
        match (compute_k(&view), compute_k(&mirrored)) {
            (Ok(k), Ok(km)) => {
                assert_eq!(km.two_y, -k.two_y, "midline moved under a frame flip");
                located += 1;
            }
            (Err(e), Err(em)) => assert_eq!(e, em),
            (a, b) => panic!("frame flip changed midline detection: {a:?} vs {b:?}"),
        }
    }
    assert!(located >= 30, "marker pairs never exercised: {located}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, ..ProptestConfig::default() })]

    /// The half-line census and its verdicts agree with a from-scratch
    /// reflection oracle on arbitrary occupied lines and midlines.
    #[test]
    fn half_line_census_matches_a_reflection_oracle(
        rows in prop::collection::btree_set(-8i64..=8, 1..10),
        two_y in -16i64..=16,
    ) {
        let view = LocalView::new(
            Color::Off,
            rows.iter().map(|&dy| ViewEntry { dx: 1, dy, color: Color::Off }).collect(),
        );
        let k = KLine { two_y };
        let pair = lambda_and_symmetry(&view, 1, k);

        // Oracle: bucket each off-axis row by its level above/below the
        // midline; the level of a row at signed half-distance delta = 2*dy
        // - two_y is (|delta| + 1) / 2.
        let mut up_levels = BTreeSet::new();
        let mut down_levels = BTreeSet::new();
        for &dy in &rows {
            let delta = 2 * dy - two_y;
            match delta.signum() {
                1 => { up_levels.insert((delta + 1) / 2); }
                -1 => { down_levels.insert((-delta + 1) / 2); }
                _ => {} // on the midline: excluded from both censuses
            }
        }
        let len = up_levels.iter().chain(down_levels.iter()).max().copied().unwrap_or(0) as usize;
        let expect = |levels: &BTreeSet<i64>| -> Vec<bool> {
            (1..=len as i64).map(|l| levels.contains(&l)).collect()
        };
        prop_assert_eq!(&pair.up, &expect(&up_levels), "upper census wrong");
        prop_assert_eq!(&pair.down, &expect(&down_levels), "lower census wrong");

        // Symmetry == the occupied rows (axis excluded) reflect onto
        // themselves about the midline.
        let reflective = rows
            .iter()
            .filter(|&&dy| 2 * dy != two_y)
            .all(|&dy| rows.contains(&(two_y - dy)));
        prop_assert_eq!(pair.symmetric(), reflective, "symmetry verdict wrong");

        // Dominance == first level where exactly one side is occupied.
        let mut expect_side = None;
        for l in 1..=len as i64 {
            match (up_levels.contains(&l), down_levels.contains(&l)) {
                (true, false) => { expect_side = Some(Side::Up); break; }
                (false, true) => { expect_side = Some(Side::Down); break; }
                _ => {}
            }
        }
        prop_assert_eq!(dominant_side(&pair), expect_side, "dominant side wrong");
    }
}

// ---------------------------------------------------------------------------
// Embedding and solvability
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    /// Re-embedding an embedded pattern changes nothing.
    #[test]
    fn embedding_is_idempotent(
        points in prop::collection::btree_set((-9i64..=9, -9i64..=9), 1..10),
    ) {
        let pattern = TargetPattern::new(points.iter().map(|&(x, y)| p(x, y)));
        let once = embed_pattern(&pattern).unwrap();
        let twice = embed_pattern(&TargetPattern::new(once.points().iter().copied())).unwrap();
        prop_assert_eq!(once, twice);
    }

    /// Embedded coordinates start at (1, 1) and are served top row first,
    /// right to left.
    #[test]
    fn embedding_normalizes_and_orders(
        points in prop::collection::btree_set((-9i64..=9, -9i64..=9), 1..10),
    ) {
        let pattern = TargetPattern::new(points.iter().map(|&(x, y)| p(x, y)));
        let t = embed_pattern(&pattern).unwrap();
        prop_assert_eq!(t.len(), points.len());
        prop_assert_eq!(t.points().iter().map(|q| q.x).min(), Some(1));
        prop_assert_eq!(t.points().iter().map(|q| q.y).min(), Some(1));
        for w in t.points().windows(2) {
            prop_assert!(
                w[0].y > w[1].y || (w[0].y == w[1].y && w[0].x > w[1].x),
                "service order violated: {:?} before {:?}", w[0], w[1]
            );
        }
    }

    /// A formed verdict survives translating the robots, and the embedded
    /// points themselves always form their own pattern upright.
    #[test]
    fn formation_check_is_translation_invariant(
        points in prop::collection::btree_set((-9i64..=9, -9i64..=9), 1..10),
        tx in -30i64..=30,
        ty in -30i64..=30,
    ) {
        let targets = embed_pattern(&TargetPattern::new(points.iter().map(|&(x, y)| p(x, y))))
            .unwrap();
        let upright: Vec<GridPoint> = targets.points().to_vec();
        prop_assert_eq!(positions_form_pattern(&upright, &targets), Some(1));

        let moved: Vec<GridPoint> = upright.iter().map(|q| q.offset(tx, ty)).collect();
        prop_assert_eq!(positions_form_pattern(&moved, &targets), Some(1));

        let flipped: Vec<GridPoint> =
            upright.iter().map(|q| GridPoint::new(q.x + tx, -q.y + ty)).collect();
        let verdict = positions_form_pattern(&flipped, &targets);
        prop_assert!(verdict.is_some(), "mirrored copy not recognized");
    }
}

/// Exhaustive mirror oracle: the set is unformable exactly when some
/// horizontal axis (any half-integer line in the occupied band) maps it
/// onto itself while passing through no robot.
fn mirror_oracle(positions: &[GridPoint]) -> Option<i64> {
    let set: BTreeSet<GridPoint> = positions.iter().copied().collect();
    let min2 = positions.iter().map(|q| 2 * q.y).min().unwrap();
    let max2 = positions.iter().map(|q| 2 * q.y).max().unwrap();
    (min2..=max2).find(|&two_k| {
        set.iter()
            .all(|q| set.contains(&p(q.x, two_k - q.y)) && 2 * q.y != two_k)
    })
}

#[test]
fn solvability_agrees_with_an_exhaustive_mirror_search() {
    let mut rng = rng(0x501AB1E);
    let mut rejected = 0;
    for case in 0..1500 {
        // Random sets are rarely symmetric, so half the cases are built
        // from a reflected half (with or without a robot on the axis).
        let positions: Vec<GridPoint> = if case % 2 == 0 {
            let n = rng.random_range(3..=8);
            random_positions(&mut rng, n, 5)
        } else {
            let h = rng.random_range(1..=4);
            let half = random_positions(&mut rng, h, 4);
            let two_k = rng.random_range(-6..=6);
            let mut set: BTreeSet<GridPoint> = half
                .iter()
                .flat_map(|&q| [q, p(q.x, two_k - q.y)])
                .collect();
            if rng.random_bool(0.5) && two_k % 2 == 0 {
                set.insert(p(rng.random_range(-4..=4), two_k / 2));
            }
            set.into_iter().collect()
        };
        if positions.len() < 3 {
            continue;
        }
        let cfg =
            WorldConfig::from_positions(positions.clone(), Radius::HALF, BlockingMode::ClosedDisks);
        let expect = mirror_oracle(&positions);
        match (check_solvable(&cfg), expect) {
            (Ok(()), None) => {}
            (Err(Unsolvable { axis_two_y }), Some(two_k)) => {
                assert_eq!(
                    axis_two_y, two_k,
                    "case {case}: wrong axis for {positions:?}"
                );
                rejected += 1;
            }
            (got, want) => panic!(
                "case {case}: solvability disagrees with the mirror oracle: \
                 got {got:?}, oracle axis {want:?}, positions {positions:?}"
            ),
        }
    }
    assert!(
        rejected >= 100,
        "too few unformable sets exercised: {rejected}"
    );
}

// ---------------------------------------------------------------------------
// Simulator: reproducibility, trace coherence, fairness
// ---------------------------------------------------------------------------

/// Small known-formable worlds used by the scheduler properties.
fn sim_pool() -> Vec<(WorldConfig, TargetPattern)> {
    let col3 = WorldConfig::from_positions(
        [p(0, 0), p(0, 1), p(0, 2)],
        Radius::HALF,
        BlockingMode::ClosedDisks,
    );
    let l4 = WorldConfig::from_positions(
        [p(0, 0), p(0, 2), p(1, 1), p(2, 1)],
        Radius::HALF,
        BlockingMode::ClosedDisks,
    );
    let quarter5 = WorldConfig::new(
        [
            (p(0, 0), Chirality::Plus),
            (p(0, 3), Chirality::Minus),
            (p(1, 1), Chirality::Plus),
            (p(2, 2), Chirality::Minus),
            (p(3, 0), Chirality::Plus),
        ],
        Radius::QUARTER,
        BlockingMode::ClosedDisks,
    );
    let open5 = WorldConfig::from_positions(
        [p(0, 0), p(0, 1), p(1, 3), p(2, 0), p(2, 2)],
        Radius::HALF,
        BlockingMode::OpenDisks,
    );
    vec![
        (col3, TargetPattern::new([p(0, 0), p(1, 0), p(2, 0)])),
        (l4, TargetPattern::new([p(0, 0), p(1, 0), p(0, 1), p(0, 2)])),
        (
            quarter5,
            TargetPattern::new([p(0, 0), p(1, 1), p(2, 2), p(3, 3), p(4, 4)]),
        ),
        (
            open5,
            TargetPattern::new([p(0, 0), p(1, 0), p(2, 0), p(1, 1), p(1, 2)]),
        ),
    ]
}

fn traced(scheduler: SchedulerPolicy, seed: u64) -> RunOptions {
    RunOptions {
        scheduler,
        seed,
        record_trace: true,
        ..RunOptions::default()
    }
}

#[test]
fn equal_seeds_reproduce_runs_exactly() {
    for (cfg, pattern) in sim_pool() {
        for scheduler in [
            SchedulerPolicy::AsyncRandom,
            SchedulerPolicy::AsyncAdversarial,
            SchedulerPolicy::Ssync { p: 0.5 },
        ] {
            for seed in [1, 7, 42] {
                let a = run(&cfg, &pattern, &traced(scheduler, seed)).unwrap();
                let b = run(&cfg, &pattern, &traced(scheduler, seed)).unwrap();
                assert_eq!(
                    a.outcome, b.outcome,
                    "outcome not reproducible ({scheduler}, {seed})"
                );
                assert_eq!(a.events, b.events, "event count not reproducible");
                assert_eq!(
                    a.trace, b.trace,
                    "trace not reproducible ({scheduler}, {seed})"
                );
                assert!(
                    matches!(a.outcome, Outcome::Formed { .. }),
                    "pool world failed to form under {scheduler} seed {seed}: {:?}",
                    a.outcome
                );
            }
        }
    }
}

#[test]
fn traces_replay_to_the_reported_end_without_collisions() {
    // Replaying the recorded moves and light changes from the initial
    // world must keep all cells distinct, respect the declared color
    // graph, and land exactly on the reported final state. This re-derives
    // the safety verdicts from the trace alone, independent of the
    // simulator's own monitors.
    for (cfg, pattern) in sim_pool() {
        for seed in [3, 11] {
            let report = run(&cfg, &pattern, &traced(SchedulerPolicy::AsyncRandom, seed)).unwrap();
            let mut pos: Vec<GridPoint> = cfg.robots.iter().map(|r| r.pos).collect();
            let mut col: Vec<Color> = cfg.robots.iter().map(|r| r.color).collect();
            let mut last_seq = 0;
            for rec in &report.trace {
                assert!(rec.seq >= last_seq, "trace out of order");
                last_seq = rec.seq;
                match rec.step {
                    TraceStep::Looked { .. } => {}
                    TraceStep::Moved { from, to } => {
                        assert_eq!(pos[rec.robot], from, "move from a stale cell");
                        assert!(
                            !pos.iter()
                                .enumerate()
                                .any(|(q, &c)| q != rec.robot && c == to),
                            "recorded move enters an occupied cell: {rec:?}"
                        );
                        let dist = (to.x - from.x).abs() + (to.y - from.y).abs();
                        assert_eq!(dist, 1, "recorded move is not a unit step: {rec:?}");
                        pos[rec.robot] = to;
                    }
                    TraceStep::Lit { from, to } => {
                        assert_eq!(col[rec.robot], from, "light change from a stale color");
                        assert!(
                            apf_core::protocol::color_transition_allowed(from, to),
                            "recorded light change outside the color graph: {rec:?}"
                        );
                        col[rec.robot] = to;
                    }
                }
            }
            for robot in &report.final_robots {
                assert_eq!(
                    pos[robot.id], robot.pos,
                    "replayed cell disagrees with the report"
                );
                assert_eq!(
                    col[robot.id], robot.color,
                    "replayed light disagrees with the report"
                );
            }
            if let Outcome::Formed { .. } = report.outcome {
                assert!(
                    positions_form_pattern(&pos, &report.targets).is_some(),
                    "formed verdict not certified by the replayed cells"
                );
                assert!(
                    col.iter().all(|&c| c == Color::Done),
                    "formed but not all done"
                );
            }
        }
    }
}

#[test]
fn no_robot_starves_between_its_recorded_events() {
    // The asynchronous schedulers force the most-starved robot once its
    // idle span reaches 64n + 256 events. Between two recorded events of
    // the same robot there is at most one unrecorded no-effect move of
    // its own plus the backlog of forced peers, so the visible gap stays
    // under twice the forcing threshold plus an O(n) slack.
    for (cfg, pattern) in sim_pool() {
        let n = cfg.len() as u64;
        let bound = 2 * (64 * n + 256) + 8 * n + 16;
        for scheduler in [
            SchedulerPolicy::AsyncRandom,
            SchedulerPolicy::AsyncAdversarial,
        ] {
            for seed in [5, 23] {
                let report = run(&cfg, &pattern, &traced(scheduler, seed)).unwrap();
                let mut last: Vec<u64> = vec![0; cfg.len()];
                for rec in &report.trace {
                    if let TraceStep::Looked { .. } = rec.step {
                        let gap = rec.seq - last[rec.robot];
                        assert!(
                            gap <= bound,
                            "robot {} went {gap} events without a recorded look \
                             (bound {bound}, {scheduler}, seed {seed})",
                            rec.robot
                        );
                        last[rec.robot] = rec.seq;
                    }
                }
                for (robot, &seen) in last.iter().enumerate() {
                    assert!(
                        report.events - seen <= bound,
                        "robot {robot} unseen for the last {} events",
                        report.events - seen
                    );
                }
            }
        }
    }
}

#[test]
fn the_event_budget_is_exact_for_asynchronous_runs() {
    let (cfg, pattern) = &sim_pool()[1];
    let opts = RunOptions {
        scheduler: SchedulerPolicy::AsyncRandom,
        seed: 9,
        max_events: 3,
        ..RunOptions::default()
    };
    let report = run(cfg, pattern, &opts).unwrap();
    assert_eq!(report.outcome, Outcome::BudgetExceeded);
    assert_eq!(report.events, 3);
}
