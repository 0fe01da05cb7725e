//! Grid and continuous-plane primitives: robot bodies, world configurations,
//! segment clearance, and the visibility engine for opaque fat robots.
//!
//! Robots are closed disks of equal radius (at most 1/2) centered on integer
//! grid points. Robot `a` sees robot `b` when some straight segment from a
//! point on `a`'s boundary to a point on `b`'s boundary stays clear of every
//! other robot's disk. Under [`BlockingMode::ClosedDisks`] a segment grazing
//! an obstacle boundary is blocked; under [`BlockingMode::OpenDisks`] grazing
//! is allowed. All clearance comparisons use the slack
//! [`CLEARANCE_TOLERANCE`].
//!
//! Two independent routes answer visibility queries:
//!
//! * [`visible`] / [`visible_with_witness`] — the engine: exact integer
//!   certificates for collinear blockers, a center-segment fast path, and a
//!   branch-and-bound maximization of clearance over pairs of boundary
//!   points, returning a concrete witness segment whenever it answers "yes".
//! * [`sample_visibility_oracle`] — a deliberately simple sampler (fixed
//!   angular grid plus seeded random boundary pairs) sharing nothing with
//!   the engine except [`segment_clearance`]. Free samples found by the
//!   oracle must always be confirmed by the engine; the test suites enforce
//!   this one-sidedness on thousands of random configurations.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::math;
use crate::protocol::Color;

/// Slack for floating-point clearance comparisons. A segment with clearance
/// within this band of a threshold is treated as touching it.
pub const CLEARANCE_TOLERANCE: f64 = 1e-9;

/// Identifier of a robot inside a [`WorldConfig`]; equals its index in
/// [`WorldConfig::robots`].
pub type RobotId = usize;

/// A point of the integer grid.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridPoint {
    /// Horizontal coordinate (all robots agree on this axis).
    pub x: i64,
    /// Vertical coordinate in global terms; robots only know it up to sign.
    pub y: i64,
}

impl GridPoint {
    /// Builds a grid point.
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    /// The point translated by `(dx, dy)`.
    pub const fn offset(self, dx: i64, dy: i64) -> Self {
        Self {
            x: self.x + dx,
            y: self.y + dy,
        }
    }

    /// This grid point as a continuous point.
    pub fn to_vec2(self) -> Vec2 {
        Vec2 {
            x: self.x as f64,
            y: self.y as f64,
        }
    }
}

impl fmt::Debug for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A point (or vector) of the continuous plane.
#[derive(Clone, Copy, PartialEq, Debug, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec2 {
    /// Horizontal component.
    pub x: f64,
    /// Vertical component.
    pub y: f64,
}

impl Vec2 {
    /// Builds a continuous point.
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }

    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }

    fn scale(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }

    fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }
}

/// Robot body radius as an exact rational `num/den`.
///
/// The model requires `0 < rad <= 1/2` so that robots on adjacent grid
/// points never overlap; [`Radius::is_admissible`] checks that bound and
/// [`validate_config`] reports violations as [`ConfigError::RadiusOutOfRange`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Radius {
    /// Numerator (positive).
    pub num: u32,
    /// Denominator (positive).
    pub den: u32,
}

impl Radius {
    /// Radius 1/2: adjacent robots touch.
    pub const HALF: Radius = Radius { num: 1, den: 2 };
    /// Radius 1/4.
    pub const QUARTER: Radius = Radius { num: 1, den: 4 };

    /// Builds a rational radius without validating it; see
    /// [`Radius::is_admissible`].
    pub const fn new(num: u32, den: u32) -> Self {
        Self { num, den }
    }

    /// True when `0 < num/den <= 1/2`.
    pub fn is_admissible(self) -> bool {
        self.num > 0 && self.den > 0 && 2 * (self.num as u64) <= self.den as u64
    }

    /// The radius as a float.
    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Whether a sight segment that exactly grazes an obstacle's boundary is
/// blocked (closed disks) or free (open disks).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BlockingMode {
    /// Obstacle bodies are closed: tangency blocks. This is the default.
    #[default]
    ClosedDisks,
    /// Obstacle bodies are open: tangent segments pass.
    OpenDisks,
}

/// Handedness of a robot's private vertical axis: its notion of "up" is
/// `y_sign()` times global up. Robots agree on the horizontal axis only.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(into = "i8", try_from = "i8"))]
pub enum Chirality {
    /// Local up equals global up.
    #[default]
    Plus,
    /// Local up equals global down.
    Minus,
}

impl Chirality {
    /// `+1` or `-1`: the factor mapping global y-offsets to local ones.
    pub const fn y_sign(self) -> i64 {
        match self {
            Chirality::Plus => 1,
            Chirality::Minus => -1,
        }
    }
}

impl From<Chirality> for i8 {
    fn from(c: Chirality) -> i8 {
        c.y_sign() as i8
    }
}

impl TryFrom<i8> for Chirality {
    type Error = ChiralityParseError;

    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Chirality::Plus),
            -1 => Ok(Chirality::Minus),
            other => Err(ChiralityParseError(other)),
        }
    }
}

/// Error for chirality values other than `+1`/`-1`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ChiralityParseError(pub i8);

impl fmt::Display for ChiralityParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chirality must be 1 or -1, got {}", self.0)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ChiralityParseError {}

/// One robot: a disk body centered on a grid point, an externally visible
/// light, and a private chirality.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Robot {
    /// Index of this robot in its configuration.
    pub id: RobotId,
    /// Center of the robot's disk.
    pub pos: GridPoint,
    /// Currently shown light.
    pub color: Color,
    /// Private vertical handedness (never observable by other robots).
    pub chirality: Chirality,
}

/// A full world state: the robot population plus the shared body radius and
/// blocking convention.
#[derive(Clone, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WorldConfig {
    /// All robots; a robot's [`RobotId`] is its index here.
    pub robots: Vec<Robot>,
    /// Common body radius.
    pub rad: Radius,
    /// Grazing convention for sight segments.
    pub blocking: BlockingMode,
}

impl WorldConfig {
    /// Builds an initial configuration (all lights off) from positions and
    /// chiralities, assigning ids by list order.
    pub fn new(
        robots: impl IntoIterator<Item = (GridPoint, Chirality)>,
        rad: Radius,
        blocking: BlockingMode,
    ) -> Self {
        let robots = robots
            .into_iter()
            .enumerate()
            .map(|(id, (pos, chirality))| Robot {
                id,
                pos,
                color: Color::Off,
                chirality,
            })
            .collect();
        Self {
            robots,
            rad,
            blocking,
        }
    }

    /// Shorthand for an all-[`Chirality::Plus`] initial configuration.
    pub fn from_positions(
        positions: impl IntoIterator<Item = GridPoint>,
        rad: Radius,
        blocking: BlockingMode,
    ) -> Self {
        Self::new(
            positions.into_iter().map(|p| (p, Chirality::Plus)),
            rad,
            blocking,
        )
    }

    /// Number of robots.
    pub fn len(&self) -> usize {
        self.robots.len()
    }

    /// True when the configuration holds no robots.
    pub fn is_empty(&self) -> bool {
        self.robots.is_empty()
    }

    /// The robot with the given id, if any.
    pub fn robot(&self, id: RobotId) -> Result<&Robot, ConfigError> {
        self.robots.get(id).ok_or(ConfigError::UnknownRobot(id))
    }

    /// The robot occupying `pos`, if any.
    pub fn robot_at(&self, pos: GridPoint) -> Option<&Robot> {
        self.robots.iter().find(|r| r.pos == pos)
    }

    /// All positions in id order.
    pub fn positions(&self) -> Vec<GridPoint> {
        self.robots.iter().map(|r| r.pos).collect()
    }
}

/// Rejections raised by [`validate_config`] and id lookups.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ConfigError {
    /// Fewer than three robots; the protocol needs at least three.
    TooFewRobots(usize),
    /// Two robots share a grid point.
    DuplicatePosition(GridPoint),
    /// The body radius is outside `(0, 1/2]`.
    RadiusOutOfRange(Radius),
    /// A robot in a supposedly-initial configuration shows a light other
    /// than off.
    NonInitialColors(RobotId),
    /// A robot id out of range for this configuration.
    UnknownRobot(RobotId),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::TooFewRobots(n) => {
                write!(f, "configuration has {n} robots, need at least 3")
            }
            ConfigError::DuplicatePosition(p) => {
                write!(f, "two robots occupy the same grid point {p:?}")
            }
            ConfigError::RadiusOutOfRange(r) => {
                write!(f, "radius {r} is outside (0, 1/2]")
            }
            ConfigError::NonInitialColors(id) => {
                write!(f, "robot {id} does not start with its light off")
            }
            ConfigError::UnknownRobot(id) => write!(f, "no robot with id {id}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ConfigError {}

/// Checks that `cfg` is a well-formed *initial* configuration: at least
/// three robots, all distinct positions, admissible radius, all lights off.
pub fn validate_config(cfg: &WorldConfig) -> Result<(), ConfigError> {
    if cfg.robots.len() < 3 {
        return Err(ConfigError::TooFewRobots(cfg.robots.len()));
    }
    if !cfg.rad.is_admissible() {
        return Err(ConfigError::RadiusOutOfRange(cfg.rad));
    }
    let mut seen = alloc::collections::BTreeSet::new();
    for r in &cfg.robots {
        if !seen.insert(r.pos) {
            return Err(ConfigError::DuplicatePosition(r.pos));
        }
    }
    for r in &cfg.robots {
        if r.color != Color::Off {
            return Err(ConfigError::NonInitialColors(r.id));
        }
    }
    Ok(())
}

/// Distance from point `p` to the segment `[a, b]` (which may degenerate to
/// a point).
fn dist_point_segment(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 <= 0.0 {
        return p.sub(a).norm();
    }
    let t = p.sub(a).dot(ab) / len2;
    let t = t.clamp(0.0, 1.0);
    p.sub(a.add(ab.scale(t))).norm()
}

/// Clearance of the segment `[a, b]` with respect to disk obstacles of
/// radius `rad` centered at `obstacles`: the smallest distance from the
/// segment to an obstacle center, minus `rad`. Positive means the segment
/// misses every disk; zero means it grazes the nearest one; negative means
/// it cuts into one. With no obstacles the clearance is `+inf`.
pub fn segment_clearance(a: Vec2, b: Vec2, obstacles: &[Vec2], rad: f64) -> f64 {
    let mut best = f64::INFINITY;
    for &o in obstacles {
        let c = dist_point_segment(o, a, b) - rad;
        if c < best {
            best = c;
        }
    }
    best
}

/// A concrete sight segment certifying a positive visibility verdict:
/// `a`/`b` lie on the two robots' boundaries and `clearance` is the
/// segment's clearance against every other robot in the configuration.
#[derive(Clone, Copy, PartialEq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Witness {
    /// Endpoint on the observer's boundary.
    pub a: Vec2,
    /// Endpoint on the observed robot's boundary.
    pub b: Vec2,
    /// Clearance of `[a, b]` against all other robots' centers.
    pub clearance: f64,
}

/// Point on the circle of radius `rad` around `center` at angle `theta`.
fn boundary_point(center: Vec2, rad: f64, theta: f64) -> Vec2 {
    Vec2::new(
        center.x + rad * math::cos(theta),
        center.y + rad * math::sin(theta),
    )
}

/// Obstacles that could possibly interfere with any sight segment between
/// the disks at `ca` and `cb`: every admissible segment stays within `rad`
/// of the center segment, so only obstacles within `2 rad` (plus margin) of
/// it matter.
fn relevant_obstacles(ca: Vec2, cb: Vec2, obstacles: &[Vec2], rad: f64) -> Vec<Vec2> {
    const FILTER_MARGIN: f64 = 1e-6;
    obstacles
        .iter()
        .copied()
        .filter(|&o| dist_point_segment(o, ca, cb) <= 2.0 * rad + FILTER_MARGIN)
        .collect()
}

/// Outcome of the exact integer test for an obstacle sitting on the open
/// center segment between two robots.
fn collinear_blocker_between(ca: GridPoint, cb: GridPoint, o: GridPoint) -> bool {
    let dx = cb.x - ca.x;
    let dy = cb.y - ca.y;
    let ox = o.x - ca.x;
    let oy = o.y - ca.y;
    let cross = dx * oy - dy * ox;
    if cross != 0 {
        return false;
    }
    let dot = dx * ox + dy * oy;
    let len2 = dx * dx + dy * dy;
    dot > 0 && dot < len2
}

/// Maximum number of clearance evaluations the branch-and-bound search may
/// spend on a single pair before conservatively reporting the best verdict
/// found so far.
const BNB_EVAL_CAP: usize = 400_000;

/// Result of maximizing segment clearance over boundary-point pairs.
struct MaxClearance {
    value: f64,
    theta_a: f64,
    theta_b: f64,
    /// False when the search exhausted its budget before certifying the
    /// verdict either way.
    certified: bool,
}

/// Branch-and-bound maximization of
/// `f(theta_a, theta_b) = segment_clearance(pa(theta_a), pb(theta_b), obstacles, rad)`
/// over the torus of boundary-angle pairs.
///
/// `f` is Lipschitz in each angle with constant `rad` (moving an endpoint
/// along its circle by an angle `d` displaces it by at most `rad * d`, and
/// point-segment distances are 1-Lipschitz in each endpoint), so the value
/// anywhere in a cell of half-widths `(wa/2, wb/2)` around its center is at
/// most `f(center) + rad * max(wa, wb) / 2`. Cells whose bound cannot beat
/// `give_up_below` are pruned; the search stops early once a value of at
/// least `accept_at` is found.
fn max_clearance_over_boundary_pairs(
    ca: Vec2,
    cb: Vec2,
    obstacles: &[Vec2],
    rad: f64,
    accept_at: f64,
    give_up_below: f64,
) -> MaxClearance {
    use alloc::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Cell {
        ub: f64,
        val: f64,
        ta: f64,
        tb: f64,
        wa: f64,
        wb: f64,
    }
    impl Eq for Cell {}
    impl PartialOrd for Cell {
        fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Cell {
        fn cmp(&self, other: &Self) -> core::cmp::Ordering {
            self.ub.total_cmp(&other.ub)
        }
    }

    let full = core::f64::consts::TAU;
    let eval = |ta: f64, tb: f64| {
        segment_clearance(
            boundary_point(ca, rad, ta),
            boundary_point(cb, rad, tb),
            obstacles,
            rad,
        )
    };

    let mut evals = 0usize;
    let mut best = MaxClearance {
        value: f64::NEG_INFINITY,
        theta_a: 0.0,
        theta_b: 0.0,
        certified: true,
    };
    let mut heap = BinaryHeap::new();

    const INIT: usize = 16;
    let w0 = full / INIT as f64;
    for i in 0..INIT {
        for j in 0..INIT {
            let ta = (i as f64 + 0.5) * w0;
            let tb = (j as f64 + 0.5) * w0;
            let val = eval(ta, tb);
            evals += 1;
            if val > best.value {
                best = MaxClearance {
                    value: val,
                    theta_a: ta,
                    theta_b: tb,
                    certified: true,
                };
            }
            heap.push(Cell {
                ub: val + rad * w0 / 2.0,
                val,
                ta,
                tb,
                wa: w0,
                wb: w0,
            });
        }
    }

    const MIN_WIDTH: f64 = 1e-10;
    while let Some(cell) = heap.pop() {
        if best.value >= accept_at {
            return best;
        }
        // The heap is ordered by upper bound, so once the best remaining
        // bound is below the give-up threshold no cell can change the
        // verdict.
        if cell.ub < give_up_below {
            break;
        }
        if cell.wa.max(cell.wb) < MIN_WIDTH {
            continue;
        }
        if evals >= BNB_EVAL_CAP {
            best.certified = false;
            break;
        }
        let (ha, hb) = (cell.wa / 2.0, cell.wb / 2.0);
        for (sa, sb) in [(-0.5, -0.5), (-0.5, 0.5), (0.5, -0.5), (0.5, 0.5)] {
            let ta = cell.ta + sa * ha;
            let tb = cell.tb + sb * hb;
            let val = eval(ta, tb);
            evals += 1;
            if val > best.value {
                best = MaxClearance {
                    value: val,
                    theta_a: ta,
                    theta_b: tb,
                    certified: best.certified,
                };
            }
            heap.push(Cell {
                ub: val + rad * ha.max(hb) / 2.0,
                val,
                ta,
                tb,
                wa: ha,
                wb: hb,
            });
        }
    }
    best
}

/// Local pattern-search refinement of a boundary-pair candidate, used to
/// sharpen witness clearances once the search has located a promising pair.
fn polish_boundary_pair(
    ca: Vec2,
    cb: Vec2,
    obstacles: &[Vec2],
    rad: f64,
    mut ta: f64,
    mut tb: f64,
) -> (f64, f64, f64) {
    let eval = |ta: f64, tb: f64| {
        segment_clearance(
            boundary_point(ca, rad, ta),
            boundary_point(cb, rad, tb),
            obstacles,
            rad,
        )
    };
    let mut val = eval(ta, tb);
    let mut step = 0.05;
    while step > 1e-12 {
        let mut improved = false;
        for (da, db) in [
            (1.0, 0.0),
            (-1.0, 0.0),
            (0.0, 1.0),
            (0.0, -1.0),
            (1.0, 1.0),
            (-1.0, -1.0),
            (1.0, -1.0),
            (-1.0, 1.0),
        ] {
            let cand = eval(ta + da * step, tb + db * step);
            if cand > val {
                val = cand;
                ta += da * step;
                tb += db * step;
                improved = true;
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (val, ta, tb)
}

/// Re-rolls the floating-point round-off of a grazing tangent segment until
/// its computed clearance lands nonnegative. Two knobs are tried, both far
/// below the scale the rest of the engine can resolve:
///
/// * sliding the endpoints along the segment's own line in sub-nanometer
///   steps, which keeps the supporting line (and thus the exact clearance)
///   untouched and merely re-rounds the distance arithmetic;
/// * growing the perpendicular offset `off` by a few units of `rad * ulp`,
///   which counteracts the systematic bias left by rounding the endpoint
///   coordinates — the stored endpoints stay within one or two ulp of a
///   true boundary point, the same guarantee every boundary evaluation has.
fn settle_tangent_segment(
    va: Vec2,
    vb: Vec2,
    off: Vec2,
    u: Vec2,
    obstacles: &[Vec2],
    rad: f64,
) -> Option<(Vec2, Vec2, f64)> {
    const SLIDES: [f64; 5] = [0.0, 1e-9, -1e-9, 2e-9, -2e-9];
    for k in 0..=12 {
        let grown = off.scale(1.0 + (4 * k) as f64 * f64::EPSILON);
        for &sa in &SLIDES {
            for &sb in &SLIDES {
                let a = va.add(grown).add(u.scale(sa));
                let b = vb.add(grown).add(u.scale(sb));
                let c = segment_clearance(a, b, obstacles, rad);
                if c >= 0.0 {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// Re-rolls the round-off of a grazing boundary-pair candidate by nudging
/// both boundary angles within ±1.4e-8 radians and growing the boundary
/// radius by a few units of `rad * ulp`. Over those ranges the true
/// clearance of a segment at a grazing optimum changes by less than one ulp
/// of the evaluation, so the search only re-rounds the arithmetic. Returns
/// the first nudged segment whose computed clearance lands nonnegative.
fn settle_boundary_pair(
    ca: Vec2,
    cb: Vec2,
    obstacles: &[Vec2],
    rad: f64,
    ta: f64,
    tb: f64,
) -> Option<(Vec2, Vec2, f64)> {
    const NUDGES: [f64; 7] = [0.0, 2e-9, -2e-9, 7e-9, -7e-9, 1.4e-8, -1.4e-8];
    for k in 0..=12 {
        let grown = rad * (1.0 + (4 * k) as f64 * f64::EPSILON);
        for &da in &NUDGES {
            for &db in &NUDGES {
                let a = boundary_point(ca, grown, ta + da);
                let b = boundary_point(cb, grown, tb + db);
                let c = segment_clearance(a, b, obstacles, rad);
                if c >= 0.0 {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// Full visibility verdict for the ordered pair `(a, b)`, with a concrete
/// witness segment when the answer is "visible".
pub fn visible_with_witness(
    cfg: &WorldConfig,
    a: RobotId,
    b: RobotId,
) -> Result<(bool, Option<Witness>), ConfigError> {
    let ra = cfg.robot(a)?;
    let rb = cfg.robot(b)?;
    if a == b {
        return Ok((true, None));
    }
    let obstacles: Vec<GridPoint> = cfg
        .robots
        .iter()
        .filter(|r| r.id != a && r.id != b)
        .map(|r| r.pos)
        .collect();
    Ok(pair_visibility(
        ra.pos,
        rb.pos,
        &obstacles,
        cfg.rad.as_f64(),
        cfg.blocking,
    ))
}

/// Whether robot `a` sees robot `b` in `cfg`. Symmetric in `a` and `b`.
pub fn visible(cfg: &WorldConfig, a: RobotId, b: RobotId) -> Result<bool, ConfigError> {
    visible_with_witness(cfg, a, b).map(|(v, _)| v)
}

/// Engine kernel: decides visibility between disks centered at grid points
/// `ca` and `cb` against the given obstacle centers.
fn pair_visibility(
    ca: GridPoint,
    cb: GridPoint,
    obstacle_points: &[GridPoint],
    rad: f64,
    blocking: BlockingMode,
) -> (bool, Option<Witness>) {
    let va = ca.to_vec2();
    let vb = cb.to_vec2();
    let all: Vec<Vec2> = obstacle_points.iter().map(|p| p.to_vec2()).collect();
    let near = relevant_obstacles(va, vb, &all, rad);

    let dir = vb.sub(va);
    let len = dir.norm();
    let u = dir.scale(1.0 / len);

    // Fast path: nothing within reach of any admissible segment.
    if near.is_empty() {
        let pa = va.add(u.scale(rad));
        let pb = vb.sub(u.scale(rad));
        let clearance = segment_clearance(pa, pb, &all, rad);
        return (
            true,
            Some(Witness {
                a: pa,
                b: pb,
                clearance,
            }),
        );
    }

    // Exact certificate: an obstacle center strictly between the two
    // centers and exactly on their line. Equal radii then cap the best
    // possible clearance at exactly zero, so closed disks always block.
    let collinear_blocker = obstacle_points
        .iter()
        .any(|&o| collinear_blocker_between(ca, cb, o));
    if collinear_blocker {
        match blocking {
            BlockingMode::ClosedDisks => return (false, None),
            BlockingMode::OpenDisks => {
                // Try the two straight segments tangent to the blocking
                // disk: the center segment shifted perpendicularly by one
                // radius. They realize the zero-clearance supremum when the
                // corresponding side is otherwise free.
                let n = Vec2::new(-u.y, u.x);
                for side in [1.0, -1.0] {
                    let off = n.scale(side * rad);
                    let pa = va.add(off);
                    let pb = vb.add(off);
                    let clearance = segment_clearance(pa, pb, &all, rad);
                    if clearance >= 0.0 {
                        return (
                            true,
                            Some(Witness {
                                a: pa,
                                b: pb,
                                clearance,
                            }),
                        );
                    }
                    if clearance >= -CLEARANCE_TOLERANCE {
                        // Grazing, but the rounded evaluation dipped below
                        // zero: re-roll the round-off until it lands the
                        // other way.
                        if let Some((a, b, c)) = settle_tangent_segment(va, vb, off, u, &all, rad) {
                            return (true, Some(Witness { a, b, clearance: c }));
                        }
                        return (
                            true,
                            Some(Witness {
                                a: pa,
                                b: pb,
                                clearance,
                            }),
                        );
                    }
                }
                // Both tangent sides are crowded; fall through to the
                // general search.
            }
        }
    }

    // Fast path: the trimmed center segment already clears everything.
    let pa = va.add(u.scale(rad));
    let pb = vb.sub(u.scale(rad));
    let center_clearance = segment_clearance(pa, pb, &near, rad);
    if center_clearance > CLEARANCE_TOLERANCE {
        let clearance = segment_clearance(pa, pb, &all, rad);
        if clearance > CLEARANCE_TOLERANCE {
            return (
                true,
                Some(Witness {
                    a: pa,
                    b: pb,
                    clearance,
                }),
            );
        }
    }

    // General case: maximize clearance over boundary-point pairs.
    let (accept_at, free_at) = match blocking {
        BlockingMode::ClosedDisks => (CLEARANCE_TOLERANCE, CLEARANCE_TOLERANCE),
        // Grazing counts as free: accept once the supremum is provably
        // nonnegative up to tolerance.
        BlockingMode::OpenDisks => (0.0, -CLEARANCE_TOLERANCE),
    };
    let found = max_clearance_over_boundary_pairs(va, vb, &near, rad, accept_at, free_at);
    let (val, ta, tb) = polish_boundary_pair(va, vb, &near, rad, found.theta_a, found.theta_b);
    let val = val.max(found.value);
    let is_free = match blocking {
        BlockingMode::ClosedDisks => val > CLEARANCE_TOLERANCE,
        BlockingMode::OpenDisks => val >= -CLEARANCE_TOLERANCE,
    };
    if is_free {
        let pa = boundary_point(va, rad, ta);
        let pb = boundary_point(vb, rad, tb);
        let clearance = segment_clearance(pa, pb, &all, rad);
        if clearance < 0.0 && blocking == BlockingMode::OpenDisks {
            // A grazing optimum whose rounded evaluation dipped below zero:
            // nudge the boundary angles until it rounds the other way.
            if let Some((a, b, c)) = settle_boundary_pair(va, vb, &all, rad, ta, tb) {
                return (true, Some(Witness { a, b, clearance: c }));
            }
        }
        (
            true,
            Some(Witness {
                a: pa,
                b: pb,
                clearance,
            }),
        )
    } else {
        (false, None)
    }
}

/// Independent sampling check for visibility: evaluates a fixed angular grid
/// of boundary-point pairs plus `trials` random pairs drawn from a seeded
/// generator, and reports whether any sampled segment is free under the
/// configuration's blocking mode.
///
/// The oracle is one-sided by construction: every segment it samples is an
/// admissible sight segment, so `true` here must imply [`visible`] answers
/// `true`. It deliberately shares no search logic with the engine.
pub fn sample_visibility_oracle(
    cfg: &WorldConfig,
    a: RobotId,
    b: RobotId,
    trials: usize,
    seed: u64,
) -> Result<bool, ConfigError> {
    let ra = cfg.robot(a)?;
    let rb = cfg.robot(b)?;
    if a == b {
        return Ok(true);
    }
    let rad = cfg.rad.as_f64();
    let ca = ra.pos.to_vec2();
    let cb = rb.pos.to_vec2();
    let obstacles: Vec<Vec2> = cfg
        .robots
        .iter()
        .filter(|r| r.id != a && r.id != b)
        .map(|r| r.pos.to_vec2())
        .collect();
    let free = |clearance: f64| match cfg.blocking {
        BlockingMode::ClosedDisks => clearance > CLEARANCE_TOLERANCE,
        BlockingMode::OpenDisks => clearance >= -CLEARANCE_TOLERANCE,
    };

    let full = core::f64::consts::TAU;
    const GRID: usize = 24;
    for i in 0..GRID {
        for j in 0..GRID {
            let ta = i as f64 / GRID as f64 * full;
            let tb = j as f64 / GRID as f64 * full;
            let c = segment_clearance(
                boundary_point(ca, rad, ta),
                boundary_point(cb, rad, tb),
                &obstacles,
                rad,
            );
            if free(c) {
                return Ok(true);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let ta = rng.random_range(0.0..full);
        let tb = rng.random_range(0.0..full);
        let c = segment_clearance(
            boundary_point(ca, rad, ta),
            boundary_point(cb, rad, tb),
            &obstacles,
            rad,
        );
        if free(c) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Memoizing front end to the visibility kernel for simulator use.
///
/// Geometry depends only on the *relative* layout (all coordinates are
/// integers, so translation is exact), hence verdicts are cached under the
/// pair's offset vector plus the offsets of the obstacles that survive the
/// reach filter. Configurations encountered along a run share most of their
/// local layouts, which makes look processing cheap.
#[derive(Clone, Debug)]
pub struct VisibilityCache {
    rad: Radius,
    blocking: BlockingMode,
    memo: BTreeMap<(GridPoint, Vec<GridPoint>), bool>,
    hits: u64,
    misses: u64,
}

impl VisibilityCache {
    /// Creates an empty cache for the given radius and blocking mode.
    pub fn new(rad: Radius, blocking: BlockingMode) -> Self {
        Self {
            rad,
            blocking,
            memo: BTreeMap::new(),
            hits: 0,
            misses: 0,
        }
    }

    /// Visibility between the robots at `positions[a]` and `positions[b]`
    /// with every other listed position acting as an obstacle.
    pub fn visible_between(&mut self, positions: &[GridPoint], a: usize, b: usize) -> bool {
        if a == b {
            return true;
        }
        let (pa, pb) = (positions[a], positions[b]);
        // Canonical orientation: smaller endpoint first (visibility is
        // symmetric), then translate it to the origin.
        let (pa, pb) = if pa <= pb { (pa, pb) } else { (pb, pa) };
        let delta = GridPoint::new(pb.x - pa.x, pb.y - pa.y);
        let rad = self.rad.as_f64();
        let va = pa.to_vec2();
        let vb = pb.to_vec2();
        let mut near: Vec<GridPoint> = positions
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != a && i != b)
            .map(|(_, &p)| p)
            .filter(|&o| dist_point_segment(o.to_vec2(), va, vb) <= 2.0 * rad + 1e-6)
            .map(|o| GridPoint::new(o.x - pa.x, o.y - pa.y))
            .collect();
        near.sort_unstable();
        let key = (delta, near);
        if let Some(&v) = self.memo.get(&key) {
            self.hits += 1;
            return v;
        }
        self.misses += 1;
        let origin = GridPoint::new(0, 0);
        let (v, _) = pair_visibility(origin, key.0, &key.1, rad, self.blocking);
        self.memo.insert(key, v);
        v
    }

    /// `(hits, misses)` counters for diagnostics.
    pub fn stats(&self) -> (u64, u64) {
        (self.hits, self.misses)
    }
}
