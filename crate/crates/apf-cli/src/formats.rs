//! File formats: config/pattern JSON, trace JSON Lines, and verdict JSON.
//!
//! A trace file is self-contained: its header line holds the initial
//! configuration, the target pattern, and every run option, so a persisted
//! trace can be replayed event by event (for rendering or auditing) and its
//! verdict can be recomputed from scratch and compared byte for byte.

use std::fmt;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use apf_core::embedding::{PatternError, TargetPattern};
use apf_core::geometry::{
    validate_config, BlockingMode, Chirality, ConfigError, GridPoint, Radius, WorldConfig,
};
use apf_core::protocol::{Color, MoveDir, ProtocolOptions};
use apf_core::sim::{
    run, Outcome, RunOptions, RunReport, SchedulerPolicy, SetupError, TraceRecord, TraceStep,
};

/// Errors raised while loading or decoding input and trace files.
#[derive(Debug)]
pub enum LoadError {
    /// The file could not be read or written.
    Io {
        /// Offending path.
        path: PathBuf,
        /// Underlying error.
        source: io::Error,
    },
    /// The file is not well-formed JSON (or JSON Lines).
    Parse {
        /// Offending path.
        path: PathBuf,
        /// 1-based line of the error.
        line: usize,
        /// 1-based column of the error.
        column: usize,
        /// Decoder message (names the offending field where known).
        msg: String,
    },
    /// A field decoded but holds an unusable value.
    BadField {
        /// Offending path.
        path: PathBuf,
        /// Field name.
        field: &'static str,
        /// What was wrong.
        msg: String,
    },
    /// The decoded configuration failed validation.
    Config(ConfigError),
    /// The decoded pattern failed validation.
    Pattern(PatternError),
    /// Robot and target counts differ.
    SizeMismatch {
        /// Number of robots in the configuration.
        robots: usize,
        /// Number of points in the pattern.
        targets: usize,
    },
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            LoadError::Parse {
                path,
                line,
                column,
                msg,
            } => {
                write!(f, "{}:{line}:{column}: parse error: {msg}", path.display())
            }
            LoadError::BadField { path, field, msg } => {
                write!(f, "{}: field `{field}`: {msg}", path.display())
            }
            LoadError::Config(e) => write!(f, "invalid configuration: {e}"),
            LoadError::Pattern(e) => write!(f, "invalid pattern: {e}"),
            LoadError::SizeMismatch { robots, targets } => {
                write!(f, "{robots} robots cannot form a {targets}-point pattern")
            }
        }
    }
}

impl std::error::Error for LoadError {}

impl From<ConfigError> for LoadError {
    fn from(e: ConfigError) -> Self {
        LoadError::Config(e)
    }
}

impl From<PatternError> for LoadError {
    fn from(e: PatternError) -> Self {
        LoadError::Pattern(e)
    }
}

fn io_err(path: &Path, source: io::Error) -> LoadError {
    LoadError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, e: &serde_json::Error, line_offset: usize) -> LoadError {
    LoadError::Parse {
        path: path.to_path_buf(),
        line: e.line() + line_offset,
        column: e.column(),
        msg: e.to_string(),
    }
}

/// One robot as stored in config files and trace headers.
#[derive(Clone, Copy, Serialize, Deserialize, Debug)]
pub struct RobotLine {
    /// Grid cell `[x, y]`.
    pub pos: [i64; 2],
    /// `1` (local up = global up) or `-1`; defaults to `1`.
    #[serde(default = "default_chirality")]
    pub chirality: i8,
}

fn default_chirality() -> i8 {
    1
}

fn default_blocking() -> String {
    "closed".to_owned()
}

#[derive(Deserialize)]
struct ConfigFile {
    rad: String,
    #[serde(default = "default_blocking")]
    blocking: String,
    robots: Vec<RobotLine>,
}

#[derive(Deserialize)]
struct PatternFile {
    targets: Vec<[i64; 2]>,
}

/// Parses a rational radius written as `"num/den"`.
pub fn parse_radius(s: &str) -> Result<Radius, String> {
    let (num, den) = s
        .split_once('/')
        .ok_or_else(|| format!("expected `num/den`, got `{s}`"))?;
    let num: u32 = num.trim().parse().map_err(|e| format!("numerator: {e}"))?;
    let den: u32 = den
        .trim()
        .parse()
        .map_err(|e| format!("denominator: {e}"))?;
    Ok(Radius::new(num, den))
}

/// Parses a blocking mode name: `closed` or `open`.
pub fn parse_blocking(s: &str) -> Result<BlockingMode, String> {
    match s {
        "closed" => Ok(BlockingMode::ClosedDisks),
        "open" => Ok(BlockingMode::OpenDisks),
        other => Err(format!("expected `closed` or `open`, got `{other}`")),
    }
}

/// Blocking mode name as stored in files.
pub fn blocking_name(b: BlockingMode) -> &'static str {
    match b {
        BlockingMode::ClosedDisks => "closed",
        BlockingMode::OpenDisks => "open",
    }
}

fn chirality_from_i8(path: &Path, v: i8) -> Result<Chirality, LoadError> {
    Chirality::try_from(v).map_err(|e| LoadError::BadField {
        path: path.to_path_buf(),
        field: "chirality",
        msg: e.to_string(),
    })
}

/// Loads and validates a world configuration from a JSON file of the shape
/// `{"rad":"1/2","blocking":"closed","robots":[{"pos":[x,y],"chirality":1},…]}`.
pub fn load_config(path: &Path) -> Result<WorldConfig, LoadError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let file: ConfigFile = serde_json::from_str(&text).map_err(|e| parse_err(path, &e, 0))?;
    let rad = parse_radius(&file.rad).map_err(|msg| LoadError::BadField {
        path: path.to_path_buf(),
        field: "rad",
        msg,
    })?;
    let blocking = parse_blocking(&file.blocking).map_err(|msg| LoadError::BadField {
        path: path.to_path_buf(),
        field: "blocking",
        msg,
    })?;
    let mut robots = Vec::with_capacity(file.robots.len());
    for r in &file.robots {
        robots.push((
            GridPoint::new(r.pos[0], r.pos[1]),
            chirality_from_i8(path, r.chirality)?,
        ));
    }
    let cfg = WorldConfig::new(robots, rad, blocking);
    validate_config(&cfg)?;
    Ok(cfg)
}

/// Loads a target pattern from a JSON file of the shape
/// `{"targets":[[x,y],…]}`. Validation happens at embedding time.
pub fn load_pattern(path: &Path) -> Result<TargetPattern, LoadError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let file: PatternFile = serde_json::from_str(&text).map_err(|e| parse_err(path, &e, 0))?;
    Ok(TargetPattern::new(
        file.targets.into_iter().map(|[x, y]| GridPoint::new(x, y)),
    ))
}

/// Loads both input files, validating the configuration and checking that
/// robot and target counts agree.
pub fn load_inputs(
    config_path: &Path,
    pattern_path: &Path,
) -> Result<(WorldConfig, TargetPattern), LoadError> {
    let cfg = load_config(config_path)?;
    let pattern = load_pattern(pattern_path)?;
    if cfg.len() != pattern.len() {
        return Err(LoadError::SizeMismatch {
            robots: cfg.len(),
            targets: pattern.len(),
        });
    }
    Ok((cfg, pattern))
}

/// Protocol switches stored in a trace header.
#[derive(Clone, Copy, Serialize, Deserialize, Debug)]
pub struct ProtocolLine {
    /// Whether only leftmost-column terminals may volunteer for election.
    pub liftoff_leftmost_only: bool,
}

/// First line of a trace file: everything needed to replay the run.
#[derive(Clone, Serialize, Deserialize, Debug)]
pub struct TraceHeader {
    /// Scheduler seed.
    pub seed: u64,
    /// Scheduler policy name: `fsync`, `ssync`, `async-random` or
    /// `async-adversarial`.
    pub policy: String,
    /// Activation probability (ssync only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Blocking mode name.
    pub blocking: String,
    /// Body radius as `"num/den"`.
    pub rad: String,
    /// Event budget of the run.
    pub max_events: u64,
    /// Staleness bound of the asynchronous schedulers.
    pub pending_window: u32,
    /// Explicit stuck window, if one was set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stuck_window: Option<u64>,
    /// Protocol switches in force.
    pub protocol: ProtocolLine,
    /// Initial robots in id order.
    pub robots: Vec<RobotLine>,
    /// Target pattern points as given (before embedding).
    pub targets: Vec<[i64; 2]>,
}

impl TraceHeader {
    /// Captures the inputs and options of a run.
    pub fn from_run(cfg: &WorldConfig, pattern: &TargetPattern, opts: &RunOptions) -> Self {
        let (policy, p) = match opts.scheduler {
            SchedulerPolicy::Fsync => ("fsync", None),
            SchedulerPolicy::Ssync { p } => ("ssync", Some(p)),
            SchedulerPolicy::AsyncRandom => ("async-random", None),
            SchedulerPolicy::AsyncAdversarial => ("async-adversarial", None),
        };
        TraceHeader {
            seed: opts.seed,
            policy: policy.to_owned(),
            p,
            blocking: blocking_name(cfg.blocking).to_owned(),
            rad: cfg.rad.to_string(),
            max_events: opts.max_events,
            pending_window: opts.pending_window,
            stuck_window: opts.stuck_window,
            protocol: ProtocolLine {
                liftoff_leftmost_only: opts.protocol.liftoff_leftmost_only,
            },
            robots: cfg
                .robots
                .iter()
                .map(|r| RobotLine {
                    pos: [r.pos.x, r.pos.y],
                    chirality: r.chirality.y_sign() as i8,
                })
                .collect(),
            targets: pattern.points.iter().map(|p| [p.x, p.y]).collect(),
        }
    }

    /// Rebuilds the initial world configuration.
    pub fn world_config(&self, path: &Path) -> Result<WorldConfig, LoadError> {
        let rad = parse_radius(&self.rad).map_err(|msg| LoadError::BadField {
            path: path.to_path_buf(),
            field: "rad",
            msg,
        })?;
        let blocking = parse_blocking(&self.blocking).map_err(|msg| LoadError::BadField {
            path: path.to_path_buf(),
            field: "blocking",
            msg,
        })?;
        let mut robots = Vec::with_capacity(self.robots.len());
        for r in &self.robots {
            robots.push((
                GridPoint::new(r.pos[0], r.pos[1]),
                chirality_from_i8(path, r.chirality)?,
            ));
        }
        Ok(WorldConfig::new(robots, rad, blocking))
    }

    /// Rebuilds the target pattern.
    pub fn pattern(&self) -> TargetPattern {
        TargetPattern::new(self.targets.iter().map(|&[x, y]| GridPoint::new(x, y)))
    }

    /// Rebuilds the run options (with trace recording on).
    pub fn run_options(&self, path: &Path) -> Result<RunOptions, LoadError> {
        let scheduler = match self.policy.as_str() {
            "fsync" => SchedulerPolicy::Fsync,
            "ssync" => SchedulerPolicy::Ssync {
                p: self.p.ok_or(LoadError::BadField {
                    path: path.to_path_buf(),
                    field: "p",
                    msg: "ssync policy needs an activation probability".to_owned(),
                })?,
            },
            "async-random" => SchedulerPolicy::AsyncRandom,
            "async-adversarial" => SchedulerPolicy::AsyncAdversarial,
            other => {
                return Err(LoadError::BadField {
                    path: path.to_path_buf(),
                    field: "policy",
                    msg: format!("unknown scheduler `{other}`"),
                })
            }
        };
        Ok(RunOptions {
            scheduler,
            seed: self.seed,
            max_events: self.max_events,
            pending_window: self.pending_window,
            stuck_window: self.stuck_window,
            protocol: ProtocolOptions {
                liftoff_leftmost_only: self.protocol.liftoff_leftmost_only,
            },
            record_trace: true,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct DecLine {
    col: String,
    mv: String,
}

#[derive(Serialize, Deserialize)]
struct TraceLine {
    seq: u64,
    r: usize,
    k: String,
    pos: [i64; 2],
    col: String,
    dec: Option<DecLine>,
}

fn parse_color(path: &Path, s: &str) -> Result<Color, LoadError> {
    Color::parse(s).ok_or_else(|| LoadError::BadField {
        path: path.to_path_buf(),
        field: "col",
        msg: format!("unknown color `{s}`"),
    })
}

fn parse_move_tag(path: &Path, s: &str) -> Result<MoveDir, LoadError> {
    [
        MoveDir::None,
        MoveDir::Left,
        MoveDir::Right,
        MoveDir::LocalUp,
        MoveDir::LocalDown,
    ]
    .into_iter()
    .find(|m| m.tag() == s)
    .ok_or_else(|| LoadError::BadField {
        path: path.to_path_buf(),
        field: "mv",
        msg: format!("unknown move tag `{s}`"),
    })
}

/// Tracks positions and colors while walking trace records in order.
///
/// The cursor checks each record for legality: moves must start from the
/// tracked cell, step one unit, and land on a free cell.
pub struct TraceCursor {
    positions: Vec<GridPoint>,
    colors: Vec<Color>,
}

/// A trace record that contradicts the state accumulated before it.
#[derive(Debug, PartialEq, Eq)]
pub enum ReplayError {
    /// A move's origin does not match the robot's tracked cell.
    OriginMismatch {
        /// Offending robot.
        robot: usize,
        /// Sequence number of the record.
        seq: u64,
    },
    /// A move is not a unit step (or not a step at all).
    NotUnitStep {
        /// Offending robot.
        robot: usize,
        /// Sequence number of the record.
        seq: u64,
    },
    /// A move lands on an occupied cell.
    CollisionInTrace {
        /// Offending robot.
        robot: usize,
        /// Robot already on the cell.
        obstacle: usize,
        /// Sequence number of the record.
        seq: u64,
    },
    /// A robot id is out of range.
    UnknownRobot {
        /// Offending robot.
        robot: usize,
        /// Sequence number of the record.
        seq: u64,
    },
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayError::OriginMismatch { robot, seq } => {
                write!(
                    f,
                    "record {seq}: robot {robot} moved from a cell it was not on"
                )
            }
            ReplayError::NotUnitStep { robot, seq } => {
                write!(f, "record {seq}: robot {robot} moved more than one cell")
            }
            ReplayError::CollisionInTrace {
                robot,
                obstacle,
                seq,
            } => {
                write!(f, "record {seq}: robot {robot} moved onto robot {obstacle}")
            }
            ReplayError::UnknownRobot { robot, seq } => {
                write!(f, "record {seq}: unknown robot {robot}")
            }
        }
    }
}

impl std::error::Error for ReplayError {}

impl TraceCursor {
    /// Starts at the initial state of `cfg`.
    pub fn new(cfg: &WorldConfig) -> Self {
        TraceCursor {
            positions: cfg.robots.iter().map(|r| r.pos).collect(),
            colors: cfg.robots.iter().map(|r| r.color).collect(),
        }
    }

    /// Current cell of each robot, in id order.
    pub fn positions(&self) -> &[GridPoint] {
        &self.positions
    }

    /// Current light of each robot, in id order.
    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    /// Applies one record, checking it against the tracked state.
    pub fn apply(&mut self, rec: &TraceRecord) -> Result<(), ReplayError> {
        let r = rec.robot;
        if r >= self.positions.len() {
            return Err(ReplayError::UnknownRobot {
                robot: r,
                seq: rec.seq,
            });
        }
        match rec.step {
            TraceStep::Looked { .. } => Ok(()),
            TraceStep::Moved { from, to } => {
                if self.positions[r] != from {
                    return Err(ReplayError::OriginMismatch {
                        robot: r,
                        seq: rec.seq,
                    });
                }
                if (to.x - from.x).abs() + (to.y - from.y).abs() != 1 {
                    return Err(ReplayError::NotUnitStep {
                        robot: r,
                        seq: rec.seq,
                    });
                }
                if let Some(obstacle) = self.positions.iter().position(|&p| p == to) {
                    return Err(ReplayError::CollisionInTrace {
                        robot: r,
                        obstacle,
                        seq: rec.seq,
                    });
                }
                self.positions[r] = to;
                Ok(())
            }
            TraceStep::Lit { from: _, to } => {
                self.colors[r] = to;
                Ok(())
            }
        }
    }
}

/// A decoded trace file.
pub struct ParsedTrace {
    /// The header line.
    pub header: TraceHeader,
    /// The recorded events, in order.
    pub records: Vec<TraceRecord>,
}

/// Writes a complete trace file: header line, then one JSON line per event.
pub fn write_trace<W: Write>(
    mut w: W,
    header: &TraceHeader,
    cfg: &WorldConfig,
    records: &[TraceRecord],
) -> io::Result<()> {
    let hdr = serde_json::to_string(header).expect("header serializes");
    writeln!(w, "{hdr}")?;
    let mut cursor = TraceCursor::new(cfg);
    for rec in records {
        let r = rec.robot;
        let line = match rec.step {
            TraceStep::Looked { color, mv } => TraceLine {
                seq: rec.seq,
                r,
                k: "look".to_owned(),
                pos: [cursor.positions()[r].x, cursor.positions()[r].y],
                col: cursor.colors()[r].name().to_owned(),
                dec: Some(DecLine {
                    col: color.name().to_owned(),
                    mv: mv.tag().to_owned(),
                }),
            },
            TraceStep::Moved { to, .. } => TraceLine {
                seq: rec.seq,
                r,
                k: "move".to_owned(),
                pos: [to.x, to.y],
                col: cursor.colors()[r].name().to_owned(),
                dec: None,
            },
            TraceStep::Lit { to, .. } => TraceLine {
                seq: rec.seq,
                r,
                k: "color".to_owned(),
                pos: [cursor.positions()[r].x, cursor.positions()[r].y],
                col: to.name().to_owned(),
                dec: None,
            },
        };
        cursor
            .apply(rec)
            .expect("a recorded trace replays over itself");
        let line = serde_json::to_string(&line).expect("record serializes");
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Reads a trace file back into records, reconstructing move origins and
/// previous colors from the header's initial state.
pub fn read_trace<R: BufRead>(reader: R, path: &Path) -> Result<ParsedTrace, LoadError> {
    let mut lines = reader.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| LoadError::Parse {
        path: path.to_path_buf(),
        line: 1,
        column: 1,
        msg: "empty trace file".to_owned(),
    })?;
    let first = first.map_err(|e| io_err(path, e))?;
    let header: TraceHeader = serde_json::from_str(&first).map_err(|e| parse_err(path, &e, 0))?;
    let cfg = header.world_config(path)?;
    let mut cursor = TraceCursor::new(&cfg);
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: TraceLine =
            serde_json::from_str(&line).map_err(|e| parse_err(path, &e, idx))?;
        let bad = |field: &'static str, msg: String| LoadError::BadField {
            path: path.to_path_buf(),
            field,
            msg,
        };
        if parsed.r >= cursor.positions().len() {
            return Err(bad(
                "r",
                format!("unknown robot {} on line {}", parsed.r, idx + 1),
            ));
        }
        let step = match parsed.k.as_str() {
            "look" => {
                let dec = parsed.dec.ok_or_else(|| {
                    bad(
                        "dec",
                        format!("look record without a decision on line {}", idx + 1),
                    )
                })?;
                TraceStep::Looked {
                    color: parse_color(path, &dec.col)?,
                    mv: parse_move_tag(path, &dec.mv)?,
                }
            }
            "move" => TraceStep::Moved {
                from: cursor.positions()[parsed.r],
                to: GridPoint::new(parsed.pos[0], parsed.pos[1]),
            },
            "color" => TraceStep::Lit {
                from: cursor.colors()[parsed.r],
                to: parse_color(path, &parsed.col)?,
            },
            other => {
                return Err(bad(
                    "k",
                    format!("unknown record kind `{other}` on line {}", idx + 1),
                ))
            }
        };
        let rec = TraceRecord {
            seq: parsed.seq,
            robot: parsed.r,
            step,
        };
        cursor.apply(&rec).map_err(|e| bad("pos", e.to_string()))?;
        records.push(rec);
    }
    Ok(ParsedTrace { header, records })
}

/// Reads a trace file from disk.
pub fn read_trace_file(path: &Path) -> Result<ParsedTrace, LoadError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    read_trace(io::BufReader::new(file), path)
}

/// One robot's final cell and light, as stored in verdict files.
#[derive(Clone, Serialize, Deserialize, PartialEq, Eq, Debug)]
pub struct FinalRobot {
    /// Final cell `[x, y]`.
    pub pos: [i64; 2],
    /// Final light.
    pub col: String,
}

/// The outcome summary of a run, persisted as one JSON document.
#[derive(Clone, Serialize, Deserialize, PartialEq, Debug)]
pub struct Verdict {
    /// How the run ended.
    pub outcome: Outcome,
    /// Events consumed.
    pub events: u64,
    /// Final robots in id order.
    pub final_robots: Vec<FinalRobot>,
}

impl Verdict {
    /// Summarizes a run report.
    pub fn from_report(report: &RunReport) -> Self {
        Verdict {
            outcome: report.outcome,
            events: report.events,
            final_robots: report
                .final_robots
                .iter()
                .map(|r| FinalRobot {
                    pos: [r.pos.x, r.pos.y],
                    col: r.color.name().to_owned(),
                })
                .collect(),
        }
    }

    /// Canonical single-line JSON encoding (stable field order).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("verdict serializes");
        s.push('\n');
        s
    }
}

/// Recomputes the verdict of a persisted trace by re-running the simulator
/// from the header's initial state and options, and checks that the rerun
/// produces exactly the recorded events.
pub fn recompute_verdict(
    parsed: &ParsedTrace,
    path: &Path,
) -> Result<Verdict, Box<dyn std::error::Error>> {
    let cfg = parsed.header.world_config(path)?;
    let pattern = parsed.header.pattern();
    let opts = parsed.header.run_options(path)?;
    let report = run(&cfg, &pattern, &opts).map_err(|e: SetupError| e.to_string())?;
    if report.trace != parsed.records {
        return Err("rerun diverged from the recorded events".into());
    }
    Ok(Verdict::from_report(&report))
}

/// Walks every record of a parsed trace, validating each step, and returns
/// the final cursor.
pub fn replay_events(
    parsed: &ParsedTrace,
    path: &Path,
) -> Result<TraceCursor, Box<dyn std::error::Error>> {
    let cfg = parsed.header.world_config(path)?;
    let mut cursor = TraceCursor::new(&cfg);
    for rec in &parsed.records {
        cursor.apply(rec)?;
    }
    Ok(cursor)
}
