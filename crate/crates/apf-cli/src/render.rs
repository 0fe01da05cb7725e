//! SVG frame rendering for persisted traces.
//!
//! Each frame shows the grid lattice, every robot as a disk of the world's
//! radius filled by its current light, the provisional/elected leader's row
//! as a dashed line, and the election midline K as a dashed line whenever a
//! marked pair defines one. The final frame of a formed run additionally
//! outlines the placed copy of the target pattern so the all-done disks can
//! be checked against it visually.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use apf_core::embedding::{embed_pattern, positions_form_pattern};
use apf_core::geometry::GridPoint;
use apf_core::protocol::Color;
use apf_core::sim::TraceStep;

use crate::formats::{LoadError, ParsedTrace, ReplayError, TraceCursor};

/// Errors raised by [`render_svg`].
#[derive(Debug)]
pub enum RenderError {
    /// `every_k` was zero; the stride must be positive.
    ZeroStride,
    /// The output directory or a frame file could not be written.
    Io(io::Error),
    /// The trace header could not be decoded into a world.
    Load(LoadError),
    /// A trace record contradicted the replayed state.
    Replay(ReplayError),
}

impl std::fmt::Display for RenderError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RenderError::ZeroStride => f.write_str("--every-k must be at least 1"),
            RenderError::Io(e) => write!(f, "io error: {e}"),
            RenderError::Load(e) => write!(f, "{e}"),
            RenderError::Replay(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RenderError {}

impl From<io::Error> for RenderError {
    fn from(e: io::Error) -> Self {
        RenderError::Io(e)
    }
}

/// Fill color for each light.
fn fill(color: Color) -> &'static str {
    match color {
        Color::Off => "#9e9e9e",
        Color::Terminal1 => "#42a5f5",
        Color::Candidate => "#ab47bc",
        Color::Call => "#ffa726",
        Color::Moving1 => "#fdd835",
        Color::Reached => "#26a69a",
        Color::Leader1 => "#ef5350",
        Color::Leader => "#c62828",
        Color::Done => "#2e7d32",
    }
}

const CELL: f64 = 40.0;
const MARGIN: i64 = 2;

struct Canvas {
    min_x: i64,
    max_x: i64,
    min_y: i64,
    max_y: i64,
}

impl Canvas {
    fn sx(&self, x: f64) -> f64 {
        (x - self.min_x as f64 + MARGIN as f64) * CELL
    }

    fn sy(&self, y: f64) -> f64 {
        (self.max_y as f64 - y + MARGIN as f64) * CELL
    }

    fn width(&self) -> f64 {
        (self.max_x - self.min_x + 2 * MARGIN) as f64 * CELL
    }

    fn height(&self) -> f64 {
        (self.max_y - self.min_y + 2 * MARGIN) as f64 * CELL
    }
}

/// The midline of the marked pair, if exactly two election marks
/// (`candidate`, `call` or `reached`) share one column.
fn marked_midline(positions: &[GridPoint], colors: &[Color]) -> Option<f64> {
    let marks: Vec<GridPoint> = positions
        .iter()
        .zip(colors)
        .filter(|(_, c)| matches!(c, Color::Candidate | Color::Call | Color::Reached))
        .map(|(p, _)| *p)
        .collect();
    if let [a, b] = marks[..] {
        if a.x == b.x && a.y != b.y {
            return Some((a.y + b.y) as f64 / 2.0);
        }
    }
    None
}

fn draw_frame(
    canvas: &Canvas,
    rad: f64,
    cursor: &TraceCursor,
    outline: Option<&[GridPoint]>,
) -> String {
    let mut s = String::new();
    let w = canvas.width();
    let h = canvas.height();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(s, "<rect width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>");

    // Grid lattice.
    for x in (canvas.min_x - MARGIN)..=(canvas.max_x + MARGIN) {
        let sx = canvas.sx(x as f64);
        let _ = writeln!(
            s,
            "<line x1=\"{sx}\" y1=\"0\" x2=\"{sx}\" y2=\"{h}\" stroke=\"#dddddd\" stroke-width=\"1\"/>"
        );
    }
    for y in (canvas.min_y - MARGIN)..=(canvas.max_y + MARGIN) {
        let sy = canvas.sy(y as f64);
        let _ = writeln!(
            s,
            "<line x1=\"0\" y1=\"{sy}\" x2=\"{w}\" y2=\"{sy}\" stroke=\"#dddddd\" stroke-width=\"1\"/>"
        );
    }

    // Target outline (final frame of a formed run).
    if let Some(cells) = outline {
        for c in cells {
            let cx = canvas.sx(c.x as f64);
            let cy = canvas.sy(c.y as f64);
            let _ = writeln!(
                s,
                "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"{r}\" fill=\"none\" stroke=\"#2e7d32\" \
                 stroke-width=\"2\" stroke-dasharray=\"4,3\"/>",
                r = rad * CELL + 4.0
            );
        }
    }

    let positions = cursor.positions();
    let colors = cursor.colors();

    // Leader's row.
    if let Some((p, _)) = positions
        .iter()
        .zip(colors)
        .find(|(_, c)| matches!(c, Color::Leader1 | Color::Leader))
    {
        let sy = canvas.sy(p.y as f64);
        let _ = writeln!(
            s,
            "<line x1=\"0\" y1=\"{sy}\" x2=\"{w}\" y2=\"{sy}\" stroke=\"#c62828\" \
             stroke-width=\"1.5\" stroke-dasharray=\"8,5\"/>"
        );
    }

    // Election midline K.
    if let Some(k) = marked_midline(positions, colors) {
        let sy = canvas.sy(k);
        let _ = writeln!(
            s,
            "<line x1=\"0\" y1=\"{sy}\" x2=\"{w}\" y2=\"{sy}\" stroke=\"#6a1b9a\" \
             stroke-width=\"1.5\" stroke-dasharray=\"8,5\"/>"
        );
    }

    // Robot disks.
    for (i, (p, c)) in positions.iter().zip(colors).enumerate() {
        let cx = canvas.sx(p.x as f64);
        let cy = canvas.sy(p.y as f64);
        let _ = writeln!(
            s,
            "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"{r}\" fill=\"{f}\" stroke=\"#333333\" \
             stroke-width=\"1.5\"/>",
            r = rad * CELL,
            f = fill(*c)
        );
        let _ = writeln!(
            s,
            "<text x=\"{cx}\" y=\"{ty}\" font-size=\"10\" text-anchor=\"middle\" \
             fill=\"#333333\">{i}</text>",
            ty = cy + 3.5
        );
    }

    s.push_str("</svg>\n");
    s
}

/// The placed copy of the target pattern matching `positions`, if the
/// positions realize the pattern: the embedded targets flipped by the
/// matching sigma and translated so both lexicographic minima coincide.
fn placed_targets(positions: &[GridPoint], targets: &[[i64; 2]]) -> Option<Vec<GridPoint>> {
    let pattern =
        apf_core::embedding::TargetPattern::new(targets.iter().map(|&[x, y]| GridPoint::new(x, y)));
    let embedded = embed_pattern(&pattern).ok()?;
    let sigma = positions_form_pattern(positions, &embedded)? as i64;
    let flipped: Vec<GridPoint> = embedded
        .points()
        .iter()
        .map(|p| GridPoint::new(p.x, sigma * p.y))
        .collect();
    let key = |pts: &[GridPoint]| pts.iter().map(|p| (p.x, p.y)).min().unwrap();
    let (fx, fy) = key(&flipped);
    let (px, py) = key(positions);
    Some(
        flipped
            .into_iter()
            .map(|p| GridPoint::new(p.x + px - fx, p.y + py - fy))
            .collect(),
    )
}

/// Renders one SVG frame per `every_k`-th event of a parsed trace into
/// `out_dir` (created if missing), plus the initial and final frames.
/// Returns the written paths in frame order.
pub fn render_svg(
    parsed: &ParsedTrace,
    out_dir: &Path,
    every_k: u64,
) -> Result<Vec<PathBuf>, RenderError> {
    if every_k == 0 {
        return Err(RenderError::ZeroStride);
    }
    let cfg = parsed
        .header
        .world_config(Path::new("<trace>"))
        .map_err(RenderError::Load)?;
    let rad = cfg.rad.as_f64();

    // Pass 1: bounding box over every cell ever occupied.
    let mut min_x = i64::MAX;
    let mut max_x = i64::MIN;
    let mut min_y = i64::MAX;
    let mut max_y = i64::MIN;
    let mut cover = |p: GridPoint| {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    };
    for r in &cfg.robots {
        cover(r.pos);
    }
    for rec in &parsed.records {
        if let TraceStep::Moved { to, .. } = rec.step {
            cover(to);
        }
    }
    let canvas = Canvas {
        min_x,
        max_x,
        min_y,
        max_y,
    };

    // Pass 2: replay and emit frames.
    fs::create_dir_all(out_dir)?;
    let mut cursor = TraceCursor::new(&cfg);
    let mut frames = Vec::new();
    let mut write_frame = |seq: u64, cursor: &TraceCursor, outline: Option<&[GridPoint]>| {
        let path = out_dir.join(format!("frame_{seq:06}.svg"));
        let svg = draw_frame(&canvas, rad, cursor, outline);
        fs::write(&path, svg).map(|()| frames.push(path))
    };
    write_frame(0, &cursor, None)?;

    let mut i = 0;
    while i < parsed.records.len() {
        let seq = parsed.records[i].seq;
        // Apply every record sharing this event's sequence number.
        while i < parsed.records.len() && parsed.records[i].seq == seq {
            cursor
                .apply(&parsed.records[i])
                .map_err(RenderError::Replay)?;
            i += 1;
        }
        let last = i == parsed.records.len();
        if seq % every_k == 0 && !last {
            write_frame(seq, &cursor, None)?;
        }
        if last {
            let placed = placed_targets(cursor.positions(), &parsed.header.targets);
            write_frame(seq, &cursor, placed.as_deref())?;
        }
    }
    Ok(frames)
}
