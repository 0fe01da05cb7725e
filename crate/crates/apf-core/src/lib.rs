//! Arbitrary pattern formation on the infinite grid by opaque, luminous,
//! *fat* robots (disk bodies of any rational radius up to 1/2) that agree
//! on one axis only.
//!
//! The crate has four layers, each usable on its own:
//!
//! * [`geometry`] — grid/continuous primitives and the visibility engine for
//!   fat opaque robots (segment clearance, certified visibility tests, and a
//!   sampling oracle used to cross-check the engine).
//! * [`protocol`] — the distributed algorithm itself: local views, the
//!   nine-color light protocol, leader election on vertical lines, and the
//!   coordinate-frame phase that moves robots onto their targets. Every
//!   transition is a pure function of a single robot's snapshot.
//! * [`embedding`] — solvability of an initial configuration, canonical
//!   embedding of the target pattern, and the "pattern formed" predicate.
//! * [`sim`] — a discrete-event simulator with fully synchronous,
//!   semi-synchronous and asynchronous schedulers (including an adversarial
//!   one), runtime safety monitors, trace recording, and a bounded
//!   exhaustive explorer for small instances.
//!
//! The crate is `no_std`-compatible (with `alloc`); enable the `libm`
//! feature to build without `std`.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]
#![deny(missing_docs)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("apf-core needs scalar f64 math: enable the `std` feature (default) or `libm`");

pub mod embedding;
pub mod geometry;
mod math;
pub mod protocol;
pub mod sim;

pub use embedding::{
    check_solvable, embed_pattern, pattern_formed, EmbeddedTargets, TargetPattern,
};
pub use geometry::{
    segment_clearance, visible, BlockingMode, Chirality, GridPoint, Radius, Robot, RobotId, Vec2,
    WorldConfig,
};
pub use protocol::{Color, Decision, MoveDir};
pub use sim::{run, Outcome, RunOptions, RunReport, SchedulerPolicy};
