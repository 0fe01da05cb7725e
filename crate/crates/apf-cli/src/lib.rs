//! Command-line front end for the pattern-formation simulator: input
//! parsing, run/validate/fuzz/explore commands, trace persistence, and SVG
//! figure rendering.
//!
//! The pieces are usable as a library too: [`formats`] reads and writes the
//! config/pattern/trace/verdict files, [`fuzz`] generates and runs seeded
//! campaigns, [`render`] turns persisted traces into SVG frames, and
//! [`commands`] wires them into the subcommands of the `apf` binary.

#![forbid(unsafe_code)]
#![deny(missing_docs)]

pub mod commands;
pub mod formats;
pub mod fuzz;
pub mod render;

/// True when the `APF_LOG` environment variable asks for verbose progress
/// output on stderr (any value except empty, `0` or `off`).
pub fn log_enabled() -> bool {
    match std::env::var("APF_LOG") {
        Ok(v) => !v.is_empty() && v != "0" && !v.eq_ignore_ascii_case("off"),
        Err(_) => false,
    }
}

/// Prints a lazily-built line to stderr when [`log_enabled`] is set.
pub fn verbose(line: impl FnOnce() -> String) {
    if log_enabled() {
        eprintln!("{}", line());
    }
}
