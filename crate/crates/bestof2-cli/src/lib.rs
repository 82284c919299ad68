//! Batch experiment runner for the best-of-2 collective-decision models.
//!
//! The library half of the `bestof2` binary: [`spec`] parses and validates
//! declarative TOML experiment files, [`runner`] executes them level by
//! level into CSV tables plus a JSONL manifest, and [`presets`] holds the
//! compiled-in experiment definitions. The binary in `main.rs` is a thin
//! argument-parsing shell over these modules, which keeps every behaviour
//! testable without spawning processes.

pub mod presets;
pub mod runner;
pub mod spec;

pub use presets::{build_preset, Job, Scale, PRESETS};
pub use runner::{run_critical_grid, run_experiment, ExperimentOutput};
pub use spec::{CliError, ExperimentSpec};
