//! `bestof2` — batch experiment runner for the collective-decision models.
//!
//! Exit codes: 0 on success, 2 on any failure, with a one-line JSON error
//! record on stderr (`{"error":{"kind":...,"message":...}}`) so wrapping
//! scripts can branch on the failure kind.

use bestof2_cli::presets::{build_preset, Job, Scale, PRESETS};
use bestof2_cli::runner::{run_critical_grid, run_experiment, ExperimentOutput};
use bestof2_cli::spec::{CliError, ExperimentSpec};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

/// Environment variable supplying the default output directory.
const OUT_ENV: &str = "BESTOF2_OUT";

#[derive(Parser)]
#[command(
    name = "bestof2",
    version,
    about = "Batch experiment runner for best-of-2 collective-decision models",
    long_about = "Runs mean-field, stochastic, and embodied experiments from declarative \
                  TOML spec files or compiled-in presets, writing CSV tables plus a JSONL \
                  manifest. Identical specs and seeds reproduce identical bytes."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment from a TOML spec file.
    Run {
        /// Path to the spec file.
        spec: PathBuf,
        /// Output directory (overrides the spec and the environment).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a compiled-in preset.
    Preset {
        /// Preset name; see `list-presets`.
        name: String,
        /// Output directory (overrides the environment).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed override for every experiment in the preset.
        #[arg(long)]
        seed: Option<u64>,
        /// Runs-per-cell override for every experiment in the preset.
        #[arg(long)]
        runs: Option<usize>,
        /// Workload size: `desk` finishes in minutes, `paper` runs the full
        /// grids.
        #[arg(long, default_value = "desk")]
        scale: String,
    },
    /// List the compiled-in presets.
    ListPresets,
    /// Parse and validate a spec file without running anything.
    Validate {
        /// Path to the spec file.
        spec: PathBuf,
    },
}

fn main() {
    if let Err(e) = dispatch(Cli::parse()) {
        eprintln!("{}", e.to_json());
        std::process::exit(2);
    }
}

/// Output directory precedence: `--out`, then the spec's own `out_dir`,
/// then the environment, then the working directory.
fn resolve_out(cli_out: Option<PathBuf>, spec_out: Option<&str>) -> PathBuf {
    cli_out
        .or_else(|| spec_out.map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn report(out: &ExperimentOutput, dir: &Path) {
    println!(
        "{}: {} cells, {} files in {}",
        out.name,
        out.n_cells,
        out.files.len(),
        dir.display()
    );
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Run { spec, out } => {
            let spec = ExperimentSpec::from_path(&spec)?;
            let dir = resolve_out(out, spec.out_dir.as_deref());
            let result = run_experiment(&spec, &dir)?;
            report(&result, &dir);
            Ok(())
        }
        Cmd::Preset {
            name,
            out,
            seed,
            runs,
            scale,
        } => {
            let scale = Scale::parse(&scale)?;
            let jobs = build_preset(&name, scale, seed, runs)?;
            let dir = resolve_out(out, None);
            for job in jobs {
                let result = match job {
                    Job::Experiment(spec) => run_experiment(&spec, &dir)?,
                    Job::CriticalGrid {
                        name,
                        q_grid,
                        eta_grid,
                    } => run_critical_grid(&name, &q_grid, &eta_grid, &dir)?,
                };
                report(&result, &dir);
            }
            Ok(())
        }
        Cmd::ListPresets => {
            for info in &PRESETS {
                println!("{:<10} {}", info.name, info.summary);
            }
            Ok(())
        }
        Cmd::Validate { spec } => {
            let spec = ExperimentSpec::from_path(&spec)?;
            let cells = spec.cells()?;
            println!(
                "ok: {} ({} level, {} cells, {} runs per cell)",
                spec.name,
                spec.level.label(),
                cells.len(),
                spec.runs_per_cell
            );
            Ok(())
        }
    }
}
