//! Built-in experiment presets.
//!
//! Each preset expands to one or more jobs covering a canonical question
//! about the two decision mechanisms. Every preset comes in two sizes:
//! `desk` (minutes on a laptop; trimmed grids and run counts) and `paper`
//! (the full grids and run counts behind publication-quality statistics).
//! Presets are compiled in, so the registry can never be empty, and their
//! default seeds are fixed: re-running a preset reproduces its output
//! byte for byte unless `--seed` says otherwise.

use crate::spec::{
    Axis, AxisValue, CliError, ExperimentSpec, InitTable, Level, SimSettings, SsaSettings,
};
use bestof2::ode::OdeLevel;
use bestof2::params::ModelParams;

/// Workload size of a preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Trimmed grids and run counts; finishes in minutes.
    Desk,
    /// Full grids and run counts; hours of compute.
    Paper,
}

impl Scale {
    pub fn parse(s: &str) -> Result<Scale, CliError> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            other => Err(CliError::InvalidSpec(format!(
                "unknown scale {other:?}; expected desk or paper"
            ))),
        }
    }
}

/// One executable unit of a preset.
#[derive(Debug, Clone)]
pub enum Job {
    Experiment(ExperimentSpec),
    /// Closed-form critical-bias table over a `(q, eta)` grid.
    CriticalGrid {
        name: String,
        q_grid: Vec<f64>,
        eta_grid: Vec<f64>,
    },
}

/// Registry entry shown by `list-presets`.
pub struct PresetInfo {
    pub name: &'static str,
    pub summary: &'static str,
}

pub const PRESETS: [PresetInfo; 6] = [
    PresetInfo {
        name: "fig4",
        summary: "consensus vs asocial rate: mean-field equilibrium branches plus \
                  embodied end-state histograms on the quality-aligned mosaic",
    },
    PresetInfo {
        name: "fig5",
        summary: "stationary distributions of the majority observable at asocial rates \
                  0 and 0.1, with the matching mean-field equilibria",
    },
    PresetInfo {
        name: "fig6",
        summary: "outcomes across the asocial bias at fixed rate: equilibrium branches \
                  plus embodied runs on the free-bias mosaic",
    },
    PresetInfo {
        name: "fig7",
        summary: "cohesion/accuracy/speed grids over asocial rate and bias under a \
                  0.75 decision quorum",
    },
    PresetInfo {
        name: "fig8",
        summary: "decision-speed scaling across swarm sizes 50-400 under a \
                  stop-at-quorum protocol",
    },
    PresetInfo {
        name: "bifpoint",
        summary: "closed-form maximum-deadlock bias over a quality-ratio x asocial-rate \
                  grid",
    },
];

const ALL_MECHANISMS: [&str; 3] = ["ds", "ci-t1", "ci-t2"];

/// `count` evenly spaced values from `lo` to `hi` inclusive.
fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

fn float_axis(key: &str, values: Vec<f64>) -> Axis {
    Axis {
        key: key.to_string(),
        values: values.into_iter().map(AxisValue::Float).collect(),
    }
}

fn mechanism_axis(labels: &[&str]) -> Axis {
    Axis {
        key: "mechanism".to_string(),
        values: labels
            .iter()
            .map(|m| AxisValue::Mechanism(m.to_string()))
            .collect(),
    }
}

fn n_axis(values: &[u64]) -> Axis {
    Axis {
        key: "n".to_string(),
        values: values.iter().map(|&v| AxisValue::Int(v)).collect(),
    }
}

/// The bias the quality-aligned mosaic induces: red tiles in proportion to
/// the better option's quality share.
fn aligned_bias(q_b: f64) -> f64 {
    1.0 / (1.0 + q_b)
}

fn base_params(q_b: f64, eta: f64, eta_a: f64, n: u32) -> ModelParams {
    ModelParams {
        q_b,
        eta,
        eta_a,
        n,
        ..ModelParams::default()
    }
}

/// Blank experiment scaffold; presets override what they need.
fn blank(name: &str, level: Level, seed: u64, runs: usize, base: ModelParams) -> ExperimentSpec {
    ExperimentSpec {
        name: name.to_string(),
        level,
        runs_per_cell: runs,
        master_seed: seed,
        out_dir: None,
        base,
        axes: Vec::new(),
        ode_level: OdeLevel::Robot,
        ssa: SsaSettings {
            horizon: 200_000.0,
            sample_interval: 1000.0,
            quorum: None,
            stop_at_quorum: false,
            init: InitTable::default(),
            spd_bin_width: None,
        },
        sim: SimSettings {
            bias: "synergistic".to_string(),
            sigma: 0.1,
            horizon_cycles: 200_000,
            sample_every: 10,
            quorum: None,
            initial_a_fraction: 0.5,
            interior_cols: 20,
            interior_rows: 40,
            final_window_cycles: 1000,
            record_timeseries: false,
        },
    }
}

/// Builds a preset's job list. `seed` and `runs` override the built-in
/// defaults on every experiment in the preset.
pub fn build_preset(
    name: &str,
    scale: Scale,
    seed: Option<u64>,
    runs: Option<usize>,
) -> Result<Vec<Job>, CliError> {
    let mut jobs = match name {
        "fig4" => fig4(scale),
        "fig5" => fig5(scale),
        "fig6" => fig6(scale),
        "fig7" => fig7(scale),
        "fig8" => fig8(scale),
        "bifpoint" => bifpoint(scale),
        other => return Err(CliError::UnknownPreset(other.to_string())),
    };
    for job in &mut jobs {
        if let Job::Experiment(spec) = job {
            if let Some(s) = seed {
                spec.master_seed = s;
            }
            if let Some(r) = runs {
                spec.runs_per_cell = r;
            }
            spec.cells()?; // presets must expand cleanly before running
        }
    }
    Ok(jobs)
}

/// Consensus across the asocial rate on the quality-aligned mosaic:
/// mean-field branches plus embodied histograms.
fn fig4(scale: Scale) -> Vec<Job> {
    let eta_grid = linspace(0.0, 0.4, 9);
    let mut jobs = Vec::new();
    let q_values: &[f64] = match scale {
        Scale::Desk => &[0.82],
        Scale::Paper => &[1.0, 0.92, 0.82],
    };
    for &q_b in q_values {
        let suffix = q_label(q_b);
        let name = match scale {
            Scale::Desk => "fig4_ode".to_string(),
            Scale::Paper => format!("fig4_ode_{suffix}"),
        };
        let mut ode = blank(
            &name,
            Level::Ode,
            104,
            1,
            base_params(q_b, 0.0, aligned_bias(q_b), 100),
        );
        ode.axes = vec![
            float_axis("eta", eta_grid.clone()),
            mechanism_axis(&ALL_MECHANISMS),
        ];
        jobs.push(Job::Experiment(ode));
    }
    let mut sim = blank(
        "fig4_sim",
        Level::AgentSim,
        104,
        match scale {
            Scale::Desk => 5,
            Scale::Paper => 50,
        },
        base_params(0.82, 0.0, aligned_bias(0.82), match scale {
            Scale::Desk => 50,
            Scale::Paper => 100,
        }),
    );
    sim.sim.bias = "synergistic".to_string();
    sim.sim.horizon_cycles = match scale {
        Scale::Desk => 20_000,
        Scale::Paper => 200_000,
    };
    sim.axes = match scale {
        Scale::Desk => vec![
            float_axis("eta", vec![0.0, 0.05, 0.1]),
            mechanism_axis(&ALL_MECHANISMS),
        ],
        Scale::Paper => vec![
            float_axis("eta", eta_grid),
            mechanism_axis(&ALL_MECHANISMS),
            float_axis("q_b", vec![1.0, 0.92, 0.82]),
        ],
    };
    // Keep axes alphabetical: cells() assumes the resolver's ordering.
    sim.axes.sort_by(|a, b| a.key.cmp(&b.key));
    jobs.push(Job::Experiment(sim));
    jobs
}

fn q_label(q_b: f64) -> String {
    format!("q{:03}", (q_b * 100.0).round() as u32)
}

/// Stationary distributions at asocial rates 0 and 0.1 with the matching
/// mean-field equilibria, from uniformly random initial compositions.
fn fig5(scale: Scale) -> Vec<Job> {
    let q_values: &[f64] = match scale {
        Scale::Desk => &[0.82],
        Scale::Paper => &[1.0, 0.92, 0.82],
    };
    let mut jobs = Vec::new();
    for &q_b in q_values {
        let suffix = q_label(q_b);
        let (ssa_name, ode_name) = match scale {
            Scale::Desk => ("fig5_ssa".to_string(), "fig5_ode".to_string()),
            Scale::Paper => (format!("fig5_ssa_{suffix}"), format!("fig5_ode_{suffix}")),
        };
        let base = base_params(q_b, 0.0, aligned_bias(q_b), 100);
        let axes = vec![
            float_axis("eta", vec![0.0, 0.1]),
            mechanism_axis(&ALL_MECHANISMS),
        ];
        let mut ssa = blank(&ssa_name, Level::Ssa, 105, 50, base);
        ssa.axes = axes.clone();
        // Per-agent-uniform starts sit near the undecided centre, so the
        // stationary distributions show which attractor the dynamics select
        // rather than which basin the initial draw happened to land in.
        ssa.ssa.init = InitTable::PerAgentUniform;
        jobs.push(Job::Experiment(ssa));
        let mut ode = blank(&ode_name, Level::Ode, 105, 1, base);
        ode.axes = axes;
        jobs.push(Job::Experiment(ode));
    }
    jobs
}

/// Outcomes across the asocial bias at fixed rate 0.05: equilibrium branches
/// plus embodied runs on the free-bias mosaic.
fn fig6(scale: Scale) -> Vec<Job> {
    let base = base_params(0.82, 0.05, 0.5, 100);
    let mut ode = blank("fig6_ode", Level::Ode, 106, 1, base);
    ode.axes = vec![
        float_axis("eta_a", linspace(0.0, 1.0, 11)),
        mechanism_axis(&ALL_MECHANISMS),
    ];
    let mut sim = blank(
        "fig6_sim",
        Level::AgentSim,
        106,
        match scale {
            Scale::Desk => 5,
            Scale::Paper => 50,
        },
        base_params(0.82, 0.05, 0.5, match scale {
            Scale::Desk => 50,
            Scale::Paper => 100,
        }),
    );
    sim.sim.bias = "antagonistic".to_string();
    sim.sim.horizon_cycles = match scale {
        Scale::Desk => 20_000,
        Scale::Paper => 200_000,
    };
    sim.axes = vec![
        float_axis(
            "eta_a",
            match scale {
                Scale::Desk => vec![0.1, 0.5, 0.9],
                Scale::Paper => linspace(0.0, 1.0, 11),
            },
        ),
        mechanism_axis(&ALL_MECHANISMS),
    ];
    vec![Job::Experiment(ode), Job::Experiment(sim)]
}

/// Metric grids over asocial rate and bias under a 0.75 quorum, from the
/// even four-way committed split.
fn fig7(scale: Scale) -> Vec<Job> {
    let base = base_params(0.82, 0.0, 0.5, 100);
    let mut ssa = blank(
        "fig7_ssa",
        Level::Ssa,
        107,
        match scale {
            Scale::Desk => 20,
            Scale::Paper => 100,
        },
        base,
    );
    ssa.ssa.quorum = Some(0.75);
    ssa.ssa.init = InitTable::SymmetricSplit {
        disseminating: 0.28,
    };
    ssa.axes = match scale {
        Scale::Desk => vec![
            float_axis("eta", linspace(0.0, 0.1, 5)),
            float_axis("eta_a", linspace(0.0, 1.0, 5)),
            mechanism_axis(&["ds", "ci-t1"]),
        ],
        Scale::Paper => vec![
            float_axis("eta", linspace(0.0, 0.1, 21)),
            float_axis("eta_a", linspace(0.0, 1.0, 21)),
            mechanism_axis(&["ds", "ci-t1"]),
            float_axis("q_b", vec![1.0, 0.92, 0.82, 0.66]),
        ],
    };
    ssa.axes.sort_by(|a, b| a.key.cmp(&b.key));
    vec![Job::Experiment(ssa)]
}

/// Decision-speed scaling across swarm sizes under a stop-at-quorum
/// protocol at quorum 0.7.
fn fig8(scale: Scale) -> Vec<Job> {
    let mut ssa = blank(
        "fig8_ssa",
        Level::Ssa,
        108,
        match scale {
            Scale::Desk => 100,
            Scale::Paper => 250,
        },
        base_params(0.82, 0.05, 0.5, 100),
    );
    ssa.ssa.quorum = Some(0.7);
    ssa.ssa.stop_at_quorum = true;
    ssa.ssa.init = InitTable::SymmetricSplit {
        disseminating: 0.28,
    };
    ssa.axes = vec![
        mechanism_axis(&["ds", "ci-t1"]),
        n_axis(&[50, 200, 400]),
    ];
    let mut jobs = vec![Job::Experiment(ssa)];
    if scale == Scale::Paper {
        // Full-horizon companion: stationary distributions of the purely
        // social cross-inhibition swarm at two sizes.
        let mut spd = blank(
            "fig8_spd",
            Level::Ssa,
            108,
            250,
            base_params(0.82, 0.0, 0.5, 50),
        );
        spd.ssa.init = InitTable::SymmetricSplit {
            disseminating: 0.28,
        };
        spd.axes = vec![
            mechanism_axis(&["ci-t1"]),
            n_axis(&[50, 200]),
        ];
        jobs.push(Job::Experiment(spd));
    }
    jobs
}

/// Closed-form maximum-deadlock bias over a `(q, eta)` grid.
fn bifpoint(scale: Scale) -> Vec<Job> {
    let (q_grid, eta_grid) = match scale {
        Scale::Desk => (linspace(0.5, 1.0, 11), linspace(0.05, 0.5, 10)),
        Scale::Paper => (linspace(0.5, 1.0, 26), linspace(0.025, 0.5, 20)),
    };
    vec![Job::CriticalGrid {
        name: "bifpoint".to_string(),
        q_grid,
        eta_grid,
    }]
}
