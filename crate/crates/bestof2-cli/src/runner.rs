//! Executes resolved experiments: expands the sweep grid, runs every cell at
//! the requested level, and writes the output tables plus a JSONL manifest.
//!
//! Cells run sequentially in grid order while the runs inside a cell
//! parallelise, so the reduction into tables is deterministic: the same spec
//! and seed always produce byte-identical numeric output. Every CSV row
//! carries the full parameter tuple of its cell, making each file
//! self-describing.

use crate::spec::{Cell, CliError, ExperimentSpec, Level};
use bestof2::csvio::{fmt_f64, fmt_opt, write_count_series, write_csv};
use bestof2::metrics::{accuracy, decision_speed, mean_cohesion, RunSummary};
use bestof2::ode::{critical_bias, find_equilibria, FullState, OdeError, OdeSystem};
use bestof2::params::ModelParams;
use bestof2::sim::{run_batch_sim, BiasMode, SimConfig};
use bestof2::ssa::{run_batch, stationary_distribution, RunOptions};
use std::path::{Path, PathBuf};

/// What an experiment left on disk.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub name: String,
    pub n_cells: usize,
    pub files: Vec<PathBuf>,
}

/// Columns identifying a cell; prepended to every data row.
const PARAM_HEADER: [&str; 10] = [
    "cell",
    "mechanism",
    "q_a",
    "q_b",
    "eta",
    "eta_a",
    "n",
    "t_e_cycles",
    "t_d_cycles",
    "t_u_cycles",
];

fn param_fields(index: usize, p: &ModelParams) -> Vec<String> {
    vec![
        index.to_string(),
        p.mechanism.label().to_string(),
        fmt_f64(p.q_a),
        fmt_f64(p.q_b),
        fmt_f64(p.eta),
        fmt_f64(p.eta_a),
        p.n.to_string(),
        fmt_f64(p.t_e),
        fmt_f64(p.t_d),
        fmt_f64(p.t_u),
    ]
}

fn full_header<'a>(extra: &[&'a str]) -> Vec<&'a str> {
    let mut h: Vec<&str> = PARAM_HEADER.to_vec();
    h.extend_from_slice(extra);
    h
}

fn write_table(
    out_dir: &Path,
    name: &str,
    suffix: &str,
    header: &[&str],
    rows: &[Vec<String>],
    files: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    let path = out_dir.join(format!("{name}_{suffix}.csv"));
    write_csv(&path, header, rows).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    files.push(path);
    Ok(())
}

fn run_failed(cell: usize, e: impl std::fmt::Display) -> CliError {
    CliError::Run(format!("cell {cell} failed: {e}"))
}

/// Runs one experiment into `out_dir` (created if missing).
pub fn run_experiment(
    spec: &ExperimentSpec,
    out_dir: &Path,
) -> Result<ExperimentOutput, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|source| CliError::OutputDirNotWritable {
        path: out_dir.display().to_string(),
        source,
    })?;
    let cells = spec.cells()?;
    let mut files = Vec::new();
    match spec.level {
        Level::Ode => run_ode_level(spec, &cells, out_dir, &mut files)?,
        Level::Ssa => run_ssa_level(spec, &cells, out_dir, &mut files)?,
        Level::AgentSim => run_sim_level(spec, &cells, out_dir, &mut files)?,
    }
    write_manifest(spec, &cells, out_dir, &mut files)?;
    Ok(ExperimentOutput {
        name: spec.name.clone(),
        n_cells: cells.len(),
        files,
    })
}

/// Mean-field level: one table of equilibria, every branch per cell.
fn run_ode_level(
    spec: &ExperimentSpec,
    cells: &[Cell],
    out_dir: &Path,
    files: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    let frac_cols: &[&str] = match spec.ode_level {
        bestof2::ode::OdeLevel::Basic => &["frac_a", "frac_b", "frac_u"],
        bestof2::ode::OdeLevel::Robot => {
            &["frac_a_d", "frac_b_d", "frac_a_e", "frac_b_e", "frac_u"]
        }
    };
    let mut header = full_header(&["equilibrium", "observable", "stability", "residual"]);
    header.extend_from_slice(frac_cols);

    let mut rows = Vec::new();
    for cell in cells {
        let system = OdeSystem::new(cell.params, spec.ode_level)
            .map_err(|e| run_failed(cell.index, e))?;
        for (k, report) in find_equilibria(&system).iter().enumerate() {
            let fractions: Vec<f64> = match system.unreduce(&report.state) {
                FullState::Basic(s) => vec![s.a, s.b, s.u],
                FullState::Robot(s) => vec![s.a_d, s.b_d, s.a_e, s.b_e, s.u],
            };
            let mut row = param_fields(cell.index, &cell.params);
            row.push(k.to_string());
            row.push(fmt_f64(report.observable));
            row.push(report.stability.label().to_string());
            row.push(fmt_f64(report.residual));
            row.extend(fractions.iter().map(|v| fmt_f64(*v)));
            rows.push(row);
        }
    }
    write_table(out_dir, &spec.name, "equilibria", &header, &rows, files)
}

/// Stochastic level: per-run outcomes, per-cell stationary distributions
/// (unless runs stop at quorum), and per-cell summary metrics.
fn run_ssa_level(
    spec: &ExperimentSpec,
    cells: &[Cell],
    out_dir: &Path,
    files: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    let opts = RunOptions {
        horizon: spec.ssa.horizon,
        sample_interval: spec.ssa.sample_interval,
        quorum: spec.ssa.quorum,
        stop_at_quorum: spec.ssa.stop_at_quorum,
        ..RunOptions::default()
    };
    let initial = spec.ssa.init.to_initial();

    let mut run_rows = Vec::new();
    let mut spd_rows = Vec::new();
    let mut metric_rows = Vec::new();
    for cell in cells {
        let runs = run_batch(
            &cell.params,
            &initial,
            &opts,
            spec.runs_per_cell,
            spec.cell_seed(cell.index),
        )
        .map_err(|e| run_failed(cell.index, e))?;

        for (i, run) in runs.iter().enumerate() {
            let mut row = param_fields(cell.index, &cell.params);
            row.push(i.to_string());
            row.push(run.seed.to_string());
            row.extend(run.final_state.counts.iter().map(|c| c.to_string()));
            row.push(fmt_f64(run.final_state.observable()));
            row.push(fmt_opt(run.first_passage_a));
            row.push(fmt_opt(run.first_passage_b));
            run_rows.push(row);
        }

        // Occupancy truncated at the quorum stop is not a stationary
        // distribution, so the table is only written for full-horizon runs.
        if !spec.ssa.stop_at_quorum {
            let spd = stationary_distribution(&runs, spec.ssa.spd_bin_width)
                .map_err(|e| run_failed(cell.index, e))?;
            for (c, m) in spd.bin_centers.iter().zip(&spd.mass) {
                let mut row = param_fields(cell.index, &cell.params);
                row.push(fmt_f64(*c));
                row.push(fmt_f64(*m));
                spd_rows.push(row);
            }
        }

        let summaries: Vec<RunSummary> = runs.iter().map(RunSummary::from).collect();
        metric_rows.push(metrics_row(cell, &summaries, spec.ssa.quorum.is_some()));
    }

    write_table(
        out_dir,
        &spec.name,
        "runs",
        &full_header(&[
            "run",
            "seed",
            "count_a_d",
            "count_b_d",
            "count_a_e",
            "count_b_e",
            "count_u",
            "final_observable",
            "first_passage_a",
            "first_passage_b",
        ]),
        &run_rows,
        files,
    )?;
    if !spec.ssa.stop_at_quorum {
        write_table(
            out_dir,
            &spec.name,
            "spd",
            &full_header(&["observable", "mass"]),
            &spd_rows,
            files,
        )?;
    }
    write_table(
        out_dir,
        &spec.name,
        "metrics",
        &full_header(&METRIC_COLS),
        &metric_rows,
        files,
    )
}

const METRIC_COLS: [&str; 6] = [
    "cohesion",
    "accuracy",
    "speed_mean",
    "speed_std",
    "n_decided",
    "n_runs",
];

/// One summary row per cell. Accuracy needs a quorum to be defined; the
/// field stays empty otherwise, as do speed statistics when nothing decided.
fn metrics_row(cell: &Cell, summaries: &[RunSummary], has_quorum: bool) -> Vec<String> {
    let best_is_either = cell.params.q_a == cell.params.q_b;
    let speed = decision_speed(summaries);
    let mut row = param_fields(cell.index, &cell.params);
    row.push(fmt_f64(mean_cohesion(summaries)));
    row.push(if has_quorum {
        fmt_f64(accuracy(summaries, best_is_either))
    } else {
        String::new()
    });
    row.push(fmt_opt(speed.mean));
    row.push(fmt_opt(speed.std_dev));
    row.push(speed.n_decided.to_string());
    row.push(speed.n_runs.to_string());
    row
}

/// Embodied level: per-run outcomes, a pooled end-of-run histogram per cell,
/// summary metrics, and optional per-run count time series.
fn run_sim_level(
    spec: &ExperimentSpec,
    cells: &[Cell],
    out_dir: &Path,
    files: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    let bias = match spec.sim.bias.as_str() {
        "synergistic" => BiasMode::Synergistic,
        "antagonistic" => BiasMode::Antagonistic {
            sigma: spec.sim.sigma,
        },
        other => return Err(CliError::InvalidSpec(format!("unknown bias mode {other:?}"))),
    };

    let mut run_rows = Vec::new();
    let mut hist_rows = Vec::new();
    let mut metric_rows = Vec::new();
    for cell in cells {
        let mut cfg =
            SimConfig::desk(cell.params, bias).map_err(|e| run_failed(cell.index, e))?;
        cfg.interior_cols = spec.sim.interior_cols;
        cfg.interior_rows = spec.sim.interior_rows;
        cfg.horizon_cycles = spec.sim.horizon_cycles;
        cfg.sample_every = spec.sim.sample_every;
        cfg.quorum = spec.sim.quorum;
        cfg.initial_a_fraction = spec.sim.initial_a_fraction;
        // Resolve before writing rows so the tables show the effective bias
        // (the synergistic mosaic overrides `eta_a`).
        let cfg = cfg.validated().map_err(|e| run_failed(cell.index, e))?;
        let effective = cfg.params;

        let records = run_batch_sim(&cfg, spec.runs_per_cell, spec.cell_seed(cell.index))
            .map_err(|e| run_failed(cell.index, e))?;

        for (i, rec) in records.iter().enumerate() {
            let a_tot = rec.final_counts[0] + rec.final_counts[2];
            let b_tot = rec.final_counts[1] + rec.final_counts[3];
            let observable = (a_tot as f64 - b_tot as f64) / rec.n as f64;
            let mut row = param_fields(cell.index, &effective);
            row.push(i.to_string());
            row.push(rec.seed.to_string());
            row.extend(rec.final_counts.iter().map(|c| c.to_string()));
            row.push(fmt_f64(observable));
            row.push(fmt_opt(rec.first_passage_a));
            row.push(fmt_opt(rec.first_passage_b));
            row.push(rec.n_polls.to_string());
            row.push(rec.n_selfsource.to_string());
            run_rows.push(row);

            if spec.sim.record_timeseries {
                let samples: Vec<(f64, [u64; 5])> = rec
                    .samples
                    .iter()
                    .map(|(t, c)| (*t as f64, *c))
                    .collect();
                let path = out_dir.join(format!(
                    "{}_series_c{}_r{}.csv",
                    spec.name, cell.index, i
                ));
                write_count_series(&path, &samples).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                files.push(path);
            }
        }

        let window_start = spec
            .sim
            .horizon_cycles
            .saturating_sub(spec.sim.final_window_cycles);
        for (c, m) in final_window_histogram(&records, window_start, effective.n) {
            let mut row = param_fields(cell.index, &effective);
            row.push(fmt_f64(c));
            row.push(fmt_f64(m));
            hist_rows.push(row);
        }

        let summaries: Vec<RunSummary> = records.iter().map(RunSummary::from).collect();
        metric_rows.push(metrics_row(
            &Cell {
                index: cell.index,
                params: effective,
            },
            &summaries,
            spec.sim.quorum.is_some(),
        ));
    }

    write_table(
        out_dir,
        &spec.name,
        "runs",
        &full_header(&[
            "run",
            "seed",
            "count_a_d",
            "count_b_d",
            "count_a_e",
            "count_b_e",
            "count_u",
            "final_observable",
            "first_passage_a",
            "first_passage_b",
            "n_polls",
            "n_selfsource",
        ]),
        &run_rows,
        files,
    )?;
    write_table(
        out_dir,
        &spec.name,
        "final_window_hist",
        &full_header(&["observable", "mass"]),
        &hist_rows,
        files,
    )?;
    write_table(
        out_dir,
        &spec.name,
        "metrics",
        &full_header(&METRIC_COLS),
        &metric_rows,
        files,
    )
}

/// Histogram of the majority observable over every sample in the closing
/// window of every run, binned like the stochastic level's distributions
/// (width `2/N`) and normalised to unit mass. Only non-empty bins appear.
fn final_window_histogram(
    records: &[bestof2::sim::RunRecord],
    window_start: u64,
    n: u32,
) -> Vec<(f64, f64)> {
    let width = 2.0 / n as f64;
    let n_bins = (2.0 / width).ceil() as usize;
    let mut mass = vec![0.0f64; n_bins];
    let mut total = 0.0;
    for rec in records {
        for (cycle, c) in &rec.samples {
            if *cycle < window_start {
                continue;
            }
            let a_tot = c[0] + c[2];
            let b_tot = c[1] + c[3];
            let x = (a_tot as f64 - b_tot as f64) / n as f64;
            let k = (((x + 1.0) / width) as usize).min(n_bins - 1);
            mass[k] += 1.0;
            total += 1.0;
        }
    }
    if total == 0.0 {
        return Vec::new();
    }
    (0..n_bins)
        .filter(|&k| mass[k] > 0.0)
        .map(|k| (-1.0 + (k as f64 + 0.5) * width, mass[k] / total))
        .collect()
}

/// JSONL manifest: an experiment header line followed by one line per cell.
/// No timestamps or host details — reruns must be byte-identical.
fn write_manifest(
    spec: &ExperimentSpec,
    cells: &[Cell],
    out_dir: &Path,
    files: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    let mut out = String::new();
    let header = serde_json::json!({
        "record": "experiment",
        "name": spec.name,
        "level": spec.level.label(),
        "spec_hash": spec.hash(),
        "master_seed": spec.master_seed,
        "runs_per_cell": spec.runs_per_cell,
        "n_cells": cells.len(),
        "package": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
    });
    out.push_str(&header.to_string());
    out.push('\n');
    for cell in cells {
        let p = &cell.params;
        let line = serde_json::json!({
            "record": "cell",
            "index": cell.index,
            "seed": spec.cell_seed(cell.index),
            "mechanism": p.mechanism.label(),
            "q_a": p.q_a,
            "q_b": p.q_b,
            "eta": p.eta,
            "eta_a": p.eta_a,
            "n": p.n,
            "outcome": "ok",
            "n_runs": spec.runs_per_cell,
        });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    let path = out_dir.join(format!("{}_manifest.jsonl", spec.name));
    std::fs::write(&path, out).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    files.push(path);
    Ok(())
}

/// Tabulates the closed-form deadlock bias over a `(q, eta)` grid; used by
/// the bifurcation-point preset.
pub fn run_critical_grid(
    name: &str,
    q_grid: &[f64],
    eta_grid: &[f64],
    out_dir: &Path,
) -> Result<ExperimentOutput, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|source| CliError::OutputDirNotWritable {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut rows = Vec::new();
    for &q in q_grid {
        for &eta in eta_grid {
            let row = match critical_bias(q, eta) {
                Ok(cb) => vec![
                    fmt_f64(q),
                    fmt_f64(eta),
                    fmt_f64(cb.eta_a),
                    fmt_f64(cb.raw),
                    cb.in_range.to_string(),
                ],
                Err(OdeError::EtaZero) => vec![
                    fmt_f64(q),
                    fmt_f64(eta),
                    String::new(),
                    String::new(),
                    "false".to_string(),
                ],
                Err(e) => return Err(CliError::Run(e.to_string())),
            };
            rows.push(row);
        }
    }
    let mut files = Vec::new();
    write_table(
        out_dir,
        name,
        "critical_bias",
        &["q", "eta", "eta_a_star", "raw", "in_range"],
        &rows,
        &mut files,
    )?;
    Ok(ExperimentOutput {
        name: name.to_string(),
        n_cells: q_grid.len() * eta_grid.len(),
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::ExperimentSpec;

    fn tiny_ssa_spec(name: &str) -> ExperimentSpec {
        let text = format!(
            r#"
            name = "{name}"
            level = "ssa"
            master_seed = 11
            runs_per_cell = 3
            [base]
            mechanism = "ci-t1"
            q_b = 0.82
            eta = 0.05
            n = 20
            [ssa]
            horizon_cycles = 2000.0
            sample_every_cycles = 500.0
            quorum = 0.7
            [sweep]
            eta = [0.0, 0.1]
        "#
        );
        ExperimentSpec::from_toml(&text).unwrap()
    }

    #[test]
    fn ssa_experiment_writes_all_tables_with_param_columns() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&tiny_ssa_spec("t"), dir.path()).unwrap();
        assert_eq!(out.n_cells, 2);
        let names: Vec<String> = out
            .files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            names,
            ["t_runs.csv", "t_spd.csv", "t_metrics.csv", "t_manifest.jsonl"]
        );
        let runs = std::fs::read_to_string(dir.path().join("t_runs.csv")).unwrap();
        let mut lines = runs.split("\r\n");
        let header = lines.next().unwrap();
        assert!(header.starts_with("cell,mechanism,q_a,q_b,eta,eta_a,n,"));
        // 2 cells x 3 runs plus header and trailing empty split.
        assert_eq!(runs.trim_end().split("\r\n").count(), 1 + 6);
        assert!(lines.next().unwrap().starts_with("0,ci-t1,1,0.82,0,0.5,20,"));
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let spec = tiny_ssa_spec("same");
        let out_a = run_experiment(&spec, dir_a.path()).unwrap();
        let out_b = run_experiment(&spec, dir_b.path()).unwrap();
        for (a, b) in out_a.files.iter().zip(&out_b.files) {
            assert_eq!(
                std::fs::read(a).unwrap(),
                std::fs::read(b).unwrap(),
                "{} differs between reruns",
                a.display()
            );
        }
    }

    #[test]
    fn ode_experiment_reports_equilibria_per_cell() {
        let text = r#"
            name = "eq"
            level = "ode"
            master_seed = 1
            runs_per_cell = 1
            [base]
            mechanism = "ds"
            q_b = 0.82
            eta = 0.05
            [ode]
            level = "robot"
            [sweep]
            mechanism = ["ds", "ci-t1"]
        "#;
        let spec = ExperimentSpec::from_toml(text).unwrap();
        let dir = tempfile::tempdir().unwrap();
        run_experiment(&spec, dir.path()).unwrap();
        let table = std::fs::read_to_string(dir.path().join("eq_equilibria.csv")).unwrap();
        let header = table.split("\r\n").next().unwrap();
        assert!(header.ends_with(
            "equilibrium,observable,stability,residual,frac_a_d,frac_b_d,frac_a_e,frac_b_e,frac_u"
        ));
        assert!(table.contains("stable"));
        // Both swept mechanisms appear.
        assert!(table.contains("\r\n0,ds,"));
        assert!(table.contains("\r\n1,ci-t1,"));
    }

    #[test]
    fn sim_experiment_writes_histogram_and_effective_bias() {
        let text = r#"
            name = "emb"
            level = "agent-sim"
            master_seed = 5
            runs_per_cell = 2
            [base]
            mechanism = "ci-t2"
            q_b = 0.82
            eta = 0.05
            n = 10
            [sim]
            bias = "synergistic"
            horizon_cycles = 400
            sample_every_cycles = 10
            final_window_cycles = 100
            interior_cols = 8
            interior_rows = 8
        "#;
        let spec = ExperimentSpec::from_toml(text).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&spec, dir.path()).unwrap();
        let names: Vec<String> = out
            .files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            names,
            [
                "emb_runs.csv",
                "emb_final_window_hist.csv",
                "emb_metrics.csv",
                "emb_manifest.jsonl"
            ]
        );
        let runs = std::fs::read_to_string(dir.path().join("emb_runs.csv")).unwrap();
        // The synergistic mosaic pins eta_a to q_a / (q_a + q_b); reproduce
        // the exact floating-point expression to match the formatted field.
        let eta_a: f64 = 1.0 / (1.0 + 0.82);
        assert!(
            runs.contains(&format!(",{},", fmt_f64(eta_a))),
            "effective bias missing from rows"
        );
        let hist =
            std::fs::read_to_string(dir.path().join("emb_final_window_hist.csv")).unwrap();
        let mass_total: f64 = hist
            .split("\r\n")
            .skip(1)
            .filter(|l| !l.is_empty())
            .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
            .sum();
        assert!((mass_total - 1.0).abs() < 1e-9, "histogram mass {mass_total}");
    }

    #[test]
    fn critical_grid_includes_out_of_range_cells() {
        let dir = tempfile::tempdir().unwrap();
        let out =
            run_critical_grid("cb", &[0.5, 0.92], &[0.0, 0.05, 0.5], dir.path()).unwrap();
        assert_eq!(out.n_cells, 6);
        let table =
            std::fs::read_to_string(dir.path().join("cb_critical_bias.csv")).unwrap();
        assert!(table.starts_with("q,eta,eta_a_star,raw,in_range\r\n"));
        // eta = 0 rows carry empty values, flagged out of range.
        assert!(table.contains("0.5,0,,,false\r\n"));
        // The reference point: q = 0.92, eta = 0.05.
        let line = table
            .split("\r\n")
            .find(|l| l.starts_with("0.92,0.05,"))
            .unwrap();
        let star: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((star - 0.0833333333).abs() < 1e-9);
    }
}
