//! CSV writers for every table the library produces.
//!
//! All files follow RFC 4180: a header row, comma-separated fields, CRLF
//! line endings. Fields are numbers or bare labels, so no quoting is ever
//! required (writers check this in debug builds). Floats are written with
//! Rust's shortest round-trip formatting, which makes output byte-stable
//! across runs and platforms: the same results always serialise to the same
//! bytes.

use crate::metrics::RunSummary;
use crate::ode::{BifurcationScan, Trajectory};
use crate::ssa::{Spd, SpeedCell, SsaRun};
use std::fs;
use std::io;
use std::path::Path;

/// Formats a float exactly as its shortest round-trip decimal.
pub fn fmt_f64(x: f64) -> String {
    x.to_string()
}

/// Formats an optional value; absent values become empty fields, keeping
/// missing cells visible without inventing sentinel numbers.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn check_field(field: &str) {
    debug_assert!(
        !field.contains([',', '"', '\r', '\n']),
        "field {field:?} would need quoting; writers emit bare values only"
    );
}

/// Writes a table with CRLF line endings and a final line terminator.
pub fn write_csv<P: AsRef<Path>>(
    path: P,
    header: &[&str],
    rows: &[Vec<String>],
) -> io::Result<()> {
    let mut out = String::new();
    for f in header {
        check_field(f);
    }
    out.push_str(&header.join(","));
    out.push_str("\r\n");
    for row in rows {
        debug_assert_eq!(row.len(), header.len(), "row width differs from header");
        for f in row {
            check_field(f);
        }
        out.push_str(&row.join(","));
        out.push_str("\r\n");
    }
    fs::write(path, out)
}

/// Deterministic trajectory table: `time` plus one column per component.
pub fn write_ode_trajectory<P: AsRef<Path>>(
    path: P,
    names: &[&str],
    traj: &Trajectory,
) -> io::Result<()> {
    let mut header = vec!["time"];
    header.extend_from_slice(names);
    let rows: Vec<Vec<String>> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, x)| {
            let mut row = vec![fmt_f64(*t)];
            row.extend(x.iter().map(|v| fmt_f64(*v)));
            row
        })
        .collect();
    write_csv(path, &header, &rows)
}

/// Count time series shared by the stochastic and embodied levels: one row
/// per sample, five compartment columns.
pub fn write_count_series<P: AsRef<Path>>(
    path: P,
    rows: &[(f64, [u64; 5])],
) -> io::Result<()> {
    let header = [
        "cycle",
        "count_a_d",
        "count_b_d",
        "count_a_e",
        "count_b_e",
        "count_u",
    ];
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(t, c)| {
            let mut row = vec![fmt_f64(*t)];
            row.extend(c.iter().map(|v| v.to_string()));
            row
        })
        .collect();
    write_csv(path, &header, &body)
}

/// A stochastic run's sampled trajectory.
pub fn write_ssa_samples<P: AsRef<Path>>(path: P, run: &SsaRun) -> io::Result<()> {
    let rows: Vec<(f64, [u64; 5])> = run
        .samples
        .iter()
        .map(|(t, s)| (*t, s.counts))
        .collect();
    write_count_series(path, &rows)
}

/// A binned stationary distribution: `observable,mass`.
pub fn write_spd<P: AsRef<Path>>(path: P, spd: &Spd) -> io::Result<()> {
    let rows: Vec<Vec<String>> = spd
        .bin_centers
        .iter()
        .zip(&spd.mass)
        .map(|(c, m)| vec![fmt_f64(*c), fmt_f64(*m)])
        .collect();
    write_csv(path, &["observable", "mass"], &rows)
}

/// Equilibrium branches along a swept parameter: one row per equilibrium per
/// grid value, with the full reduced state spelled out.
pub fn write_bifurcation<P: AsRef<Path>>(
    path: P,
    names: &[&str],
    scan: &BifurcationScan,
) -> io::Result<()> {
    let mut header = vec![scan.sweep.label(), "observable", "stability"];
    header.extend_from_slice(names);
    let mut rows = Vec::new();
    for (value, reports) in scan.grid.iter().zip(&scan.points) {
        for r in reports {
            let mut row = vec![
                fmt_f64(*value),
                fmt_f64(r.observable),
                r.stability.label().to_string(),
            ];
            row.extend(r.state.iter().map(|v| fmt_f64(*v)));
            rows.push(row);
        }
    }
    write_csv(path, &header, &rows)
}

/// Decision-speed grid cells; missing cells keep empty mean/spread fields.
pub fn write_speed_cells<P: AsRef<Path>>(path: P, cells: &[SpeedCell]) -> io::Result<()> {
    let header = [
        "mechanism",
        "n",
        "speed_mean",
        "speed_std",
        "n_decided",
        "n_runs",
    ];
    let rows: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            vec![
                c.mechanism.label().to_string(),
                c.n.to_string(),
                fmt_opt(c.stat.mean),
                fmt_opt(c.stat.std_dev),
                c.stat.n_decided.to_string(),
                c.stat.n_runs.to_string(),
            ]
        })
        .collect();
    write_csv(path, &header, &rows)
}

/// Metric grid in the layout used for figure-style heatmaps: every row
/// carries its full parameter tuple.
pub fn write_heatmap<P: AsRef<Path>>(
    path: P,
    rows: &[crate::metrics::HeatmapRow],
) -> io::Result<()> {
    let header = [
        "eta",
        "eta_a",
        "q",
        "mechanism",
        "cohesion",
        "accuracy",
        "speed_mean",
        "speed_std",
        "n_decided",
        "n_runs",
    ];
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.eta),
                fmt_f64(r.eta_a),
                fmt_f64(r.q),
                r.mechanism.clone(),
                fmt_f64(r.cohesion),
                fmt_f64(r.accuracy),
                fmt_opt(r.speed.mean),
                fmt_opt(r.speed.std_dev),
                r.speed.n_decided.to_string(),
                r.speed.n_runs.to_string(),
            ]
        })
        .collect();
    write_csv(path, &header, &body)
}

/// Per-run outcome table for a batch.
pub fn write_run_summaries<P: AsRef<Path>>(
    path: P,
    summaries: &[RunSummary],
) -> io::Result<()> {
    let header = [
        "run",
        "n",
        "final_a",
        "final_b",
        "first_passage_a",
        "first_passage_b",
        "horizon",
    ];
    let rows: Vec<Vec<String>> = summaries
        .iter()
        .enumerate()
        .map(|(i, s)| {
            vec![
                i.to_string(),
                s.n.to_string(),
                s.final_a.to_string(),
                s.final_b.to_string(),
                fmt_opt(s.first_passage_a),
                fmt_opt(s.first_passage_b),
                fmt_f64(s.horizon),
            ]
        })
        .collect();
    write_csv(path, &header, &rows)
}
