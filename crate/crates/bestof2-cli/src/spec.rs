//! Declarative experiment specifications.
//!
//! An experiment is a TOML document: a `[base]` parameter table, an optional
//! `[sweep]` table turning chosen parameters into grid axes, and one optional
//! level-settings table (`[ode]`, `[ssa]`, or `[sim]`) matching the declared
//! `level`. Sweep axes are ordered alphabetically by key and expanded
//! row-major into a flat list of cells; cell `i` derives its random stream
//! from `(master_seed, i)`, so editing one axis never reshuffles the seeds
//! within a row and identical specs reproduce identical outputs byte for
//! byte. The full grammar is documented in the repository README.

use bestof2::params::{Mechanism, ModelParams};
use bestof2::rngutil::seed_for_run;
use bestof2::sim::BiasMode;
use bestof2::ssa::InitialCondition;
use bestof2::ssa::DiscreteState;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

/// Hard cap on sweep size; a typo in an axis should fail fast, not allocate.
const MAX_CELLS: usize = 1_000_000;

/// Everything that can go wrong between a spec file and finished output.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("unknown preset {0:?}; `list-presets` shows the available names")]
    UnknownPreset(String),
    #[error("output directory {path}: {source}")]
    OutputDirNotWritable {
        path: String,
        source: std::io::Error,
    },
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Run(String),
}

impl CliError {
    /// Stable machine-readable discriminator for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::InvalidSpec(_) => "invalid-spec",
            CliError::UnknownPreset(_) => "unknown-preset",
            CliError::OutputDirNotWritable { .. } => "output-dir-not-writable",
            CliError::Io { .. } => "io",
            CliError::Run(_) => "run-failed",
        }
    }

    /// One-line JSON error record, the machine-readable failure contract.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind(), "message": self.to_string() }
        })
        .to_string()
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::InvalidSpec(msg.into()))
}

/// Model level an experiment runs at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    /// Deterministic mean-field equilibria.
    Ode,
    /// Finite-population stochastic simulation.
    Ssa,
    /// Spatial agent-based simulation.
    AgentSim,
}

impl Level {
    pub fn label(self) -> &'static str {
        match self {
            Level::Ode => "ode",
            Level::Ssa => "ssa",
            Level::AgentSim => "agent-sim",
        }
    }
}

/// Accepts the canonical mechanism labels plus common short aliases.
pub fn parse_mechanism(s: &str) -> Result<Mechanism, CliError> {
    match s {
        "ci1" => Ok(Mechanism::CrossInhibitionT1),
        "ci2" => Ok(Mechanism::CrossInhibitionT2),
        other => other
            .parse::<Mechanism>()
            .map_err(CliError::InvalidSpec),
    }
}

fn d_one() -> f64 {
    1.0
}
fn d_half() -> f64 {
    0.5
}
fn d_n() -> u32 {
    100
}
fn d_te() -> f64 {
    3000.0
}
fn d_td() -> f64 {
    1300.0
}
fn d_tu() -> f64 {
    1000.0
}
fn d_runs() -> usize {
    50
}
fn d_horizon_f() -> f64 {
    200_000.0
}
fn d_sample_f() -> f64 {
    1000.0
}
fn d_horizon_u() -> u64 {
    200_000
}
fn d_sample_u() -> u64 {
    10
}
fn d_cols() -> usize {
    20
}
fn d_rows() -> usize {
    40
}
fn d_window() -> u64 {
    1000
}
fn d_sigma() -> f64 {
    0.1
}
fn d_ode_level() -> String {
    "robot".into()
}
fn d_bias() -> String {
    "synergistic".into()
}

/// `[base]`: the model parameter tuple, with time constants carrying their
/// unit in the key name. Mechanism labels: `ds`, `ci-t1`, `ci-t2` (or the
/// long forms `direct-switch`, `cross-inhibition-t1`, `cross-inhibition-t2`).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseTable {
    pub mechanism: String,
    #[serde(default = "d_one")]
    pub q_a: f64,
    #[serde(default = "d_one")]
    pub q_b: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default = "d_half")]
    pub eta_a: f64,
    #[serde(default = "d_n")]
    pub n: u32,
    #[serde(default = "d_te")]
    pub t_e_cycles: f64,
    #[serde(default = "d_td")]
    pub t_d_cycles: f64,
    #[serde(default = "d_tu")]
    pub t_u_cycles: f64,
}

impl BaseTable {
    fn to_params(&self) -> Result<ModelParams, CliError> {
        let p = ModelParams {
            q_a: self.q_a,
            q_b: self.q_b,
            eta: self.eta,
            eta_a: self.eta_a,
            t_e: self.t_e_cycles,
            t_d: self.t_d_cycles,
            t_u: self.t_u_cycles,
            mechanism: parse_mechanism(&self.mechanism)?,
            n: self.n,
        };
        p.validate()
            .map_err(|e| CliError::InvalidSpec(format!("base parameters: {e}")))
    }
}

/// Initial condition table for stochastic runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitTable {
    /// A uniformly random composition of the population.
    UniformRandom,
    /// Every agent independently picks a compartment uniformly at random,
    /// concentrating starts near the balanced composition.
    PerAgentUniform,
    /// A fixed fraction disseminating, split evenly between options; the
    /// rest exploring, split evenly.
    SymmetricSplit { disseminating: f64 },
    /// Explicit counts `[a_d, b_d, a_e, b_e, u]`.
    Counts { counts: [u64; 5] },
}

impl Default for InitTable {
    fn default() -> Self {
        InitTable::SymmetricSplit {
            disseminating: 0.28,
        }
    }
}

impl InitTable {
    pub fn to_initial(&self) -> InitialCondition {
        match *self {
            InitTable::UniformRandom => InitialCondition::UniformRandom,
            InitTable::PerAgentUniform => InitialCondition::PerAgentUniform,
            InitTable::SymmetricSplit { disseminating } => {
                InitialCondition::SymmetricSplit { disseminating }
            }
            InitTable::Counts { counts } => {
                InitialCondition::Fixed(DiscreteState::new(counts))
            }
        }
    }
}

/// `[ode]` settings.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeTable {
    /// `"robot"` (phase-resolved) or `"basic"`.
    #[serde(default = "d_ode_level")]
    pub level: String,
}

impl Default for OdeTable {
    fn default() -> Self {
        OdeTable {
            level: d_ode_level(),
        }
    }
}

/// `[ssa]` settings.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsaTable {
    #[serde(default = "d_horizon_f")]
    pub horizon_cycles: f64,
    #[serde(default = "d_sample_f")]
    pub sample_every_cycles: f64,
    #[serde(default)]
    pub quorum: Option<f64>,
    #[serde(default)]
    pub stop_at_quorum: bool,
    #[serde(default)]
    pub init: InitTable,
    /// Histogram bin width for the stationary distribution; default `2/N`.
    #[serde(default)]
    pub spd_bin_width: Option<f64>,
}

impl Default for SsaTable {
    fn default() -> Self {
        SsaTable {
            horizon_cycles: d_horizon_f(),
            sample_every_cycles: d_sample_f(),
            quorum: None,
            stop_at_quorum: false,
            init: InitTable::default(),
            spd_bin_width: None,
        }
    }
}

/// `[sim]` settings (agent level); geometry not listed here keeps the
/// tabletop defaults.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimTable {
    /// `"synergistic"` (mosaic carries the qualities, bias locked to
    /// `q_a/(q_a+q_b)`) or `"antagonistic"` (nominal qualities with noise,
    /// bias free).
    #[serde(default = "d_bias")]
    pub bias: String,
    /// Quality-read noise for the antagonistic mode.
    #[serde(default = "d_sigma")]
    pub sigma: f64,
    #[serde(default = "d_horizon_u")]
    pub horizon_cycles: u64,
    #[serde(default = "d_sample_u")]
    pub sample_every_cycles: u64,
    #[serde(default)]
    pub quorum: Option<f64>,
    #[serde(default = "d_half")]
    pub initial_a_fraction: f64,
    #[serde(default = "d_cols")]
    pub interior_cols: usize,
    #[serde(default = "d_rows")]
    pub interior_rows: usize,
    /// Width of the end-of-run window pooled into the final histogram.
    #[serde(default = "d_window")]
    pub final_window_cycles: u64,
    /// Write one count time-series CSV per run (large).
    #[serde(default)]
    pub record_timeseries: bool,
}

impl Default for SimTable {
    fn default() -> Self {
        SimTable {
            bias: d_bias(),
            sigma: d_sigma(),
            horizon_cycles: d_horizon_u(),
            sample_every_cycles: d_sample_u(),
            quorum: None,
            initial_a_fraction: d_half(),
            interior_cols: d_cols(),
            interior_rows: d_rows(),
            final_window_cycles: d_window(),
            record_timeseries: false,
        }
    }
}

impl SimTable {
    pub fn bias_mode(&self) -> Result<BiasMode, CliError> {
        match self.bias.as_str() {
            "synergistic" => Ok(BiasMode::Synergistic),
            "antagonistic" => Ok(BiasMode::Antagonistic { sigma: self.sigma }),
            other => invalid(format!(
                "unknown bias mode {other:?}; expected synergistic or antagonistic"
            )),
        }
    }
}

/// The raw deserialized document.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub name: String,
    pub level: Level,
    #[serde(default = "d_runs")]
    pub runs_per_cell: usize,
    pub master_seed: u64,
    /// Default output directory; overridden by `--out` and the environment.
    #[serde(default)]
    pub out_dir: Option<String>,
    pub base: BaseTable,
    #[serde(default)]
    pub sweep: BTreeMap<String, toml::Value>,
    #[serde(default)]
    pub ode: Option<OdeTable>,
    #[serde(default)]
    pub ssa: Option<SsaTable>,
    #[serde(default)]
    pub sim: Option<SimTable>,
}

/// One sweep axis: a parameter name and its grid, in document order of the
/// (alphabetically sorted) sweep table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub key: String,
    pub values: Vec<AxisValue>,
}

/// Values an axis can take.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AxisValue {
    Float(f64),
    Int(u64),
    Mechanism(String),
}

impl AxisValue {
    /// Display form used in logs; CSV rows re-derive values from the cell's
    /// parameter set instead.
    pub fn label(&self) -> String {
        match self {
            AxisValue::Float(x) => x.to_string(),
            AxisValue::Int(v) => v.to_string(),
            AxisValue::Mechanism(m) => m.clone(),
        }
    }
}

/// A fully resolved, validated experiment: what the runner executes and the
/// manifest hashes.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub level: Level,
    pub runs_per_cell: usize,
    pub master_seed: u64,
    #[serde(skip)]
    pub out_dir: Option<String>,
    pub base: ModelParams,
    pub axes: Vec<Axis>,
    pub ode_level: bestof2::ode::OdeLevel,
    pub ssa: SsaSettings,
    pub sim: SimSettings,
}

/// Resolved stochastic-level settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SsaSettings {
    pub horizon: f64,
    pub sample_interval: f64,
    pub quorum: Option<f64>,
    pub stop_at_quorum: bool,
    pub init: InitTable,
    pub spd_bin_width: Option<f64>,
}

/// Resolved agent-level settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSettings {
    pub bias: String,
    pub sigma: f64,
    pub horizon_cycles: u64,
    pub sample_every: u64,
    pub quorum: Option<f64>,
    pub initial_a_fraction: f64,
    pub interior_cols: usize,
    pub interior_rows: usize,
    pub final_window_cycles: u64,
    pub record_timeseries: bool,
}

/// One grid point of the sweep with its concrete parameters.
#[derive(Debug, Clone)]
pub struct Cell {
    pub index: usize,
    pub params: ModelParams,
}

impl ExperimentSpec {
    /// Parses and resolves a TOML document.
    pub fn from_toml(text: &str) -> Result<ExperimentSpec, CliError> {
        let file: SpecFile =
            toml::from_str(text).map_err(|e| CliError::InvalidSpec(e.to_string()))?;
        ExperimentSpec::resolve(file)
    }

    /// Reads and resolves a spec file.
    pub fn from_path(path: &Path) -> Result<ExperimentSpec, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        ExperimentSpec::from_toml(&text)
    }

    fn resolve(file: SpecFile) -> Result<ExperimentSpec, CliError> {
        if file.name.is_empty()
            || !file
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return invalid(format!(
                "name {:?} must be non-empty and use only [A-Za-z0-9_-] (it prefixes file names)",
                file.name
            ));
        }
        if file.runs_per_cell == 0 {
            return invalid("runs_per_cell must be at least 1");
        }
        for (table, level) in [
            (file.ode.is_some(), Level::Ode),
            (file.ssa.is_some(), Level::Ssa),
            (file.sim.is_some(), Level::AgentSim),
        ] {
            if table && file.level != level {
                return invalid(format!(
                    "settings table [{}] does not match level = {:?}",
                    level.label(),
                    file.level.label()
                ));
            }
        }
        let base = file.base.to_params()?;
        let axes = parse_axes(&file.sweep)?;

        let ode_table = file.ode.unwrap_or_default();
        let ode_level = match ode_table.level.as_str() {
            "robot" => bestof2::ode::OdeLevel::Robot,
            "basic" => bestof2::ode::OdeLevel::Basic,
            other => {
                return invalid(format!(
                    "unknown ode level {other:?}; expected robot or basic"
                ))
            }
        };
        let ssa_table = file.ssa.unwrap_or_default();
        if ssa_table.horizon_cycles <= 0.0 || ssa_table.sample_every_cycles <= 0.0 {
            return invalid("ssa horizon and sample interval must be positive");
        }
        let sim_table = file.sim.unwrap_or_default();
        sim_table.bias_mode()?; // validate the label early
        let spec = ExperimentSpec {
            name: file.name,
            level: file.level,
            runs_per_cell: file.runs_per_cell,
            master_seed: file.master_seed,
            out_dir: file.out_dir,
            base,
            axes,
            ode_level,
            ssa: SsaSettings {
                horizon: ssa_table.horizon_cycles,
                sample_interval: ssa_table.sample_every_cycles,
                quorum: ssa_table.quorum,
                stop_at_quorum: ssa_table.stop_at_quorum,
                init: ssa_table.init,
                spd_bin_width: ssa_table.spd_bin_width,
            },
            sim: SimSettings {
                bias: sim_table.bias,
                sigma: sim_table.sigma,
                horizon_cycles: sim_table.horizon_cycles,
                sample_every: sim_table.sample_every_cycles,
                quorum: sim_table.quorum,
                initial_a_fraction: sim_table.initial_a_fraction,
                interior_cols: sim_table.interior_cols,
                interior_rows: sim_table.interior_rows,
                final_window_cycles: sim_table.final_window_cycles,
                record_timeseries: sim_table.record_timeseries,
            },
        };
        spec.cells()?; // every cell must validate before anything runs
        Ok(spec)
    }

    /// Expands the sweep axes row-major (first axis slowest) into concrete
    /// per-cell parameter sets. With no axes there is exactly one cell.
    pub fn cells(&self) -> Result<Vec<Cell>, CliError> {
        let total: usize = self.axes.iter().map(|a| a.values.len()).product();
        if total > MAX_CELLS {
            return invalid(format!("sweep expands to {total} cells (cap {MAX_CELLS})"));
        }
        let mut cells = Vec::with_capacity(total);
        for index in 0..total {
            let mut params = self.base;
            let mut rem = index;
            // Row-major: later axes vary fastest.
            for axis in self.axes.iter().rev() {
                let k = rem % axis.values.len();
                rem /= axis.values.len();
                apply_axis_value(&mut params, &axis.key, &axis.values[k])?;
            }
            let params = params.validate().map_err(|e| {
                CliError::InvalidSpec(format!("sweep cell {index}: {e}"))
            })?;
            cells.push(Cell { index, params });
        }
        Ok(cells)
    }

    /// The random stream for one cell, derived so cells are independent of
    /// each other and of batch size.
    pub fn cell_seed(&self, cell_index: usize) -> u64 {
        seed_for_run(self.master_seed, cell_index as u64)
    }

    /// FNV-1a hash of the canonical JSON form, stamped into the manifest so
    /// outputs can be traced back to the exact resolved spec.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serializes");
        format!("{:016x}", fnv1a64(json.as_bytes()))
    }
}

/// 64-bit FNV-1a: tiny, dependency-free, stable across platforms. Used for
/// provenance stamps, not security.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

const FLOAT_KEYS: [&str; 4] = ["eta", "eta_a", "q_a", "q_b"];

fn parse_axes(sweep: &BTreeMap<String, toml::Value>) -> Result<Vec<Axis>, CliError> {
    let mut axes = Vec::new();
    // BTreeMap iteration is already alphabetical; that ordering is part of
    // the on-disk contract (cell index = row-major over sorted axes).
    for (key, value) in sweep {
        let arr = match value.as_array() {
            Some(a) if !a.is_empty() => a,
            _ => {
                return invalid(format!(
                    "sweep axis {key:?} must be a non-empty array of values"
                ))
            }
        };
        let values = if FLOAT_KEYS.contains(&key.as_str()) {
            arr.iter()
                .map(|v| {
                    v.as_float()
                        .or_else(|| v.as_integer().map(|i| i as f64))
                        .map(AxisValue::Float)
                        .ok_or_else(|| {
                            CliError::InvalidSpec(format!(
                                "sweep axis {key:?} expects numbers, got {v}"
                            ))
                        })
                })
                .collect::<Result<Vec<_>, _>>()?
        } else if key == "n" {
            arr.iter()
                .map(|v| match v.as_integer() {
                    Some(i) if i > 0 => Ok(AxisValue::Int(i as u64)),
                    _ => invalid(format!(
                        "sweep axis \"n\" expects positive integers, got {v}"
                    )),
                })
                .collect::<Result<Vec<_>, _>>()?
        } else if key == "mechanism" {
            arr.iter()
                .map(|v| match v.as_str() {
                    Some(s) => {
                        parse_mechanism(s)?; // canonical labels checked here
                        Ok(AxisValue::Mechanism(s.to_string()))
                    }
                    None => invalid(format!(
                        "sweep axis \"mechanism\" expects strings, got {v}"
                    )),
                })
                .collect::<Result<Vec<_>, _>>()?
        } else {
            return invalid(format!(
                "unknown sweep axis {key:?}; sweepable: eta, eta_a, q_a, q_b, n, mechanism"
            ));
        };
        axes.push(Axis {
            key: key.clone(),
            values,
        });
    }
    Ok(axes)
}

fn apply_axis_value(
    params: &mut ModelParams,
    key: &str,
    value: &AxisValue,
) -> Result<(), CliError> {
    match (key, value) {
        ("eta", AxisValue::Float(x)) => params.eta = *x,
        ("eta_a", AxisValue::Float(x)) => params.eta_a = *x,
        ("q_a", AxisValue::Float(x)) => params.q_a = *x,
        ("q_b", AxisValue::Float(x)) => params.q_b = *x,
        ("n", AxisValue::Int(v)) => params.n = *v as u32,
        ("mechanism", AxisValue::Mechanism(m)) => params.mechanism = parse_mechanism(m)?,
        _ => return invalid(format!("axis {key:?} cannot take value {value:?}")),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        name = "demo"
        level = "ssa"
        master_seed = 7
        [base]
        mechanism = "ci2"
        q_b = 0.82
    "#;

    #[test]
    fn minimal_spec_resolves_with_defaults() {
        let spec = ExperimentSpec::from_toml(MINIMAL).unwrap();
        assert_eq!(spec.level, Level::Ssa);
        assert_eq!(spec.runs_per_cell, 50);
        assert_eq!(spec.base.mechanism, Mechanism::CrossInhibitionT2);
        assert_eq!(spec.base.t_e, 3000.0);
        assert_eq!(spec.ssa.horizon, 200_000.0);
        assert_eq!(
            spec.ssa.init,
            InitTable::SymmetricSplit {
                disseminating: 0.28
            }
        );
        assert_eq!(spec.cells().unwrap().len(), 1);
    }

    #[test]
    fn sweep_axes_expand_alphabetically_row_major() {
        let text = r#"
            name = "grid"
            level = "ssa"
            master_seed = 1
            [base]
            mechanism = "ds"
            [sweep]
            mechanism = ["ds", "ci1"]
            eta = [0.0, 0.1, 0.2]
        "#;
        let spec = ExperimentSpec::from_toml(text).unwrap();
        // Alphabetical: eta before mechanism, regardless of document order.
        assert_eq!(spec.axes[0].key, "eta");
        assert_eq!(spec.axes[1].key, "mechanism");
        let cells = spec.cells().unwrap();
        assert_eq!(cells.len(), 6);
        // Later axes vary fastest: (eta0,ds), (eta0,ci1), (eta0.1,ds), ...
        assert_eq!(cells[0].params.eta, 0.0);
        assert_eq!(cells[0].params.mechanism, Mechanism::DirectSwitch);
        assert_eq!(cells[1].params.eta, 0.0);
        assert_eq!(cells[1].params.mechanism, Mechanism::CrossInhibitionT1);
        assert_eq!(cells[2].params.eta, 0.1);
        assert_eq!(cells[2].params.mechanism, Mechanism::DirectSwitch);
        assert_eq!(cells[5].params.eta, 0.2);
        assert_eq!(cells[5].params.mechanism, Mechanism::CrossInhibitionT1);
    }

    #[test]
    fn unknown_keys_and_axes_are_rejected() {
        let typo_field = MINIMAL.replace("master_seed = 7", "master_seed = 7\nbogus = 1");
        assert!(matches!(
            ExperimentSpec::from_toml(&typo_field),
            Err(CliError::InvalidSpec(_))
        ));
        let typo_axis = format!("{MINIMAL}\n[sweep]\nqb = [0.5]\n");
        let err = ExperimentSpec::from_toml(&typo_axis).unwrap_err();
        assert!(err.to_string().contains("unknown sweep axis"));
    }

    #[test]
    fn out_of_range_cells_fail_validation_up_front() {
        let text = format!("{MINIMAL}\n[sweep]\neta = [0.0, 1.5]\n");
        let err = ExperimentSpec::from_toml(&text).unwrap_err();
        assert!(matches!(err, CliError::InvalidSpec(_)), "{err}");
    }

    #[test]
    fn mismatched_settings_table_is_rejected() {
        let text = format!("{MINIMAL}\n[sim]\nbias = \"synergistic\"\n");
        let err = ExperimentSpec::from_toml(&text).unwrap_err();
        assert!(err.to_string().contains("does not match level"));
    }

    #[test]
    fn error_records_are_json_with_a_kind() {
        let err = CliError::InvalidSpec("boom".into());
        let v: serde_json::Value = serde_json::from_str(&err.to_json()).unwrap();
        assert_eq!(v["error"]["kind"], "invalid-spec");
        assert_eq!(v["error"]["message"], "invalid spec: boom");
    }

    #[test]
    fn spec_hash_is_stable_and_sensitive() {
        let a = ExperimentSpec::from_toml(MINIMAL).unwrap();
        let b = ExperimentSpec::from_toml(MINIMAL).unwrap();
        assert_eq!(a.hash(), b.hash());
        let c =
            ExperimentSpec::from_toml(&MINIMAL.replace("master_seed = 7", "master_seed = 8"))
                .unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn cell_seeds_match_the_run_derivation() {
        let spec = ExperimentSpec::from_toml(MINIMAL).unwrap();
        assert_eq!(spec.cell_seed(3), seed_for_run(7, 3));
    }
}
