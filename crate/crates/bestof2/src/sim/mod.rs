//! Spatial agent-based simulation of the collective-perception scenario.
//!
//! Robots move through a tiled rectangular arena, alternate between
//! exploring (estimating the quality of their current option from the tiles
//! they cross) and disseminating (broadcasting their opinion for a
//! quality-weighted duration), and update their commitment either socially —
//! polling one disseminating neighbour — or asocially, by reading the colour
//! of the tile underneath them. The tile mosaic therefore plays a double
//! role: it carries the quality signal and it is the asocial information
//! source, with the red fraction pinned to the asocial bias `eta_a`.
//!
//! [`arena`] builds the mosaic, [`robot`] holds the per-robot controller,
//! and [`run`] drives whole swarms and batches.

pub mod arena;
pub mod robot;
pub mod run;

pub use arena::{build_arena, Arena, CellColor};
pub use robot::{
    antagonistic_draw, synergistic_estimate, FsmState, Opinion, Robot,
};
pub use run::{run_batch_sim, run_sim, RunRecord};

use crate::params::{ModelParams, ParamError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Failure modes of the embodied level.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    /// The arena's interior is too small to carry a meaningful mosaic.
    #[error("arena interior has {interior} cells; at least 4 required")]
    ArenaTooSmall { interior: usize },
    /// Invalid model parameters.
    #[error(transparent)]
    BadParams(#[from] ParamError),
    /// A config field is out of its physical range.
    #[error("invalid simulation config: {0}")]
    BadConfig(String),
}

/// How exploring robots turn tiles into quality estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BiasMode {
    /// The tile mosaic itself encodes the qualities: a robot committed to an
    /// option estimates its quality as the fraction of distinct tiles of
    /// that option's colour among all distinct tiles crossed during the
    /// exploration. The red fraction is forced to `q_a / (q_a + q_b)`, so
    /// the same mosaic aligns the asocial bias with the quality signal.
    Synergistic,
    /// Tiles carry a nominal quality signal: the first tile matching the
    /// robot's opinion yields one draw from a normal distribution centred on
    /// the nominal quality, clamped to `[0, 1]`. The red fraction (and with
    /// it the asocial bias) is configured independently of the qualities.
    Antagonistic { sigma: f64 },
}

/// Full description of one embodied experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Population-level parameters; `params.n` is the robot count.
    pub params: ModelParams,
    pub bias_mode: BiasMode,
    /// Interior mosaic size in cells (borders are added around it).
    pub interior_cols: usize,
    pub interior_rows: usize,
    /// Tile edge length in centimetres.
    pub cell_size_cm: f64,
    /// Message reception radius in centimetres.
    pub comm_range_cm: f64,
    /// Straight-line speed in centimetres per control cycle.
    pub speed_cm_per_cycle: f64,
    /// In-place rotation speed in radians per control cycle.
    pub turn_rate_rad_per_cycle: f64,
    /// Mean straight-leg length of the random walk, in cycles.
    pub leg_mean_cycles: f64,
    /// Run length in control cycles.
    pub horizon_cycles: u64,
    /// Quorum fraction for first-passage detection; `None` disables it.
    pub quorum: Option<f64>,
    /// Spacing of recorded samples and quorum checks, in cycles.
    pub sample_every: u64,
    /// Fraction of robots initially committed to the better option; the
    /// rest start committed to the other one (nobody starts uncommitted).
    pub initial_a_fraction: f64,
}

impl SimConfig {
    /// Desk-scale defaults: a 20x40-cell interior with physical constants
    /// matching a small tabletop robot (1 cm/s translation, 45 degrees/s
    /// rotation, 10 cm communication range, 32 ms control cycle).
    pub fn desk(params: ModelParams, bias_mode: BiasMode) -> Result<SimConfig, SimError> {
        SimConfig {
            params,
            bias_mode,
            interior_cols: 20,
            interior_rows: 40,
            cell_size_cm: 10.0,
            comm_range_cm: 10.0,
            speed_cm_per_cycle: 0.032,
            turn_rate_rad_per_cycle: 45.0_f64.to_radians() * 0.032,
            leg_mean_cycles: 40.0,
            horizon_cycles: 200_000,
            quorum: None,
            sample_every: 10,
            initial_a_fraction: 0.5,
        }
        .validated()
    }

    /// Validates the config and enforces the synergistic coupling
    /// `eta_a = q_a / (q_a + q_b)`.
    pub fn validated(mut self) -> Result<SimConfig, SimError> {
        if let BiasMode::Synergistic = self.bias_mode {
            self.params.eta_a = self.params.q_a / (self.params.q_a + self.params.q_b);
        }
        self.params = self.params.validate()?;
        if let BiasMode::Antagonistic { sigma } = self.bias_mode {
            if !(sigma >= 0.0 && sigma.is_finite()) {
                return Err(SimError::BadConfig(format!(
                    "sigma {sigma} must be a finite non-negative number"
                )));
            }
        }
        for (name, v) in [
            ("cell_size_cm", self.cell_size_cm),
            ("comm_range_cm", self.comm_range_cm),
            ("speed_cm_per_cycle", self.speed_cm_per_cycle),
            ("turn_rate_rad_per_cycle", self.turn_rate_rad_per_cycle),
            ("leg_mean_cycles", self.leg_mean_cycles),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SimError::BadConfig(format!("{name} = {v} must be positive")));
            }
        }
        if self.horizon_cycles == 0 || self.sample_every == 0 {
            return Err(SimError::BadConfig(
                "horizon and sample interval must be positive".into(),
            ));
        }
        if let Some(q) = self.quorum {
            if !(0.0..=1.0).contains(&q) {
                return Err(SimError::BadConfig(format!("quorum {q} outside [0, 1]")));
            }
        }
        if !(0.0..=1.0).contains(&self.initial_a_fraction) {
            return Err(SimError::BadConfig(format!(
                "initial_a_fraction {} outside [0, 1]",
                self.initial_a_fraction
            )));
        }
        Ok(self)
    }

    /// The tile red fraction: always the asocial bias toward the better
    /// option, so self-sourced colour reads realise `eta_a` exactly.
    pub fn red_fraction(&self) -> f64 {
        self.params.eta_a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Mechanism;
    use approx::assert_abs_diff_eq;

    #[test]
    fn synergistic_mode_pins_the_bias_to_the_quality_ratio() {
        let p = ModelParams {
            q_a: 1.0,
            q_b: 0.82,
            eta: 0.05,
            eta_a: 0.9, // will be overridden
            mechanism: Mechanism::CrossInhibitionT2,
            n: 50,
            ..ModelParams::default()
        };
        let cfg = SimConfig::desk(p, BiasMode::Synergistic).unwrap();
        assert_abs_diff_eq!(cfg.params.eta_a, 1.0 / 1.82, epsilon = 1e-15);
        assert_abs_diff_eq!(cfg.red_fraction(), 1.0 / 1.82, epsilon = 1e-15);
    }

    #[test]
    fn antagonistic_mode_keeps_the_configured_bias() {
        let p = ModelParams {
            q_a: 1.0,
            q_b: 0.82,
            eta: 0.1,
            eta_a: 0.25,
            ..ModelParams::default()
        };
        let cfg = SimConfig::desk(p, BiasMode::Antagonistic { sigma: 0.1 }).unwrap();
        assert_abs_diff_eq!(cfg.params.eta_a, 0.25);
        let bad = SimConfig::desk(
            cfg.params,
            BiasMode::Antagonistic { sigma: f64::NAN },
        );
        assert!(matches!(bad, Err(SimError::BadConfig(_))));
    }

    #[test]
    fn config_rejects_degenerate_geometry() {
        let p = ModelParams::default();
        let mut cfg = SimConfig::desk(p, BiasMode::Synergistic).unwrap();
        cfg.speed_cm_per_cycle = 0.0;
        assert!(matches!(cfg.validated(), Err(SimError::BadConfig(_))));
        let mut cfg = SimConfig::desk(p, BiasMode::Synergistic).unwrap();
        cfg.quorum = Some(1.5);
        assert!(matches!(cfg.validated(), Err(SimError::BadConfig(_))));
    }
}
