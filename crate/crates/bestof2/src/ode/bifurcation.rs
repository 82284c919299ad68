//! Parameter sweeps of the equilibrium structure.
//!
//! A scan re-solves the equilibria on a grid of one swept parameter and
//! reports, per grid value, every physical equilibrium with its stability.
//! The characteristic event for these models is the collapse from
//! bistability (both option branches attracting) to a single branch as the
//! asocial rate or bias grows; the scan localises it as the midpoint of the
//! bracketing grid cells.

use super::equilibria::{find_equilibria, EquilibriumReport, Stability};
use super::{OdeLevel, OdeSystem};
use crate::params::{ModelParams, ParamError};
use serde::{Deserialize, Serialize};

/// Which parameter a bifurcation scan sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    /// Asocial update rate `eta`.
    Eta,
    /// Asocial bias `eta_a`.
    EtaA,
}

impl SweepParam {
    /// Column/key name for configs and CSV output.
    pub fn label(self) -> &'static str {
        match self {
            SweepParam::Eta => "eta",
            SweepParam::EtaA => "eta_a",
        }
    }

    /// Copy of `base` with this parameter set to `value`.
    pub fn apply(self, base: &ModelParams, value: f64) -> ModelParams {
        match self {
            SweepParam::Eta => ModelParams { eta: value, ..*base },
            SweepParam::EtaA => ModelParams { eta_a: value, ..*base },
        }
    }
}

/// Result of sweeping one parameter over a grid.
#[derive(Debug, Clone)]
pub struct BifurcationScan {
    /// Swept parameter.
    pub sweep: SweepParam,
    /// Grid values, in scan order.
    pub grid: Vec<f64>,
    /// Equilibria per grid value (sorted by descending observable).
    pub points: Vec<Vec<EquilibriumReport>>,
    /// Sweep values (bracket midpoints) where the stable-equilibrium count
    /// drops from 2 to 1, in scan order.
    pub transitions: Vec<f64>,
}

impl BifurcationScan {
    /// Stable-equilibrium count at each grid value.
    pub fn stable_counts(&self) -> Vec<usize> {
        self.points
            .iter()
            .map(|eqs| {
                eqs.iter()
                    .filter(|e| e.stability == Stability::Stable)
                    .count()
            })
            .collect()
    }

    /// First bistable-to-single transition, if the scan crossed one.
    pub fn first_transition(&self) -> Option<f64> {
        self.transitions.first().copied()
    }
}

/// Sweeps `sweep` over `grid` (each value must be admissible for the
/// parameter) and locates every equilibrium at every grid value.
pub fn bifurcation_scan(
    base: &ModelParams,
    level: OdeLevel,
    sweep: SweepParam,
    grid: &[f64],
) -> Result<BifurcationScan, ParamError> {
    let mut points = Vec::with_capacity(grid.len());
    for &value in grid {
        let sys = OdeSystem::new(sweep.apply(base, value), level)?;
        points.push(find_equilibria(&sys));
    }

    let counts: Vec<usize> = points
        .iter()
        .map(|eqs| {
            eqs.iter()
                .filter(|e| e.stability == Stability::Stable)
                .count()
        })
        .collect();
    let mut transitions = Vec::new();
    for i in 1..grid.len() {
        if counts[i - 1] >= 2 && counts[i] == 1 {
            transitions.push(0.5 * (grid[i - 1] + grid[i]));
        }
    }

    Ok(BifurcationScan {
        sweep,
        grid: grid.to_vec(),
        points,
        transitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Mechanism;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn basic_ds_scan_has_exactly_one_branch_everywhere() {
        let base = ModelParams {
            q_b: 0.92,
            eta_a: 0.5,
            ..ModelParams::default()
        };
        let scan = bifurcation_scan(
            &base,
            OdeLevel::Basic,
            SweepParam::Eta,
            &grid(0.01, 0.5, 15),
        )
        .unwrap();
        assert!(scan.points.iter().all(|eqs| eqs.len() == 1));
        assert!(scan.transitions.is_empty());
    }

    #[test]
    fn robot_ci_t1_loses_the_minority_branch_as_asocial_rate_grows() {
        // Quality ratio 0.82 with quality-proportional bias: bistability
        // collapses between eta = 0.300 and 0.325 (cross-checked against an
        // independent continuation of the same equations).
        let base = ModelParams {
            q_b: 0.82,
            eta_a: 1.0 / 1.82,
            mechanism: Mechanism::CrossInhibitionT1,
            ..ModelParams::default()
        };
        let scan = bifurcation_scan(
            &base,
            OdeLevel::Robot,
            SweepParam::Eta,
            &grid(0.0, 0.45, 19), // step 0.025
        )
        .unwrap();
        let t = scan.first_transition().expect("transition in range");
        assert!(
            (0.30..=0.33).contains(&t),
            "type-1 collapse at eta* = {t}, expected within [0.30, 0.33]"
        );
    }

    #[test]
    fn robot_ci_t2_collapses_much_earlier_than_t1() {
        let base = ModelParams {
            q_b: 0.82,
            eta_a: 1.0 / 1.82,
            mechanism: Mechanism::CrossInhibitionT2,
            ..ModelParams::default()
        };
        let scan = bifurcation_scan(
            &base,
            OdeLevel::Robot,
            SweepParam::Eta,
            &grid(0.0, 0.45, 19),
        )
        .unwrap();
        let t = scan.first_transition().expect("transition in range");
        assert!(
            (0.125..=0.155).contains(&t),
            "type-2 collapse at eta* = {t}, expected within [0.125, 0.155]"
        );
    }

    #[test]
    fn bias_sweep_restores_symmetry_in_the_middle() {
        // Sweeping eta_a across 1/2 at equal qualities flips the leading
        // branch; the observable of the unique direct-switch equilibrium
        // must change sign.
        let base = ModelParams {
            eta: 0.2,
            ..ModelParams::default()
        };
        let scan = bifurcation_scan(
            &base,
            OdeLevel::Basic,
            SweepParam::EtaA,
            &grid(0.2, 0.8, 7),
        )
        .unwrap();
        let first = scan.points.first().unwrap()[0].observable;
        let last = scan.points.last().unwrap()[0].observable;
        assert!(first < 0.0 && last > 0.0);
    }
}
