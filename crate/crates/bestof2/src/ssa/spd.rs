//! Occupancy-weighted stationary distributions over the majority observable.
//!
//! Rather than histogramming sampled snapshots, runs accumulate the exact
//! time spent at each signed committed-count difference. Merging those
//! occupancy vectors across a batch and normalising by total simulated time
//! yields the stationary probability distribution without discretisation
//! error; binning only happens at the very end, for presentation.

use super::gillespie::SsaRun;
use super::SsaError;
use serde::{Deserialize, Serialize};

/// A binned stationary probability distribution of the majority observable
/// `(A_tot - B_tot) / N` over `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spd {
    /// Centre of each bin.
    pub bin_centers: Vec<f64>,
    /// Probability mass per bin; sums to one.
    pub mass: Vec<f64>,
    pub bin_width: f64,
    /// Population size the observable was scaled by.
    pub n: u64,
}

/// Sums the per-difference occupancy vectors of a batch. All runs must share
/// one population size.
pub fn merged_occupancy(runs: &[SsaRun]) -> Result<Vec<f64>, SsaError> {
    let first = runs.first().ok_or(SsaError::EmptyRuns)?;
    let len = first.occupancy.len();
    let mut merged = vec![0.0; len];
    for run in runs {
        assert_eq!(
            run.occupancy.len(),
            len,
            "runs mix population sizes; occupancy vectors differ in length"
        );
        for (m, o) in merged.iter_mut().zip(&run.occupancy) {
            *m += o;
        }
    }
    Ok(merged)
}

/// Median of `|A_tot - B_tot| / N` under the occupancy measure: the value
/// below which half of the total simulated time was spent. Low values mean
/// the swarm lingered near an even split; values near one mean consensus.
pub fn occupancy_median_abs(occupancy: &[f64], n: u64) -> f64 {
    let total: f64 = occupancy.iter().sum();
    assert!(total > 0.0, "occupancy carries no time");
    // Fold the signed axis: time at difference d and -d both count as |d|.
    let mut folded = vec![0.0; n as usize + 1];
    for (idx, &w) in occupancy.iter().enumerate() {
        let d = idx as i64 - n as i64;
        folded[d.unsigned_abs() as usize] += w;
    }
    let mut acc = 0.0;
    for (d, &w) in folded.iter().enumerate() {
        acc += w;
        if acc >= total / 2.0 {
            return d as f64 / n as f64;
        }
    }
    1.0
}

/// Builds the binned distribution from a batch. `bin_width` defaults to
/// `2 / N`, which resolves every reachable difference under direct switch
/// (where the difference moves in steps of two) and pairs adjacent
/// differences under cross-inhibition.
pub fn stationary_distribution(
    runs: &[SsaRun],
    bin_width: Option<f64>,
) -> Result<Spd, SsaError> {
    let merged = merged_occupancy(runs)?;
    let n = (merged.len() as u64 - 1) / 2;
    let width = bin_width.unwrap_or(2.0 / n as f64);
    assert!(width > 0.0 && width <= 2.0, "bin width {width} unusable");
    let n_bins = (2.0 / width).ceil() as usize;
    let mut mass = vec![0.0; n_bins];
    for (idx, &w) in merged.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let x = (idx as i64 - n as i64) as f64 / n as f64;
        let k = (((x + 1.0) / width) as usize).min(n_bins - 1);
        mass[k] += w;
    }
    let total: f64 = mass.iter().sum();
    if total <= 0.0 {
        return Err(SsaError::EmptyRuns);
    }
    for m in &mut mass {
        *m /= total;
    }
    let bin_centers = (0..n_bins)
        .map(|k| -1.0 + (k as f64 + 0.5) * width)
        .collect();
    Ok(Spd {
        bin_centers,
        mass,
        bin_width: width,
        n,
    })
}

impl Spd {
    /// Probability mass strictly below the given observable value.
    pub fn mass_below(&self, x: f64) -> f64 {
        self.bin_centers
            .iter()
            .zip(&self.mass)
            .filter(|(c, _)| **c < x)
            .map(|(_, m)| m)
            .sum()
    }

    /// Bin centres of local maxima carrying at least `min_rel_mass` of the
    /// heaviest bin's mass. A bin is a local maximum when no bin within two
    /// neighbours on either side outweighs it; boundary bins compare against
    /// the neighbours they have.
    pub fn modes(&self, min_rel_mass: f64) -> Vec<f64> {
        let peak = self.mass.iter().cloned().fold(0.0, f64::max);
        if peak <= 0.0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let len = self.mass.len();
        for i in 0..len {
            let m = self.mass[i];
            if m < min_rel_mass * peak {
                continue;
            }
            let lo = i.saturating_sub(2);
            let hi = (i + 2).min(len - 1);
            let is_peak = (lo..=hi).all(|j| self.mass[j] <= m);
            // Among equal-mass plateau bins keep only the first.
            let first_of_plateau = (lo..i).all(|j| self.mass[j] < m);
            if is_peak && first_of_plateau {
                out.push(self.bin_centers[i]);
            }
        }
        out
    }

    /// Mean of the observable under the distribution.
    pub fn mean(&self) -> f64 {
        self.bin_centers
            .iter()
            .zip(&self.mass)
            .map(|(c, m)| c * m)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{Mechanism, ModelParams};
    use crate::ssa::gillespie::{run_batch, InitialCondition, RunOptions};
    use approx::assert_abs_diff_eq;

    fn toy_runs() -> Vec<SsaRun> {
        let p = ModelParams {
            q_a: 1.0,
            q_b: 1.0,
            eta: 0.05,
            eta_a: 0.5,
            mechanism: Mechanism::DirectSwitch,
            n: 20,
            ..ModelParams::default()
        }
        .validate()
        .unwrap();
        let opts = RunOptions {
            horizon: 5_000.0,
            ..RunOptions::default()
        };
        run_batch(&p, &InitialCondition::UniformRandom, &opts, 6, 4).unwrap()
    }

    #[test]
    fn mass_normalises_to_one() {
        let spd = stationary_distribution(&toy_runs(), None).unwrap();
        let total: f64 = spd.mass.iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        assert_eq!(spd.mass.len(), 20);
        assert_eq!(spd.n, 20);
        assert_abs_diff_eq!(spd.bin_centers[0], -0.95, epsilon = 1e-12);
        assert_abs_diff_eq!(*spd.bin_centers.last().unwrap(), 0.95, epsilon = 1e-12);
    }

    #[test]
    fn empty_batch_is_an_error() {
        assert_eq!(
            stationary_distribution(&[], None).unwrap_err(),
            SsaError::EmptyRuns
        );
    }

    #[test]
    fn median_of_handcrafted_occupancy() {
        // n = 2: differences -2..2. All time at |d| = 2.
        let occ = [3.0, 0.0, 0.0, 0.0, 5.0];
        assert_abs_diff_eq!(occupancy_median_abs(&occ, 2), 1.0);
        // Half the time at 0, half at 2: median falls on the first value
        // whose cumulative mass reaches one half, i.e. 0.
        let occ = [0.0, 0.0, 4.0, 0.0, 4.0];
        assert_abs_diff_eq!(occupancy_median_abs(&occ, 2), 0.0);
        // Dominant central mass keeps the median at zero.
        let occ = [1.0, 0.0, 6.0, 0.0, 1.0];
        assert_abs_diff_eq!(occupancy_median_abs(&occ, 2), 0.0);
    }

    #[test]
    fn mass_below_and_mean_on_a_handmade_distribution() {
        let spd = Spd {
            bin_centers: vec![-0.75, -0.25, 0.25, 0.75],
            mass: vec![0.4, 0.1, 0.1, 0.4],
            bin_width: 0.5,
            n: 4,
        };
        assert_abs_diff_eq!(spd.mass_below(0.0), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(spd.mass_below(-0.5), 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(spd.mean(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn modes_finds_the_two_peaks() {
        let spd = Spd {
            bin_centers: vec![-0.9, -0.7, -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7, 0.9],
            mass: vec![0.3, 0.1, 0.02, 0.01, 0.01, 0.01, 0.01, 0.02, 0.12, 0.4],
            bin_width: 0.2,
            n: 10,
        };
        let modes = spd.modes(0.25);
        assert_eq!(modes, vec![-0.9, 0.9]);
    }

    #[test]
    fn merged_occupancy_preserves_total_time() {
        let runs = toy_runs();
        let merged = merged_occupancy(&runs).unwrap();
        let total: f64 = merged.iter().sum();
        assert_abs_diff_eq!(total, 6.0 * 5_000.0, epsilon = 1e-5);
    }

    #[test]
    fn direct_switch_occupancy_respects_count_parity() {
        // With N even and no uncommitted compartment, A_tot - B_tot is even.
        let runs = toy_runs();
        let merged = merged_occupancy(&runs).unwrap();
        for (idx, &w) in merged.iter().enumerate() {
            let d = idx as i64 - 20;
            if d.rem_euclid(2) == 1 {
                assert_eq!(w, 0.0, "odd difference {d} has occupancy");
            }
        }
    }
}
