//! Exact stochastic simulation of the finite-population reaction network.
//!
//! The population is a vector of agent counts over the five compartments
//! `A_D, B_D, A_E, B_E, U` (the uncommitted compartment stays empty under
//! direct switch). Transitions fire as a continuous-time Markov chain whose
//! rates mirror the mean-field equations exactly: averaging the network's
//! propensities recovers the robot-level right-hand sides, so the stochastic
//! and deterministic levels are two views of one model.
//!
//! [`network`] builds the mechanism-specific reaction list, [`gillespie`]
//! samples trajectories with the direct method, [`spd`] aggregates
//! occupancy-weighted stationary distributions, [`sweep`] tabulates decision
//! speeds, and [`ctmc`] solves tiny populations exactly by enumerating the
//! chain.

pub mod ctmc;
pub mod gillespie;
pub mod network;
pub mod spd;
pub mod sweep;

pub use ctmc::stationary_distribution_exact;
pub use gillespie::{gillespie_step, run_batch, run_ssa, InitialCondition, RunOptions, SsaRun};
pub use network::{build_network, mean_field_rhs, PropensityKind, Reaction};
pub use spd::{merged_occupancy, occupancy_median_abs, stationary_distribution, Spd};
pub use sweep::{decision_speed_sweep, SpeedCell};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Compartment labels; indices into a [`DiscreteState`]'s count vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Compartment {
    /// Disseminating, committed to A.
    AD = 0,
    /// Disseminating, committed to B.
    BD = 1,
    /// Exploring, committed to A.
    AE = 2,
    /// Exploring, committed to B.
    BE = 3,
    /// Uncommitted.
    U = 4,
}

impl Compartment {
    pub const ALL: [Compartment; 5] = [
        Compartment::AD,
        Compartment::BD,
        Compartment::AE,
        Compartment::BE,
        Compartment::U,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Column name used in CSV output.
    pub fn label(self) -> &'static str {
        ["count_a_d", "count_b_d", "count_a_e", "count_b_e", "count_u"][self.index()]
    }
}

/// Agent counts per compartment; the total is conserved by every reaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscreteState {
    pub counts: [u64; 5],
}

impl DiscreteState {
    pub fn new(counts: [u64; 5]) -> Self {
        DiscreteState { counts }
    }

    /// Total population.
    pub fn n(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn get(&self, c: Compartment) -> u64 {
        self.counts[c.index()]
    }

    /// Agents committed to A, either phase.
    pub fn a_tot(&self) -> u64 {
        self.counts[0] + self.counts[2]
    }

    /// Agents committed to B, either phase.
    pub fn b_tot(&self) -> u64 {
        self.counts[1] + self.counts[3]
    }

    /// Signed committed-count difference `A_tot - B_tot`.
    pub fn count_difference(&self) -> i64 {
        self.a_tot() as i64 - self.b_tot() as i64
    }

    /// Signed majority observable `(A_tot - B_tot) / N`, in [-1, 1].
    pub fn observable(&self) -> f64 {
        self.count_difference() as f64 / self.n() as f64
    }

    /// Counts as floating-point values, for propensity evaluation.
    pub fn as_f64(&self) -> [f64; 5] {
        let c = &self.counts;
        [c[0] as f64, c[1] as f64, c[2] as f64, c[3] as f64, c[4] as f64]
    }

    /// Applies a reaction's stoichiometry. Panics in debug builds if a count
    /// would go negative (propensities guarantee it cannot).
    pub fn apply(&mut self, delta: &[i64; 5]) {
        for i in 0..5 {
            let next = self.counts[i] as i64 + delta[i];
            debug_assert!(next >= 0, "compartment {i} went negative");
            self.counts[i] = next as u64;
        }
    }
}

/// Failure modes of the stochastic layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SsaError {
    /// Every propensity is zero: the state is absorbing and no further event
    /// can fire.
    #[error("no reaction can fire at t = {time}: the state is absorbing")]
    Extinct { time: f64 },
    /// A distribution was requested over an empty run collection.
    #[error("no runs supplied")]
    EmptyRuns,
    /// The initial condition does not match the population size or uses the
    /// uncommitted compartment under direct switch.
    #[error("invalid initial condition: {0}")]
    BadInitial(String),
    /// The embedded chain is not irreducible, so no unique stationary
    /// distribution exists.
    #[error("chain is not irreducible; stationary distribution is not unique")]
    NotIrreducible,
}
