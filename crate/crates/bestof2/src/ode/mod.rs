//! Mean-field rate equations: right-hand sides, integration, equilibria,
//! bifurcation scans, and the closed-form critical asocial bias.
//!
//! Two levels of description share one interface. The *basic* level tracks
//! committed fractions `(a, b, u)`; the *robot* level additionally resolves
//! the exploration/dissemination phase structure `(a_d, b_d, a_e, b_e, u)`.
//! Both are integrated and analysed in reduced coordinates with the last
//! component eliminated by conservation (the fractions always sum to 1):
//!
//! | level, mechanism        | reduced coordinates        | dim |
//! |-------------------------|----------------------------|-----|
//! | basic, direct switch    | `[a]`                      |  1  |
//! | basic, cross-inhibition | `[a, b]`                   |  2  |
//! | robot, direct switch    | `[a_d, b_d, a_e]`          |  3  |
//! | robot, cross-inhibition | `[a_d, b_d, a_e, b_e]`     |  4  |

mod bifurcation;
mod critical;
mod equilibria;
mod integrate;
pub mod rhs;

pub use bifurcation::{bifurcation_scan, BifurcationScan, SweepParam};
pub use critical::{critical_bias, deadlock_bias_root, CriticalBias, DeadlockObservable};
pub use equilibria::{find_equilibria, jacobian_central, EquilibriumReport, Stability};
pub use integrate::{integrate, IntegrateOptions, Trajectory};

use crate::params::{MacroState, Mechanism, ModelParams, ParamError, RobotMacroState};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Degrees of freedom are tiny (at most 4); fixed-capacity buffers keep the
/// integrator and solvers allocation-free in their inner loops.
pub const MAX_DIM: usize = 5;

/// Level of description.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OdeLevel {
    /// Committed/uncommitted fractions only.
    Basic,
    /// Exploration and dissemination phases resolved per opinion.
    Robot,
}

impl OdeLevel {
    /// Short machine-friendly name used in CSV columns.
    pub fn label(self) -> &'static str {
        match self {
            OdeLevel::Basic => "basic",
            OdeLevel::Robot => "robot",
        }
    }
}

/// Failure modes of the mean-field layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    /// A fixed integration step drove a component (or the conserved
    /// remainder) outside `[-1e-6, 1 + 1e-6]`, or produced a non-finite
    /// value; retry with a smaller step.
    #[error("integration step too large at t = {time}: component {component} = {value}")]
    StepTooLarge {
        time: f64,
        component: usize,
        value: f64,
    },
    /// The critical-bias formula is undefined for a purely social swarm.
    #[error("critical bias is undefined at eta = 0")]
    EtaZero,
}

/// A full macroscopic state at either level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FullState {
    Basic(MacroState),
    Robot(RobotMacroState),
}

impl FullState {
    /// Signed majority observable, `a_tot - b_tot` in [-1, 1].
    pub fn observable(&self) -> f64 {
        match self {
            FullState::Basic(s) => s.observable(),
            FullState::Robot(s) => s.observable(),
        }
    }
}

/// Anything the integrator and equilibrium solver can treat as an autonomous
/// vector field on reduced coordinates.
pub trait VectorField {
    /// Number of reduced coordinates.
    fn dim(&self) -> usize;

    /// Writes the time derivative of `x` into `dx` (both of length `dim`).
    fn eval(&self, x: &[f64], dx: &mut [f64]);

    /// Value of the conservation-eliminated component, if the field tracks a
    /// reduced simplex; used for bounds checking during integration.
    fn remainder(&self, _x: &[f64]) -> Option<f64> {
        None
    }
}

/// A vector field given as a closure; handy for model variants (e.g.
/// state-dependent parameter mappings) that reuse the generic machinery.
pub struct FnField<F: Fn(&[f64], &mut [f64])> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnField { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> VectorField for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64], dx: &mut [f64]) {
        (self.f)(x, dx)
    }
}

/// One concrete mean-field system: a parameter set at a level of description.
#[derive(Debug, Clone)]
pub struct OdeSystem {
    params: ModelParams,
    level: OdeLevel,
}

impl OdeSystem {
    /// Validates the parameters and fixes the level of description.
    pub fn new(params: ModelParams, level: OdeLevel) -> Result<Self, ParamError> {
        Ok(OdeSystem {
            params: params.validate()?,
            level,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn level(&self) -> OdeLevel {
        self.level
    }

    /// Number of reduced coordinates (see the module table).
    pub fn dim(&self) -> usize {
        match (self.level, self.params.mechanism.is_cross_inhibition()) {
            (OdeLevel::Basic, false) => 1,
            (OdeLevel::Basic, true) => 2,
            (OdeLevel::Robot, false) => 3,
            (OdeLevel::Robot, true) => 4,
        }
    }

    /// Human-readable component names of the reduced coordinates.
    pub fn component_names(&self) -> &'static [&'static str] {
        match (self.level, self.params.mechanism.is_cross_inhibition()) {
            (OdeLevel::Basic, false) => &["a"],
            (OdeLevel::Basic, true) => &["a", "b"],
            (OdeLevel::Robot, false) => &["a_d", "b_d", "a_e"],
            (OdeLevel::Robot, true) => &["a_d", "b_d", "a_e", "b_e"],
        }
    }

    /// Projects a full state onto the reduced coordinates.
    ///
    /// Panics if the state's level does not match the system's.
    pub fn reduce(&self, full: &FullState) -> Vec<f64> {
        match (self.level, full) {
            (OdeLevel::Basic, FullState::Basic(s)) => {
                if self.params.mechanism.is_cross_inhibition() {
                    vec![s.a, s.b]
                } else {
                    vec![s.a]
                }
            }
            (OdeLevel::Robot, FullState::Robot(s)) => {
                if self.params.mechanism.is_cross_inhibition() {
                    vec![s.a_d, s.b_d, s.a_e, s.b_e]
                } else {
                    vec![s.a_d, s.b_d, s.a_e]
                }
            }
            _ => panic!("state level does not match system level"),
        }
    }

    /// Reconstructs the full state from reduced coordinates, restoring the
    /// eliminated component by conservation.
    pub fn unreduce(&self, x: &[f64]) -> FullState {
        assert_eq!(x.len(), self.dim());
        match (self.level, self.params.mechanism.is_cross_inhibition()) {
            (OdeLevel::Basic, false) => FullState::Basic(MacroState {
                a: x[0],
                b: 1.0 - x[0],
                u: 0.0,
            }),
            (OdeLevel::Basic, true) => FullState::Basic(MacroState {
                a: x[0],
                b: x[1],
                u: 1.0 - x[0] - x[1],
            }),
            (OdeLevel::Robot, false) => FullState::Robot(RobotMacroState {
                a_d: x[0],
                b_d: x[1],
                a_e: x[2],
                b_e: 1.0 - x[0] - x[1] - x[2],
                u: 0.0,
            }),
            (OdeLevel::Robot, true) => FullState::Robot(RobotMacroState {
                a_d: x[0],
                b_d: x[1],
                a_e: x[2],
                b_e: x[3],
                u: 1.0 - x[0] - x[1] - x[2] - x[3],
            }),
        }
    }

    /// Signed majority observable of a reduced state.
    pub fn observable(&self, x: &[f64]) -> f64 {
        self.unreduce(x).observable()
    }
}

impl VectorField for OdeSystem {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn eval(&self, x: &[f64], dx: &mut [f64]) {
        let p = &self.params;
        match (self.level, p.mechanism) {
            (OdeLevel::Basic, Mechanism::DirectSwitch) => {
                dx[0] = rhs::rhs_basic_ds(p, x[0]);
            }
            (OdeLevel::Basic, Mechanism::CrossInhibitionT1) => {
                let (da, db) = rhs::rhs_basic_ci(p, x[0], x[1]);
                dx[0] = da;
                dx[1] = db;
            }
            (OdeLevel::Basic, Mechanism::CrossInhibitionT2) => {
                let (da, db) = rhs::rhs_basic_ci_t2(p, x[0], x[1]);
                dx[0] = da;
                dx[1] = db;
            }
            (OdeLevel::Robot, Mechanism::DirectSwitch) => {
                let d = rhs::rhs_robot_ds(p, [x[0], x[1], x[2]]);
                dx[..3].copy_from_slice(&d);
            }
            (OdeLevel::Robot, Mechanism::CrossInhibitionT1) => {
                let d = rhs::rhs_robot_ci_t1(p, [x[0], x[1], x[2], x[3]]);
                dx[..4].copy_from_slice(&d);
            }
            (OdeLevel::Robot, Mechanism::CrossInhibitionT2) => {
                let d = rhs::rhs_robot_ci_t2(p, [x[0], x[1], x[2], x[3]]);
                dx[..4].copy_from_slice(&d);
            }
        }
    }

    fn remainder(&self, x: &[f64]) -> Option<f64> {
        Some(1.0 - x.iter().sum::<f64>())
    }
}
