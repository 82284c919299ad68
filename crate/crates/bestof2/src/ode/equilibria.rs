//! Equilibrium location and linear stability analysis.
//!
//! A deterministic multistart damped-Newton search covers the reduced
//! simplex with a 5-per-axis seed grid plus analytic one-option and
//! symmetric candidates. Converged roots are filtered to physical states,
//! deduplicated, and classified by the eigenvalues of a finite-difference
//! Jacobian.

use super::{OdeLevel, OdeSystem, VectorField, MAX_DIM};
use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Residual norm below which a Newton iterate counts as a root.
const ROOT_TOL: f64 = 1e-12;
/// Residual norm a reported equilibrium must satisfy.
const ACCEPT_TOL: f64 = 1e-10;
/// L-infinity distance under which two roots are the same equilibrium.
const DEDUP_TOL: f64 = 1e-6;
/// Tolerated rounding excursion outside [0, 1] for physical states.
const PHYS_TOL: f64 = 1e-8;
/// Real-part threshold separating stable/marginal/unstable eigenvalues.
const STAB_TOL: f64 = 1e-8;
/// Central-difference step for the numerical Jacobian.
const JAC_H: f64 = 1e-7;

/// Linear stability class of an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    /// All Jacobian eigenvalues have real part below `-1e-8`.
    Stable,
    /// Some eigenvalue has real part above `1e-8`.
    Unstable,
    /// No growing eigenvalue, but at least one real part within `±1e-8`.
    Marginal,
}

impl Stability {
    /// Short machine-friendly name used in CSV columns.
    pub fn label(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        }
    }
}

/// One located equilibrium of a reduced system.
#[derive(Debug, Clone)]
pub struct EquilibriumReport {
    /// Reduced coordinates of the root (see [`OdeSystem::component_names`]).
    pub state: Vec<f64>,
    /// Eigenvalues of the finite-difference Jacobian at the root.
    pub eigenvalues: Vec<Complex<f64>>,
    /// Stability classification derived from the eigenvalue real parts.
    pub stability: Stability,
    /// Max-norm of the right-hand side at the reported (clamped) state.
    pub residual: f64,
    /// Signed majority observable `a_tot - b_tot` at the root.
    pub observable: f64,
}

/// Central-difference Jacobian of `field` at `x` with step `h`.
pub fn jacobian_central<F: VectorField>(field: &F, x: &[f64], h: f64) -> DMatrix<f64> {
    let dim = field.dim();
    let mut jac = DMatrix::zeros(dim, dim);
    let mut xp = [0.0; MAX_DIM];
    let mut fp = [0.0; MAX_DIM];
    let mut fm = [0.0; MAX_DIM];
    for j in 0..dim {
        xp[..dim].copy_from_slice(x);
        xp[j] = x[j] + h;
        field.eval(&xp[..dim], &mut fp[..dim]);
        xp[j] = x[j] - h;
        field.eval(&xp[..dim], &mut fm[..dim]);
        for i in 0..dim {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

fn residual_norm<F: VectorField>(field: &F, x: &[f64]) -> f64 {
    let mut f = [0.0; MAX_DIM];
    field.eval(x, &mut f[..field.dim()]);
    f[..field.dim()].iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Damped Newton iteration from one seed; returns a root with residual
/// below `ROOT_TOL`, or the best iterate if it already satisfies the
/// acceptance tolerance, or `None`.
fn newton<F: VectorField>(field: &F, seed: &[f64]) -> Option<Vec<f64>> {
    let dim = field.dim();
    let mut x = seed.to_vec();
    let mut fx = [0.0; MAX_DIM];
    field.eval(&x, &mut fx[..dim]);
    let mut norm = fx[..dim].iter().fold(0.0f64, |m, v| m.max(v.abs()));

    for _ in 0..120 {
        if norm < ROOT_TOL {
            return Some(x);
        }
        let jac = jacobian_central(field, &x, JAC_H);
        let rhs = DVector::from_iterator(dim, fx[..dim].iter().map(|v| -v));
        let lu = jac.lu();
        let step = match lu.solve(&rhs) {
            Some(s) => s,
            None => return (norm < ACCEPT_TOL).then(|| x.clone()),
        };
        if !step.iter().all(|v| v.is_finite()) {
            return (norm < ACCEPT_TOL).then(|| x.clone());
        }

        // Backtracking damping: accept the first step length that reduces
        // the residual norm.
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let mut trial = x.clone();
            for i in 0..dim {
                trial[i] += lambda * step[i];
            }
            let mut ft = [0.0; MAX_DIM];
            field.eval(&trial, &mut ft[..dim]);
            let tnorm = ft[..dim].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if tnorm.is_finite() && tnorm < norm {
                x = trial;
                fx = ft;
                norm = tnorm;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            return (norm < ACCEPT_TOL).then(|| x.clone());
        }
    }
    (norm < ROOT_TOL || norm < ACCEPT_TOL).then_some(x)
}

/// Deterministic seed set: the 5-per-axis simplex grid plus analytic
/// one-option corners and a symmetric phase-weighted candidate.
fn seeds(system: &OdeSystem) -> Vec<Vec<f64>> {
    let dim = system.dim();
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut out = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        let pt: Vec<f64> = idx.iter().map(|&i| grid[i]).collect();
        if pt.iter().sum::<f64>() <= 1.0 + 1e-12 {
            out.push(pt);
        }
        // Odometer increment over the dim-dimensional grid.
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < grid.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == dim {
                break;
            }
        }
        if k == dim {
            break;
        }
    }

    let p = system.params();
    match system.level() {
        OdeLevel::Basic => {
            if dim == 1 {
                out.push(vec![0.5]);
            } else {
                out.push(vec![1.0, 0.0]);
                out.push(vec![0.0, 1.0]);
                out.push(vec![1.0 / 3.0, 1.0 / 3.0]);
            }
        }
        OdeLevel::Robot => {
            // One-option balance: all committed to i, with
            // i_d* = q_i t_d / (t_e + q_i t_d).
            let a_d = p.q_a * p.t_d / (p.t_e + p.q_a * p.t_d);
            let b_d = p.q_b * p.t_d / (p.t_e + p.q_b * p.t_d);
            let q_m = 0.5 * (p.q_a + p.q_b);
            let m_d = q_m * p.t_d / (p.t_e + q_m * p.t_d);
            if dim == 3 {
                out.push(vec![a_d, 0.0, 1.0 - a_d]);
                out.push(vec![0.0, b_d, 0.0]);
                out.push(vec![0.5 * m_d, 0.5 * m_d, 0.5 * (1.0 - m_d)]);
            } else {
                out.push(vec![a_d, 0.0, 1.0 - a_d, 0.0]);
                out.push(vec![0.0, b_d, 0.0, 1.0 - b_d]);
                out.push(vec![
                    0.5 * m_d,
                    0.5 * m_d,
                    0.5 * (1.0 - m_d),
                    0.5 * (1.0 - m_d),
                ]);
            }
        }
    }
    out
}

/// Clamps rounding-level negatives to exact zero; returns `None` if any
/// component or the conserved remainder is genuinely outside [0, 1].
fn physical_state(x: &[f64]) -> Option<Vec<f64>> {
    let mut out = x.to_vec();
    for v in &mut out {
        if *v < -PHYS_TOL || *v > 1.0 + PHYS_TOL {
            return None;
        }
        if *v < 0.0 {
            *v = 0.0;
        }
        if *v > 1.0 {
            *v = 1.0;
        }
    }
    let rem = 1.0 - out.iter().sum::<f64>();
    if rem < -PHYS_TOL {
        return None;
    }
    Some(out)
}

/// Locates every physical equilibrium of the system.
///
/// Returned reports are sorted by descending observable (ties by descending
/// first coordinate), each with residual below `1e-10` at the reported state.
pub fn find_equilibria(system: &OdeSystem) -> Vec<EquilibriumReport> {
    let mut roots: Vec<Vec<f64>> = Vec::new();
    for seed in seeds(system) {
        let Some(root) = newton(system, &seed) else {
            continue;
        };
        let Some(root) = physical_state(&root) else {
            continue;
        };
        // Clamping may cost a little residual; re-check at the reported state.
        if residual_norm(system, &root) > ACCEPT_TOL {
            continue;
        }
        if roots
            .iter()
            .any(|r| r.iter().zip(&root).all(|(a, b)| (a - b).abs() < DEDUP_TOL))
        {
            continue;
        }
        roots.push(root);
    }

    let mut reports: Vec<EquilibriumReport> = roots
        .into_iter()
        .map(|state| {
            let jac = jacobian_central(system, &state, JAC_H);
            let eigenvalues: Vec<Complex<f64>> =
                jac.complex_eigenvalues().iter().copied().collect();
            let any_growing = eigenvalues.iter().any(|e| e.re > STAB_TOL);
            let any_marginal = eigenvalues.iter().any(|e| e.re.abs() <= STAB_TOL);
            let stability = if any_growing {
                Stability::Unstable
            } else if any_marginal {
                Stability::Marginal
            } else {
                Stability::Stable
            };
            let residual = residual_norm(system, &state);
            let observable = system.observable(&state);
            EquilibriumReport {
                state,
                eigenvalues,
                stability,
                residual,
                observable,
            }
        })
        .collect();

    reports.sort_by(|a, b| {
        b.observable
            .partial_cmp(&a.observable)
            .unwrap()
            .then(b.state[0].partial_cmp(&a.state[0]).unwrap())
    });
    reports
}
