//! Fixed-step classical Runge–Kutta integration on reduced coordinates.
//!
//! Rates are O(1/t_d) per control cycle, so the default step of one cycle
//! resolves the dynamics comfortably; halving the step should not change a
//! trajectory beyond O(dt^4) accumulation. After every step, components that
//! round slightly negative are clamped to zero, while an excursion beyond
//! `[-1e-6, 1 + 1e-6]` (or a non-finite value) aborts with
//! [`OdeError::StepTooLarge`] — the step, not the model, is at fault.

use super::{OdeError, VectorField, MAX_DIM};

/// Lower bound of the tolerated overshoot band around [0, 1].
const BOUND_TOL: f64 = 1e-6;

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    /// Step size in control cycles.
    pub dt: f64,
    /// Total integration time in control cycles.
    pub horizon: f64,
    /// Record every k-th step (the initial and final states are always
    /// recorded).
    pub record_every: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            dt: 1.0,
            horizon: 50_000.0,
            record_every: 1,
        }
    }
}

/// A recorded trajectory in the field's own (reduced) coordinates.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    /// Final recorded state.
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory is never empty")
    }

    /// Largest pointwise absolute difference against another trajectory
    /// recorded on the same grid.
    pub fn max_abs_difference(&self, other: &Trajectory) -> f64 {
        assert_eq!(self.times.len(), other.times.len(), "trajectory grids differ");
        self.states
            .iter()
            .zip(&other.states)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// Integrates `field` from `x0` with the classical fourth-order Runge–Kutta
/// scheme and a fixed step.
pub fn integrate<F: VectorField>(
    field: &F,
    x0: &[f64],
    opts: &IntegrateOptions,
) -> Result<Trajectory, OdeError> {
    let dim = field.dim();
    assert_eq!(x0.len(), dim, "initial state dimension mismatch");
    assert!(opts.dt > 0.0 && opts.horizon >= 0.0 && opts.record_every > 0);

    let n_steps = (opts.horizon / opts.dt).round() as usize;
    let mut x = [0.0; MAX_DIM];
    x[..dim].copy_from_slice(x0);

    let mut times = Vec::with_capacity(n_steps / opts.record_every + 2);
    let mut states = Vec::with_capacity(n_steps / opts.record_every + 2);
    times.push(0.0);
    states.push(x0.to_vec());

    let (mut k1, mut k2, mut k3, mut k4) =
        ([0.0; MAX_DIM], [0.0; MAX_DIM], [0.0; MAX_DIM], [0.0; MAX_DIM]);
    let mut xs = [0.0; MAX_DIM];
    let h = opts.dt;

    for step in 1..=n_steps {
        field.eval(&x[..dim], &mut k1[..dim]);
        for i in 0..dim {
            xs[i] = x[i] + 0.5 * h * k1[i];
        }
        field.eval(&xs[..dim], &mut k2[..dim]);
        for i in 0..dim {
            xs[i] = x[i] + 0.5 * h * k2[i];
        }
        field.eval(&xs[..dim], &mut k3[..dim]);
        for i in 0..dim {
            xs[i] = x[i] + h * k3[i];
        }
        field.eval(&xs[..dim], &mut k4[..dim]);
        for i in 0..dim {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        let t = step as f64 * h;
        for i in 0..dim {
            if !x[i].is_finite() || x[i] < -BOUND_TOL || x[i] > 1.0 + BOUND_TOL {
                return Err(OdeError::StepTooLarge {
                    time: t,
                    component: i,
                    value: x[i],
                });
            }
            if x[i] < 0.0 {
                x[i] = 0.0;
            }
        }
        if let Some(rem) = field.remainder(&x[..dim]) {
            if !rem.is_finite() || rem < -BOUND_TOL || rem > 1.0 + BOUND_TOL {
                return Err(OdeError::StepTooLarge {
                    time: t,
                    component: dim,
                    value: rem,
                });
            }
        }

        if step % opts.record_every == 0 || step == n_steps {
            times.push(t);
            states.push(x[..dim].to_vec());
        }
    }

    Ok(Trajectory { times, states })
}
