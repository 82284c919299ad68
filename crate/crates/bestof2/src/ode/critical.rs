//! Critical asocial bias: the closed form and its numerical counterparts.
//!
//! For the robot-level direct-switch model with `q_a = 1`, the bias that
//! equalises the two disseminating subpopulations at equilibrium — the point
//! of maximum deadlock, where the social polling signal carries no net
//! preference — has the closed form
//!
//! ```text
//! eta_a* = (-1 + eta + q + eta q) / (2 eta + 2 eta q),   q = q_b / q_a.
//! ```
//!
//! Note what is equalised: the *disseminator pools* `a_d = b_d`. Equalising
//! total committed populations instead (`a_tot = b_tot`), or the committed
//! fractions of the basic-level model (`a = b`, which happens at
//! `(3 eta - 1 + q - eta q) / (4 eta)`), gives different — larger — roots.
//! [`deadlock_bias_root`] computes any of the three numerically so the
//! attribution can be checked rather than assumed.

use super::equilibria::{find_equilibria, Stability};
use super::{OdeError, OdeLevel, OdeSystem};
use crate::params::ModelParams;
use serde::{Deserialize, Serialize};

/// Closed-form critical bias, clamped to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalBias {
    /// The formula value clamped to [0, 1].
    pub eta_a: f64,
    /// The raw formula value before clamping.
    pub raw: f64,
    /// True when the raw value already lies in [0, 1]; false means no
    /// in-range deadlock bias exists (e.g. large quality gaps at small eta,
    /// where even a fully B-biased asocial channel cannot stall option A).
    pub in_range: bool,
}

/// Evaluates the closed-form critical bias at quality ratio `q = q_b / q_a`
/// and asocial rate `eta`.
///
/// Undefined at `eta = 0` (no asocial channel to bias): [`OdeError::EtaZero`].
pub fn critical_bias(q: f64, eta: f64) -> Result<CriticalBias, OdeError> {
    if eta == 0.0 {
        return Err(OdeError::EtaZero);
    }
    let raw = (-1.0 + eta + q + eta * q) / (2.0 * eta + 2.0 * eta * q);
    let in_range = (0.0..=1.0).contains(&raw);
    Ok(CriticalBias {
        eta_a: raw.clamp(0.0, 1.0),
        raw,
        in_range,
    })
}

/// Which gap a numerical deadlock search drives to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeadlockObservable {
    /// `a_tot - b_tot`: equal committed populations. At the basic level this
    /// is the only meaningful choice (`a - b`).
    CommittedTotals,
    /// `a_d - b_d`: equal disseminating subpopulations (robot level only;
    /// falls back to `a - b` at the basic level, where no phase split exists).
    Disseminators,
}

fn deadlock_gap(system: &OdeSystem, which: DeadlockObservable) -> Option<f64> {
    let stable: Vec<_> = find_equilibria(system)
        .into_iter()
        .filter(|e| e.stability == Stability::Stable)
        .collect();
    // The bisection is only meaningful while the attractor is unique.
    if stable.len() != 1 {
        return None;
    }
    let e = &stable[0];
    Some(match (system.level(), which) {
        (OdeLevel::Robot, DeadlockObservable::Disseminators) => e.state[0] - e.state[1],
        _ => e.observable,
    })
}

/// Bisects `eta_a` within `bracket` for the bias nulling the chosen gap of
/// the unique stable equilibrium; `None` when the bracket does not straddle
/// a sign change or the attractor is not unique somewhere along the way.
pub fn deadlock_bias_root(
    base: &ModelParams,
    level: OdeLevel,
    which: DeadlockObservable,
    bracket: (f64, f64),
    tol: f64,
) -> Option<f64> {
    let gap_at = |eta_a: f64| -> Option<f64> {
        let sys = OdeSystem::new(ModelParams { eta_a, ..*base }, level).ok()?;
        deadlock_gap(&sys, which)
    };
    let (mut lo, mut hi) = bracket;
    let mut g_lo = gap_at(lo)?;
    let g_hi = gap_at(hi)?;
    if g_lo == 0.0 {
        return Some(lo);
    }
    if g_hi == 0.0 {
        return Some(hi);
    }
    if (g_lo < 0.0) == (g_hi < 0.0) {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let g_mid = gap_at(mid)?;
        if g_mid == 0.0 {
            return Some(mid);
        }
        if (g_mid < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
