//! Right-hand sides of the mean-field rate equations.
//!
//! Social updates poll the disseminating subpopulations: an updating agent
//! adopts (or is inhibited by) opinion A with probability `a_d / (a_d + b_d)`.
//! Asocial updates bypass the poll and favour A with probability `eta_a`.
//! Each update is asocial with probability `eta`, so every recruitment-like
//! flow carries the factor `eta * eta_x + (1 - eta) * share_x`. When nobody
//! disseminates the social share is taken to be zero (the asocial channel
//! alone remains active), which regularises the `a_d + b_d = 0` boundary.
//!
//! In the basic-level equations the dissemination phase is implicit: agents
//! committed to option i are encountered at a rate proportional to `q_i`,
//! and all rates are expressed in units of the inverse encounter time, so
//! the phase durations `t_e`, `t_d`, `t_u` do not appear.

use crate::params::{map_zealots, ModelParams};

/// Social polling shares `(a_d, b_d) / (a_d + b_d)`, defined as zero when
/// nobody disseminates.
#[inline]
pub fn polling_shares(a_d: f64, b_d: f64) -> (f64, f64) {
    let s = a_d + b_d;
    if s > 0.0 {
        (a_d / s, b_d / s)
    } else {
        (0.0, 0.0)
    }
}

/// Basic-level direct switch: `da/dt` with `b = 1 - a`.
///
/// `da/dt = a b (1 - eta)(q_a - q_b) + eta (b eta_a - a eta_b)`
pub fn rhs_basic_ds(p: &ModelParams, a: f64) -> f64 {
    let b = 1.0 - a;
    a * b * (1.0 - p.eta) * (p.q_a - p.q_b) + p.eta * (b * p.eta_a - a * p.eta_b())
}

/// Basic-level cross-inhibition, type 1 (asocial conflicts uncommit):
/// `(da/dt, db/dt)` with `u = 1 - a - b`.
///
/// `da/dt = a (1 - eta)(q_a u - q_b b) + eta (u eta_a - a eta_b)` and the
/// label-swapped expression for `db/dt`.
pub fn rhs_basic_ci(p: &ModelParams, a: f64, b: f64) -> (f64, f64) {
    let u = 1.0 - a - b;
    let (eta, eta_a, eta_b) = (p.eta, p.eta_a, p.eta_b());
    let da = a * (1.0 - eta) * (p.q_a * u - p.q_b * b) + eta * (u * eta_a - a * eta_b);
    let db = b * (1.0 - eta) * (p.q_b * u - p.q_a * a) + eta * (u * eta_b - b * eta_a);
    (da, db)
}

/// Basic-level cross-inhibition, type 2 (asocial conflicts switch directly).
///
/// Relative to type 1 the asocial inhibition flows `eta eta_b a` and
/// `eta eta_a b` land on the opposing committed state instead of `u`:
/// `da/dt = a (1 - eta)(q_a u - q_b b) + eta (u eta_a - a eta_b) + eta eta_a b`.
pub fn rhs_basic_ci_t2(p: &ModelParams, a: f64, b: f64) -> (f64, f64) {
    let (da1, db1) = rhs_basic_ci(p, a, b);
    (
        da1 + p.eta * p.eta_a * b,
        db1 + p.eta * p.eta_b() * a,
    )
}

/// Robot-level direct switch on reduced `[a_d, b_d, a_e]`;
/// `b_e = 1 - a_d - b_d - a_e`.
///
/// Disseminating agents for option i leave at rate `1 / (q_i t_d)` and pick
/// their next opinion by the mixed asocial/social rule; explorers return to
/// dissemination at rate `1 / t_e`.
pub fn rhs_robot_ds(p: &ModelParams, x: [f64; 3]) -> [f64; 3] {
    let [a_d, b_d, a_e] = x;
    let b_e = 1.0 - a_d - b_d - a_e;
    let (share_a, _) = polling_shares(a_d, b_d);
    let out_a = a_d / (p.q_a * p.t_d);
    let out_b = b_d / (p.q_b * p.t_d);
    let gain_a = p.eta * p.eta_a + (1.0 - p.eta) * share_a;
    [
        a_e / p.t_e - out_a,
        b_e / p.t_e - out_b,
        -a_e / p.t_e + (out_a + out_b) * gain_a,
    ]
}

/// Robot-level cross-inhibition type 1 on reduced `[a_d, b_d, a_e, b_e]`;
/// `u = 1 - a_d - b_d - a_e - b_e`.
///
/// Updating agents are those leaving dissemination (`a_d / (q_a t_d)`, with
/// a conflicting outcome sending them to `u`) and those leaving the
/// uncommitted state (`u / t_u`, recruited by the winning side).
pub fn rhs_robot_ci_t1(p: &ModelParams, x: [f64; 4]) -> [f64; 4] {
    let [a_d, b_d, a_e, b_e] = x;
    let u = 1.0 - a_d - b_d - a_e - b_e;
    let (share_a, share_b) = polling_shares(a_d, b_d);
    let out_a = a_d / (p.q_a * p.t_d);
    let out_b = b_d / (p.q_b * p.t_d);
    let gain_a = p.eta * p.eta_a + (1.0 - p.eta) * share_a;
    let gain_b = p.eta * p.eta_b() + (1.0 - p.eta) * share_b;
    [
        a_e / p.t_e - out_a,
        b_e / p.t_e - out_b,
        -a_e / p.t_e + (out_a + u / p.t_u) * gain_a,
        -b_e / p.t_e + (out_b + u / p.t_u) * gain_b,
    ]
}

/// Robot-level cross-inhibition type 2 on reduced `[a_d, b_d, a_e, b_e]`.
///
/// As type 1, plus the direct asocial switches between committed states:
/// agents leaving `b_d` whose asocial signal favours A join `a_e` at rate
/// `eta eta_a b_d / (q_b t_d)` (and symmetrically for `b_e`).
pub fn rhs_robot_ci_t2(p: &ModelParams, x: [f64; 4]) -> [f64; 4] {
    let [a_d, b_d, _, _] = x;
    let mut d = rhs_robot_ci_t1(p, x);
    d[2] += p.eta * p.eta_a * b_d / (p.q_b * p.t_d);
    d[3] += p.eta * p.eta_b() * a_d / (p.q_a * p.t_d);
    d
}

/// Zealot-explicit robot direct switch on the full `[a_d, b_d, a_e, b_e]`.
///
/// Zealot subpopulations `z_a`, `z_b` (same units as the fractions)
/// disseminate forever, so a polling agent adopts A with the pool share
/// `(a_d + z_a) / (a_d + b_d + z_a + z_b)`. Only the quality and duration
/// fields of `p` are read; the unified bias is what this form reduces to via
/// [`map_zealots`] evaluated at the instantaneous disseminator mass.
pub fn rhs_robot_ds_zealot(p: &ModelParams, z_a: f64, z_b: f64, x: [f64; 4]) -> [f64; 4] {
    let [a_d, b_d, a_e, b_e] = x;
    let pool = a_d + b_d + z_a + z_b;
    let (pick_a, pick_b) = if pool > 0.0 {
        ((a_d + z_a) / pool, (b_d + z_b) / pool)
    } else {
        (0.0, 0.0)
    };
    let out_a = a_d / (p.q_a * p.t_d);
    let out_b = b_d / (p.q_b * p.t_d);
    [
        a_e / p.t_e - out_a,
        b_e / p.t_e - out_b,
        -a_e / p.t_e + (out_a + out_b) * pick_a,
        -b_e / p.t_e + (out_a + out_b) * pick_b,
    ]
}

/// Zealot-explicit robot cross-inhibition type 1 on the full
/// `[a_d, b_d, a_e, b_e, u]`.
pub fn rhs_robot_ci_t1_zealot(p: &ModelParams, z_a: f64, z_b: f64, x: [f64; 5]) -> [f64; 5] {
    let [a_d, b_d, a_e, b_e, u] = x;
    let pool = a_d + b_d + z_a + z_b;
    let (pick_a, pick_b) = if pool > 0.0 {
        ((a_d + z_a) / pool, (b_d + z_b) / pool)
    } else {
        (0.0, 0.0)
    };
    let out_a = a_d / (p.q_a * p.t_d);
    let out_b = b_d / (p.q_b * p.t_d);
    [
        a_e / p.t_e - out_a,
        b_e / p.t_e - out_b,
        -a_e / p.t_e + (out_a + u / p.t_u) * pick_a,
        -b_e / p.t_e + (out_b + u / p.t_u) * pick_b,
        -u / p.t_u + out_a * pick_b + out_b * pick_a,
    ]
}

/// Generic-bias counterpart of the zealot forms: evaluates the unified
/// mapping at the instantaneous disseminator mass and applies the ordinary
/// generic right-hand side. Used to verify that zealots are behaviourally
/// identical to the reduced parameterisation.
pub fn params_with_instant_zealot_bias(
    p: &ModelParams,
    z_a: f64,
    z_b: f64,
    a_d: f64,
    b_d: f64,
) -> ModelParams {
    let bias = map_zealots(z_a, z_b, a_d + b_d);
    ModelParams {
        eta: bias.eta,
        eta_a: bias.eta_a,
        ..*p
    }
}
