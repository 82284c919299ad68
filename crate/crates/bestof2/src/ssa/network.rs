//! Reaction networks for the finite-population chain.
//!
//! Each mechanism compiles to a list of [`Reaction`]s. Rates follow the
//! committed agent's own dissemination clock: an agent disseminating option X
//! leaves that phase at total rate `1 / (q_x t_d)` and the outcome of the
//! departure (stay, switch, or drop to uncommitted) is decided by the social
//! poll or the asocial bias. Averaging these propensities over the population
//! reproduces the robot-level mean-field equations exactly, which
//! [`mean_field_rhs`] exposes for direct comparison.

use super::{Compartment, DiscreteState};
use crate::params::{Mechanism, ModelParams};

use Compartment::{AD, AE, BD, BE, U};

/// How a reaction's propensity is computed from the current counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PropensityKind {
    /// `rate * source`: exponential clocks carried by each source agent.
    PerCapita { rate: f64, source: Compartment },
    /// `rate * source * polled / (A_D + B_D)`: a source agent fires its clock
    /// and samples an opinion from the disseminating pool. Zero when the pool
    /// is empty.
    PolledSocial {
        rate: f64,
        source: Compartment,
        polled: Compartment,
    },
    /// `rate * source * partner / N`: binary encounter kinetics. Not used by
    /// the robot-level networks; provided so reduced well-mixed schemes can be
    /// expressed and checked against their mean field.
    MassAction {
        rate: f64,
        source: Compartment,
        partner: Compartment,
    },
}

/// One transition channel: stoichiometry plus its propensity rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Reaction {
    /// Human-readable channel name, e.g. `"A_D->U social"`.
    pub name: &'static str,
    /// Count change per firing, indexed by [`Compartment`].
    pub delta: [i64; 5],
    pub kind: PropensityKind,
}

impl Reaction {
    fn new(name: &'static str, from: Compartment, to: Compartment, kind: PropensityKind) -> Self {
        let mut delta = [0i64; 5];
        delta[from.index()] -= 1;
        delta[to.index()] += 1;
        Reaction { name, delta, kind }
    }

    /// Propensity at the given counts. `counts` may hold fractions (with
    /// `n = 1`) to evaluate the network's mean field.
    pub fn propensity(&self, counts: &[f64; 5], n: f64) -> f64 {
        match self.kind {
            PropensityKind::PerCapita { rate, source } => rate * counts[source.index()],
            PropensityKind::PolledSocial {
                rate,
                source,
                polled,
            } => {
                let pool = counts[AD.index()] + counts[BD.index()];
                if pool <= 0.0 {
                    0.0
                } else {
                    rate * counts[source.index()] * counts[polled.index()] / pool
                }
            }
            PropensityKind::MassAction {
                rate,
                source,
                partner,
            } => rate * counts[source.index()] * counts[partner.index()] / n,
        }
    }

    /// Propensity at an integer-count state.
    pub fn propensity_at(&self, state: &DiscreteState) -> f64 {
        self.propensity(&state.as_f64(), state.n() as f64)
    }
}

fn polled(rate: f64, source: Compartment, polled: Compartment) -> PropensityKind {
    PropensityKind::PolledSocial {
        rate,
        source,
        polled,
    }
}

fn per_capita(rate: f64, from: Compartment) -> PropensityKind {
    PropensityKind::PerCapita { rate, source: from }
}

/// Builds the reaction list for the given parameters. The caller is expected
/// to pass validated parameters; rates are finite whenever
/// [`ModelParams::validate`] accepts them.
pub fn build_network(p: &ModelParams) -> Vec<Reaction> {
    let social = 1.0 - p.eta;
    let eta_a = p.eta * p.eta_a;
    let eta_b = p.eta * p.eta_b();
    // Departure clocks for each disseminating compartment and the uncommitted
    // compartment.
    let out_a = 1.0 / (p.q_a * p.t_d);
    let out_b = 1.0 / (p.q_b * p.t_d);
    let out_u = 1.0 / p.t_u;
    let ret = 1.0 / p.t_e;

    let mut rx = vec![
        // Social outcomes of a dissemination phase ending: poll the
        // disseminating pool and adopt the sampled opinion.
        Reaction::new("A_D->A_E social", AD, AE, polled(social * out_a, AD, AD)),
        Reaction::new("B_D->B_E social", BD, BE, polled(social * out_b, BD, BD)),
        // Returns from exploration.
        Reaction::new("A_E->A_D return", AE, AD, per_capita(ret, AE)),
        Reaction::new("B_E->B_D return", BE, BD, per_capita(ret, BE)),
        // Asocial outcomes that keep or set commitment to the favoured side.
        Reaction::new("A_D->A_E asocial", AD, AE, per_capita(eta_a * out_a, AD)),
        Reaction::new("B_D->B_E asocial", BD, BE, per_capita(eta_b * out_b, BD)),
    ];

    match p.mechanism {
        Mechanism::DirectSwitch => {
            rx.extend([
                // A conflicting poll or asocial input switches commitment
                // directly.
                Reaction::new("A_D->B_E social", AD, BE, polled(social * out_a, AD, BD)),
                Reaction::new("B_D->A_E social", BD, AE, polled(social * out_b, BD, AD)),
                Reaction::new("A_D->B_E asocial", AD, BE, per_capita(eta_b * out_a, AD)),
                Reaction::new("B_D->A_E asocial", BD, AE, per_capita(eta_a * out_b, BD)),
            ]);
        }
        Mechanism::CrossInhibitionT1 | Mechanism::CrossInhibitionT2 => {
            rx.extend([
                // A conflicting poll drops the agent to uncommitted.
                Reaction::new("A_D->U social", AD, U, polled(social * out_a, AD, BD)),
                Reaction::new("B_D->U social", BD, U, polled(social * out_b, BD, AD)),
                // Uncommitted agents recruit from the pool or from the
                // asocial source.
                Reaction::new("U->A_E social", U, AE, polled(social * out_u, U, AD)),
                Reaction::new("U->B_E social", U, BE, polled(social * out_u, U, BD)),
                Reaction::new("U->A_E asocial", U, AE, per_capita(eta_a * out_u, U)),
                Reaction::new("U->B_E asocial", U, BE, per_capita(eta_b * out_u, U)),
            ]);
            match p.mechanism {
                // Type 1: a conflicting asocial input also inhibits.
                Mechanism::CrossInhibitionT1 => rx.extend([
                    Reaction::new("A_D->U asocial", AD, U, per_capita(eta_b * out_a, AD)),
                    Reaction::new("B_D->U asocial", BD, U, per_capita(eta_a * out_b, BD)),
                ]),
                // Type 2: a conflicting asocial input switches directly.
                Mechanism::CrossInhibitionT2 => rx.extend([
                    Reaction::new("A_D->B_E asocial", AD, BE, per_capita(eta_b * out_a, AD)),
                    Reaction::new("B_D->A_E asocial", BD, AE, per_capita(eta_a * out_b, BD)),
                ]),
                Mechanism::DirectSwitch => unreachable!(),
            }
        }
    }

    rx
}

/// Mean-field drift of a reaction network evaluated at compartment
/// fractions: the sum of `delta * propensity` with unit population. For the
/// networks built here this equals the robot-level ODE right-hand side.
pub fn mean_field_rhs(network: &[Reaction], fractions: &[f64; 5]) -> [f64; 5] {
    let mut drift = [0.0; 5];
    for r in network {
        let a = r.propensity(fractions, 1.0);
        for i in 0..5 {
            drift[i] += r.delta[i] as f64 * a;
        }
    }
    drift
}
