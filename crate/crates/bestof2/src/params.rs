//! Model parameters, macroscopic states, and the unified asocial bias.
//!
//! Every level of description (mean-field, stochastic, spatial) shares one
//! parameter set: option qualities `q_a >= q_b` on (0, 1], the asocial rate
//! `eta` and its bias `eta_a` (with `eta_b = 1 - eta_a` always derived, never
//! stored), the mean phase durations in control cycles, the update mechanism,
//! and the population size. Concrete asocial sources — zealot agents,
//! corrupted messages, self-sourced environmental evidence — all reduce to
//! the same `(eta, eta_a)` pair via the `map_*` functions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opinion-update mechanism for disagreeing evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mechanism {
    /// A disagreeing poll (or asocial signal) replaces the opinion directly.
    DirectSwitch,
    /// A disagreeing poll *or* a conflicting asocial signal makes the agent
    /// uncommitted.
    CrossInhibitionT1,
    /// A disagreeing poll makes the agent uncommitted, but a conflicting
    /// asocial signal switches the opinion directly.
    CrossInhibitionT2,
}

impl Mechanism {
    /// True for both cross-inhibition variants.
    pub fn is_cross_inhibition(self) -> bool {
        !matches!(self, Mechanism::DirectSwitch)
    }

    /// Short machine-friendly name used in CSV columns and config files.
    pub fn label(self) -> &'static str {
        match self {
            Mechanism::DirectSwitch => "ds",
            Mechanism::CrossInhibitionT1 => "ci-t1",
            Mechanism::CrossInhibitionT2 => "ci-t2",
        }
    }
}

impl std::fmt::Display for Mechanism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Mechanism {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ds" | "direct-switch" => Ok(Mechanism::DirectSwitch),
            "ci-t1" | "cross-inhibition-t1" => Ok(Mechanism::CrossInhibitionT1),
            "ci-t2" | "cross-inhibition-t2" => Ok(Mechanism::CrossInhibitionT2),
            other => Err(format!(
                "unknown mechanism {other:?} (expected ds, ci-t1, or ci-t2)"
            )),
        }
    }
}

/// Validation failure for a [`ModelParams`] draft.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    /// A quality is outside (0, 1], non-finite, or `q_a < q_b`.
    #[error("quality out of range: {0}")]
    QualityOutOfRange(String),
    /// A mean phase duration is zero, negative, or non-finite.
    #[error("non-positive phase duration: {0}")]
    NegativeDuration(String),
    /// `eta` or `eta_a` is outside [0, 1] or non-finite.
    #[error("asocial bias out of range: {0}")]
    BiasOutOfRange(String),
    /// Population size is zero.
    #[error("population size must be at least 1")]
    EmptyPopulation,
}

/// Shared parameter set for all three levels of description.
///
/// Durations are mean values of exponentially distributed phases, in control
/// cycles. `eta_b` is never stored; use [`ModelParams::eta_b`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Quality of option A, in (0, 1]; by convention the better option.
    pub q_a: f64,
    /// Quality of option B, in (0, 1], with `q_b <= q_a`.
    pub q_b: f64,
    /// Probability that an opinion update uses the asocial channel, in [0, 1].
    pub eta: f64,
    /// Probability that an asocial update favours option A, in [0, 1].
    pub eta_a: f64,
    /// Mean exploration duration (control cycles), > 0.
    pub t_e: f64,
    /// Base mean dissemination duration (control cycles), > 0; an agent
    /// committed to option i disseminates for `q_i * t_d` on average.
    pub t_d: f64,
    /// Mean uncommitted duration (control cycles), > 0; cross-inhibition only.
    pub t_u: f64,
    /// Opinion-update mechanism.
    pub mechanism: Mechanism,
    /// Population size, >= 1.
    pub n: u32,
}

impl Default for ModelParams {
    /// Baseline: equal unit qualities, purely social dynamics, direct switch,
    /// the reference robot phase durations, and 100 agents.
    fn default() -> Self {
        ModelParams {
            q_a: 1.0,
            q_b: 1.0,
            eta: 0.0,
            eta_a: 0.5,
            t_e: 3000.0,
            t_d: 1300.0,
            t_u: 1000.0,
            mechanism: Mechanism::DirectSwitch,
            n: 100,
        }
    }
}

impl ModelParams {
    /// Checks every field range and the quality ordering, returning the
    /// parameter set unchanged on success.
    pub fn validate(self) -> Result<Self, ParamError> {
        let quality_ok = |q: f64| q.is_finite() && q > 0.0 && q <= 1.0;
        if !quality_ok(self.q_a) {
            return Err(ParamError::QualityOutOfRange(format!(
                "q_a = {} not in (0, 1]",
                self.q_a
            )));
        }
        if !quality_ok(self.q_b) {
            return Err(ParamError::QualityOutOfRange(format!(
                "q_b = {} not in (0, 1]",
                self.q_b
            )));
        }
        if self.q_b > self.q_a {
            return Err(ParamError::QualityOutOfRange(format!(
                "q_b = {} exceeds q_a = {}; A must be the better option",
                self.q_b, self.q_a
            )));
        }
        let bias_ok = |x: f64| x.is_finite() && (0.0..=1.0).contains(&x);
        if !bias_ok(self.eta) {
            return Err(ParamError::BiasOutOfRange(format!(
                "eta = {} not in [0, 1]",
                self.eta
            )));
        }
        if !bias_ok(self.eta_a) {
            return Err(ParamError::BiasOutOfRange(format!(
                "eta_a = {} not in [0, 1]",
                self.eta_a
            )));
        }
        for (name, t) in [("t_e", self.t_e), ("t_d", self.t_d), ("t_u", self.t_u)] {
            if !(t.is_finite() && t > 0.0) {
                return Err(ParamError::NegativeDuration(format!("{name} = {t}")));
            }
        }
        if self.n == 0 {
            return Err(ParamError::EmptyPopulation);
        }
        Ok(self)
    }

    /// Derived asocial bias toward option B: `1 - eta_a`.
    pub fn eta_b(&self) -> f64 {
        1.0 - self.eta_a
    }

    /// Quality ratio `q = q_b / q_a`, in (0, 1] for valid parameters.
    pub fn quality_ratio(&self) -> f64 {
        self.q_b / self.q_a
    }

    /// Copy with a different mechanism; convenient when comparing update
    /// rules at otherwise identical parameters.
    pub fn with_mechanism(mut self, mechanism: Mechanism) -> Self {
        self.mechanism = mechanism;
        self
    }
}

/// Population fractions for the basic (two-phase-free) description.
///
/// `a` and `b` are the fractions committed to each option and `u` the
/// uncommitted fraction (zero under direct switch); they sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroState {
    pub a: f64,
    pub b: f64,
    pub u: f64,
}

impl MacroState {
    /// Builds a state and checks simplex membership (components in [0, 1],
    /// sum within `1e-9` of 1).
    pub fn checked(a: f64, b: f64, u: f64) -> Option<Self> {
        let s = MacroState { a, b, u };
        s.is_physical().then_some(s)
    }

    /// Components nonnegative and summing to 1 within `1e-9`.
    pub fn is_physical(&self) -> bool {
        let inside = |x: f64| (-1e-9..=1.0 + 1e-9).contains(&x);
        inside(self.a) && inside(self.b) && inside(self.u) && {
            let sum = self.a + self.b + self.u;
            (sum - 1.0).abs() <= 1e-9
        }
    }

    /// Signed majority observable `a - b`, in [-1, 1].
    pub fn observable(&self) -> f64 {
        self.a - self.b
    }
}

/// Population fractions for the robot-specific description with explicit
/// exploration (`*_e`) and dissemination (`*_d`) phases.
///
/// Components sum to 1; `u` is zero under direct switch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotMacroState {
    pub a_d: f64,
    pub b_d: f64,
    pub a_e: f64,
    pub b_e: f64,
    pub u: f64,
}

impl RobotMacroState {
    /// Builds a state and checks simplex membership.
    pub fn checked(a_d: f64, b_d: f64, a_e: f64, b_e: f64, u: f64) -> Option<Self> {
        let s = RobotMacroState { a_d, b_d, a_e, b_e, u };
        s.is_physical().then_some(s)
    }

    /// Components nonnegative and summing to 1 within `1e-9`.
    pub fn is_physical(&self) -> bool {
        let inside = |x: f64| (-1e-9..=1.0 + 1e-9).contains(&x);
        [self.a_d, self.b_d, self.a_e, self.b_e, self.u]
            .iter()
            .all(|&x| inside(x))
            && (self.a_d + self.b_d + self.a_e + self.b_e + self.u - 1.0).abs() <= 1e-9
    }

    /// Total fraction committed to A, either phase.
    pub fn a_tot(&self) -> f64 {
        self.a_d + self.a_e
    }

    /// Total fraction committed to B, either phase.
    pub fn b_tot(&self) -> f64 {
        self.b_d + self.b_e
    }

    /// Signed majority observable `(a_d + a_e) - (b_d + b_e)`, in [-1, 1].
    pub fn observable(&self) -> f64 {
        self.a_tot() - self.b_tot()
    }
}

/// Unified asocial parameterisation `(eta, eta_a)` that every concrete
/// source maps onto. `eta_b` is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnifiedBias {
    /// Fraction of opinion updates driven by the asocial channel, in [0, 1].
    pub eta: f64,
    /// Probability an asocial update favours A, in [0, 1].
    pub eta_a: f64,
}

impl UnifiedBias {
    /// Derived bias toward B.
    pub fn eta_b(&self) -> f64 {
        1.0 - self.eta_a
    }
}

/// A concrete origin of asocial opinion updates.
///
/// All variants are behaviourally equivalent once reduced to [`UnifiedBias`];
/// zealot populations additionally need the instantaneous social disseminator
/// mass because their weight in the polling pool varies with the swarm state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AsocialSource {
    /// Already expressed as the unified pair.
    Generic { eta: f64, eta_a: f64 },
    /// Fixed subpopulations that disseminate one opinion forever and never
    /// update, expressed in the same units as the disseminator mass (agent
    /// counts or population fractions).
    Zealots { z_a: f64, z_b: f64 },
    /// A channel attacker corrupting a fraction `p` of messages, a fraction
    /// `p_a` of which push opinion A.
    Mitm { p: f64, p_a: f64 },
    /// Self-sourced environmental evidence: a fraction `rho` of updates read
    /// the environment directly, favouring A with probability `rho_a`.
    SelfSource { rho: f64, rho_a: f64 },
}

impl AsocialSource {
    /// Reduces the source to the unified bias given the current social
    /// disseminator mass (only zealots depend on it).
    pub fn unified(&self, social_disseminators: f64) -> UnifiedBias {
        match *self {
            AsocialSource::Generic { eta, eta_a } => UnifiedBias { eta, eta_a },
            AsocialSource::Zealots { z_a, z_b } => map_zealots(z_a, z_b, social_disseminators),
            AsocialSource::Mitm { p, p_a } => map_mitm(p, p_a),
            AsocialSource::SelfSource { rho, rho_a } => map_selfsource(rho, rho_a),
        }
    }
}

/// Maps zealot subpopulations onto the unified bias.
///
/// A polling agent samples from the mixed disseminator pool, so the asocial
/// rate is the zealot share `(z_a + z_b) / (disseminators + z_a + z_b)` and
/// the bias is the A-zealot share `z_a / (z_a + z_b)`. With no zealots the
/// asocial channel is off and the bias defaults to the neutral 1/2. Inputs
/// must be nonnegative, in any one consistent unit (counts or fractions).
pub fn map_zealots(z_a: f64, z_b: f64, social_disseminators: f64) -> UnifiedBias {
    debug_assert!(z_a >= 0.0 && z_b >= 0.0 && social_disseminators >= 0.0);
    let z = z_a + z_b;
    if z == 0.0 {
        return UnifiedBias { eta: 0.0, eta_a: 0.5 };
    }
    UnifiedBias {
        eta: z / (social_disseminators + z),
        eta_a: z_a / z,
    }
}

/// Maps message corruption onto the unified bias: the identity
/// `(eta, eta_a) = (p, p_a)`.
pub fn map_mitm(p: f64, p_a: f64) -> UnifiedBias {
    UnifiedBias { eta: p, eta_a: p_a }
}

/// Maps self-sourced evidence onto the unified bias: the identity
/// `(eta, eta_a) = (rho, rho_a)`.
pub fn map_selfsource(rho: f64, rho_a: f64) -> UnifiedBias {
    UnifiedBias { eta: rho, eta_a: rho_a }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn base() -> ModelParams {
        ModelParams {
            q_a: 1.0,
            q_b: 0.92,
            eta: 0.05,
            eta_a: 0.5,
            ..ModelParams::default()
        }
    }

    #[test]
    fn validate_accepts_reference_parameters() {
        let p = base().validate().expect("reference parameters are valid");
        assert_relative_eq!(p.eta_b(), 0.5);
        assert_relative_eq!(p.quality_ratio(), 0.92);
    }

    #[test]
    fn validate_rejects_bias_outside_unit_interval() {
        let err = ModelParams { eta_a: 1.2, ..base() }.validate().unwrap_err();
        assert!(matches!(err, ParamError::BiasOutOfRange(_)));
        let err = ModelParams { eta: -0.1, ..base() }.validate().unwrap_err();
        assert!(matches!(err, ParamError::BiasOutOfRange(_)));
    }

    #[test]
    fn validate_rejects_zero_quality_and_bad_ordering() {
        let err = ModelParams { q_b: 0.0, ..base() }.validate().unwrap_err();
        assert!(matches!(err, ParamError::QualityOutOfRange(_)));
        let err = ModelParams { q_a: 0.8, q_b: 0.9, ..base() }
            .validate()
            .unwrap_err();
        assert!(matches!(err, ParamError::QualityOutOfRange(_)));
    }

    #[test]
    fn validate_rejects_nonpositive_durations_and_empty_population() {
        let err = ModelParams { t_d: 0.0, ..base() }.validate().unwrap_err();
        assert!(matches!(err, ParamError::NegativeDuration(_)));
        let err = ModelParams { t_u: -1.0, ..base() }.validate().unwrap_err();
        assert!(matches!(err, ParamError::NegativeDuration(_)));
        let err = ModelParams { n: 0, ..base() }.validate().unwrap_err();
        assert!(matches!(err, ParamError::EmptyPopulation));
    }

    #[test]
    fn zealot_mapping_matches_hand_computed_shares() {
        // 10 + 10 zealots against 80 social disseminators.
        let u = map_zealots(10.0, 10.0, 80.0);
        assert_relative_eq!(u.eta, 0.2);
        assert_relative_eq!(u.eta_a, 0.5);
        assert_relative_eq!(u.eta_b(), 0.5);

        // One-sided zealotry: 5 A-zealots against 95 social disseminators.
        let u = map_zealots(5.0, 0.0, 95.0);
        assert_relative_eq!(u.eta, 0.05);
        assert_relative_eq!(u.eta_a, 1.0);
        assert_relative_eq!(u.eta_b(), 0.0);
    }

    #[test]
    fn zealot_mapping_handles_empty_zealot_population() {
        let u = map_zealots(0.0, 0.0, 55.0);
        assert_relative_eq!(u.eta, 0.0);
        assert_relative_eq!(u.eta_a, 0.5);
    }

    #[test]
    fn mitm_and_selfsource_are_identity_mappings() {
        let u = map_mitm(0.3, 0.7);
        assert_relative_eq!(u.eta, 0.3);
        assert_relative_eq!(u.eta_a, 0.7);

        // Quality-proportional self-sourcing at q_b/q_a = 0.82.
        let rho_a = 1.0 / (1.0 + 0.82);
        let u = map_selfsource(0.05, rho_a);
        assert_relative_eq!(u.eta, 0.05);
        assert_relative_eq!(u.eta_a, 0.5494505494505495);
        assert_relative_eq!(u.eta_b(), 0.4505494505494505);
    }

    #[test]
    fn asocial_source_reduces_through_the_same_mappings() {
        let z = AsocialSource::Zealots { z_a: 10.0, z_b: 10.0 };
        let u = z.unified(80.0);
        assert_relative_eq!(u.eta, 0.2);
        let g = AsocialSource::Generic { eta: 0.2, eta_a: 0.5 };
        assert_relative_eq!(g.unified(12.3).eta, 0.2);
    }

    #[test]
    fn macro_states_check_simplex_membership() {
        assert!(MacroState::checked(0.4, 0.35, 0.25).is_some());
        assert!(MacroState::checked(0.4, 0.35, 0.3).is_none());
        assert!(MacroState::checked(-0.1, 0.6, 0.5).is_none());
        let s = RobotMacroState::checked(0.14, 0.14, 0.36, 0.36, 0.0).unwrap();
        assert_relative_eq!(s.observable(), 0.0);
        assert_relative_eq!(s.a_tot(), 0.5);
    }
}
