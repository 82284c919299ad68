//! Multiscale models of best-of-2 collective decision-making in minimal swarms.
//!
//! A swarm of `n` agents chooses between two options, A and B, with qualities
//! `q_a >= q_b`. Committed agents alternate between *exploring* (assessing
//! their option) and *disseminating* (advertising it); opinion updates mix a
//! social channel (polling a disseminating neighbour) with an asocial channel
//! (self-sourced or injected evidence) at rate `eta`, biased toward A with
//! probability `eta_a`. Two social update rules are modelled:
//!
//! * **direct switch** — a disagreeing poll replaces the agent's opinion;
//! * **cross-inhibition** — a disagreeing poll (or, for type 1, a conflicting
//!   asocial signal) drops the agent into an uncommitted state from which it
//!   is recruited afresh.
//!
//! The same parameterisation is implemented at three levels of description:
//!
//! * [`ode`] — deterministic mean-field rate equations (population fractions),
//!   with equilibrium, stability, and bifurcation analysis;
//! * [`ssa`] — exact stochastic simulation (Gillespie) of the finite-`n`
//!   reaction network, plus a brute-force stationary-distribution solver for
//!   tiny populations;
//! * [`sim`] — a spatial agent-based simulator: robots random-walk over a
//!   tiled arena, estimate option quality from tile colours, and exchange
//!   opinions by local broadcast.
//!
//! [`metrics`] computes cohesion, accuracy, and decision speed from either
//! stochastic level; [`csvio`] writes all result tables; [`rngutil`] derives
//! deterministic per-run random streams. Time is measured in robot control
//! cycles throughout, and all three levels accept the same [`params::ModelParams`].
pub mod csvio;
pub mod metrics;
pub mod ode;
pub mod params;
pub mod rngutil;
pub mod sim;
pub mod ssa;

pub use params::{AsocialSource, MacroState, Mechanism, ModelParams, RobotMacroState, UnifiedBias};
