//! Convergence of the stochastic levels toward the deterministic one: the
//! sampled chain's mean follows the rate equations as the population grows,
//! finite-size fluctuations shrink with the population, and the integrator
//! is step-size independent at the default resolution.

use bestof2::ode::{integrate, IntegrateOptions, OdeLevel, OdeSystem};
use bestof2::ssa::{run_batch, InitialCondition, RunOptions};
use bestof2::{Mechanism, ModelParams};

/// With a thousand agents the chain's mean trajectory must sit within the
/// finite-size band around the deterministic solution. Direct switch is
/// used because its unique attractor makes the comparison insensitive to
/// basin splitting.
#[test]
fn large_population_mean_follows_the_rate_equations() {
    let n = 1_000u32;
    let runs = 200;
    let horizon = 5_000.0;
    let p = ModelParams {
        q_b: 0.9,
        eta: 0.05,
        eta_a: 0.7,
        mechanism: Mechanism::DirectSwitch,
        n,
        ..ModelParams::default()
    };

    let opts = RunOptions {
        horizon,
        sample_interval: horizon,
        ..RunOptions::default()
    };
    let init = InitialCondition::SymmetricSplit {
        disseminating: 0.28,
    };
    let batch = run_batch(&p, &init, &opts, runs, 31_000).expect("batch");
    let mean_obs: f64 = batch
        .iter()
        .map(|r| r.final_state.observable())
        .sum::<f64>()
        / runs as f64;

    let system = OdeSystem::new(p, OdeLevel::Robot).unwrap();
    let traj = integrate(
        &system,
        &[0.14, 0.14, 0.36],
        &IntegrateOptions {
            dt: 1.0,
            horizon,
            record_every: 1_000,
        },
    )
    .unwrap();
    let ode_obs = system.observable(traj.last());

    let tol = 5.0 / (n as f64).sqrt();
    let gap = (mean_obs - ode_obs).abs();
    assert!(
        gap <= tol,
        "mean observable {mean_obs:.4} vs deterministic {ode_obs:.4}: gap {gap:.4} > {tol:.4}"
    );
}

/// Fluctuations shrink with population size: under cross-inhibition with a
/// quality gap and no asocial input, the share of runs absorbed on the
/// inferior option must drop as the swarm doubles.
#[test]
fn larger_swarms_pick_the_inferior_option_less_often() {
    let runs = 200;
    let frac_b = |n: u32| -> f64 {
        let p = ModelParams {
            q_b: 0.82,
            eta: 0.0,
            eta_a: 0.5,
            mechanism: Mechanism::CrossInhibitionT1,
            n,
            ..ModelParams::default()
        };
        let opts = RunOptions {
            horizon: 200_000.0,
            sample_interval: 200_000.0,
            ..RunOptions::default()
        };
        let batch = run_batch(&p, &InitialCondition::PerAgentUniform, &opts, runs, 8_200)
            .expect("batch");
        batch
            .iter()
            .filter(|r| r.final_state.observable() < 0.0)
            .count() as f64
            / runs as f64
    };

    let small = frac_b(50);
    let large = frac_b(200);
    assert!(
        small - large >= 0.05,
        "inferior-option share did not drop with size: {small:.2} at 50 vs {large:.2} at 200"
    );
    assert!(small >= 0.1, "suspiciously few inferior picks at size 50: {small:.2}");
}

/// Halving the integration step must not move a long trajectory through the
/// bistable regime: the default resolution is well inside the integrator's
/// convergence regime.
#[test]
fn trajectories_are_step_size_independent() {
    let system = OdeSystem::new(
        ModelParams {
            q_b: 0.82,
            eta: 0.1,
            eta_a: 1.0 / (1.0 + 0.82),
            mechanism: Mechanism::CrossInhibitionT2,
            ..ModelParams::default()
        },
        OdeLevel::Robot,
    )
    .unwrap();
    let x0 = [0.14, 0.14, 0.36, 0.36];

    let coarse = integrate(
        &system,
        &x0,
        &IntegrateOptions {
            dt: 1.0,
            horizon: 20_000.0,
            record_every: 100,
        },
    )
    .unwrap();
    let fine = integrate(
        &system,
        &x0,
        &IntegrateOptions {
            dt: 0.5,
            horizon: 20_000.0,
            record_every: 200,
        },
    )
    .unwrap();

    let gap = coarse.max_abs_difference(&fine);
    assert!(gap <= 1e-8, "halving the step moved the trajectory by {gap}");
}
