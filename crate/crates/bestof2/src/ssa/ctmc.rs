//! Exact stationary distributions for tiny populations.
//!
//! With a handful of agents the chain's state space is small enough to
//! enumerate, so the stationary distribution follows from linear algebra
//! instead of simulation: solve `pi Q = 0` with the probabilities summing to
//! one. This gives an independent, sampling-free oracle against which the
//! Gillespie runner's occupancy statistics can be checked exactly.

use super::network::Reaction;
use super::{DiscreteState, SsaError};
use nalgebra::{DMatrix, DVector};
use std::collections::HashMap;

/// All compositions of `n` agents over the first `compartments` slots
/// (lexicographic order, remaining slots zero). Four slots describe direct
/// switch, five the cross-inhibition mechanisms.
pub fn enumerate_states(n: u64, compartments: usize) -> Vec<DiscreteState> {
    assert!((1..=5).contains(&compartments));
    let mut out = Vec::new();
    let mut counts = [0u64; 5];
    fn recurse(
        counts: &mut [u64; 5],
        slot: usize,
        last: usize,
        left: u64,
        out: &mut Vec<DiscreteState>,
    ) {
        if slot == last {
            counts[slot] = left;
            out.push(DiscreteState::new(*counts));
            return;
        }
        for c in 0..=left {
            counts[slot] = c;
            recurse(counts, slot + 1, last, left - c, out);
        }
    }
    recurse(&mut counts, 0, compartments - 1, n, &mut out);
    out
}

const RESIDUAL_TOL: f64 = 1e-9;

/// Solves for the unique stationary distribution of the chain generated by
/// `network` on the enumerated state space. Errors with
/// [`SsaError::NotIrreducible`] when the balance equations have no unique
/// non-negative solution (for example with no asocial input, where consensus
/// classes are absorbing).
pub fn stationary_distribution_exact(
    network: &[Reaction],
    n: u64,
    compartments: usize,
) -> Result<Vec<(DiscreteState, f64)>, SsaError> {
    let states = enumerate_states(n, compartments);
    let m = states.len();
    let index: HashMap<[u64; 5], usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.counts, i))
        .collect();

    // Generator matrix: q[i][j] is the rate from state i to state j. The
    // edge lists feed the irreducibility check below.
    let mut q = DMatrix::<f64>::zeros(m, m);
    let mut fwd = vec![Vec::new(); m];
    let mut rev = vec![Vec::new(); m];
    for (i, s) in states.iter().enumerate() {
        for r in network {
            let a = r.propensity_at(s);
            if a <= 0.0 {
                continue;
            }
            let mut target = *s;
            target.apply(&r.delta);
            let j = *index
                .get(&target.counts)
                .expect("reaction left the enumerated state space");
            q[(i, j)] += a;
            q[(i, i)] -= a;
            if i != j {
                fwd[i].push(j);
                rev[j].push(i);
            }
        }
    }

    // A unique stationary distribution needs a strongly connected transition
    // digraph. This must be checked structurally: on a reducible chain the
    // solve below may quietly return one of infinitely many balance
    // solutions.
    if !reaches_all(&fwd) || !reaches_all(&rev) {
        return Err(SsaError::NotIrreducible);
    }

    // pi Q = 0 with sum(pi) = 1: transpose, replace one balance equation by
    // the normalisation row.
    let mut a = q.transpose();
    for j in 0..m {
        a[(m - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(m);
    b[m - 1] = 1.0;
    let pi = a.lu().solve(&b).ok_or(SsaError::NotIrreducible)?;

    // A reducible chain can still slip through the solver; verify that the
    // solution is a genuine probability vector in global balance.
    let residual = (q.transpose() * &pi).amax();
    let scale = q.amax().max(1.0);
    if !residual.is_finite() || residual > RESIDUAL_TOL * scale {
        return Err(SsaError::NotIrreducible);
    }
    if pi.min() < -RESIDUAL_TOL {
        return Err(SsaError::NotIrreducible);
    }

    let total: f64 = pi.iter().map(|p| p.max(0.0)).sum();
    Ok(states
        .into_iter()
        .zip(pi.iter())
        .map(|(s, &p)| (s, p.max(0.0) / total))
        .collect())
}

/// Depth-first reachability of every node from node 0.
fn reaches_all(adj: &[Vec<usize>]) -> bool {
    let m = adj.len();
    let mut seen = vec![false; m];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut covered = 1;
    while let Some(i) = stack.pop() {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                covered += 1;
                stack.push(j);
            }
        }
    }
    covered == m
}

/// Marginal of a state distribution over the signed committed-count
/// difference, on the same `2N + 1` grid as a run's occupancy vector.
pub fn marginal_over_difference(dist: &[(DiscreteState, f64)], n: u64) -> Vec<f64> {
    let mut out = vec![0.0; 2 * n as usize + 1];
    for (s, p) in dist {
        out[(s.count_difference() + n as i64) as usize] += p;
    }
    out
}

/// Total variation distance between two distributions on the same grid.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{Mechanism, ModelParams};
    use crate::ssa::network::build_network;
    use approx::assert_abs_diff_eq;

    fn params(mechanism: Mechanism, eta: f64) -> ModelParams {
        ModelParams {
            q_a: 1.0,
            q_b: 1.0,
            eta,
            eta_a: 0.5,
            mechanism,
            n: 3,
            ..ModelParams::default()
        }
        .validate()
        .unwrap()
    }

    #[test]
    fn enumeration_counts_compositions() {
        // C(n + k - 1, k - 1) compositions of n into k parts.
        assert_eq!(enumerate_states(4, 5).len(), 70);
        assert_eq!(enumerate_states(4, 4).len(), 35);
        assert_eq!(enumerate_states(3, 4).len(), 20);
        for s in enumerate_states(4, 4) {
            assert_eq!(s.n(), 4);
            assert_eq!(s.counts[4], 0);
        }
    }

    #[test]
    fn stationary_distribution_is_a_probability_vector() {
        let p = params(Mechanism::CrossInhibitionT1, 0.1);
        let dist = stationary_distribution_exact(&build_network(&p), 3, 5).unwrap();
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        assert!(dist.iter().all(|(_, p)| *p >= 0.0));
        assert_eq!(dist.len(), 35);
    }

    #[test]
    fn symmetric_parameters_give_a_symmetric_distribution() {
        let p = params(Mechanism::DirectSwitch, 0.1);
        let dist = stationary_distribution_exact(&build_network(&p), 3, 4).unwrap();
        let lookup: HashMap<[u64; 5], f64> =
            dist.iter().map(|(s, p)| (s.counts, *p)).collect();
        for (s, prob) in &dist {
            let swapped = [s.counts[1], s.counts[0], s.counts[3], s.counts[2], s.counts[4]];
            assert_abs_diff_eq!(lookup[&swapped], *prob, epsilon = 1e-12);
        }
        // The marginal over the difference inherits the symmetry.
        let marginal = marginal_over_difference(&dist, 3);
        for d in 0..=6 {
            assert_abs_diff_eq!(marginal[d], marginal[6 - d], epsilon = 1e-12);
        }
    }

    #[test]
    fn absorbing_consensus_is_rejected() {
        // No asocial input: the two consensus classes are absorbing and no
        // unique stationary distribution exists.
        let p = params(Mechanism::DirectSwitch, 0.0);
        assert_eq!(
            stationary_distribution_exact(&build_network(&p), 3, 4).unwrap_err(),
            SsaError::NotIrreducible
        );
    }

    #[test]
    fn total_variation_basics() {
        assert_abs_diff_eq!(total_variation(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
        assert_abs_diff_eq!(total_variation(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert_abs_diff_eq!(total_variation(&[0.7, 0.3], &[0.3, 0.7]), 0.4, epsilon = 1e-12);
    }
}
