//! Whole-swarm driver: spawns a swarm in a fresh arena, steps every robot
//! once per control cycle, records sampled compartment counts, and detects
//! quorum first passages. Batches fan runs out across threads with
//! deterministic per-run seeds.

use super::robot::{step_robot, FsmState, Opinion, Robot};
use super::{build_arena, SimConfig, SimError};
use crate::metrics::RunSummary;
use crate::rngutil::{rng_from_seed, seed_for_run};
use crate::ssa::gillespie::quorum_count;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Recorded outcome of one embodied run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    /// Sampled compartment counts `(cycle, [A_D, B_D, A_E, B_E, U])`, where
    /// the `_D` columns count disseminating robots and `_E` every other
    /// committed robot.
    pub samples: Vec<(u64, [u64; 5])>,
    pub final_counts: [u64; 5],
    /// First sampled cycle at which commitments to the better option
    /// reached the quorum, if ever.
    pub first_passage_a: Option<f64>,
    /// Same for the other option.
    pub first_passage_b: Option<f64>,
    pub horizon_cycles: u64,
    /// Population size.
    pub n: u32,
    /// Social polling resolutions over the whole run.
    pub n_polls: u64,
    /// Asocial tile-reading resolutions over the whole run.
    pub n_selfsource: u64,
}

impl From<&RunRecord> for RunSummary {
    fn from(r: &RunRecord) -> RunSummary {
        RunSummary {
            n: r.n,
            final_a: r.final_counts[0] + r.final_counts[2],
            final_b: r.final_counts[1] + r.final_counts[3],
            first_passage_a: r.first_passage_a,
            first_passage_b: r.first_passage_b,
            horizon: r.horizon_cycles as f64,
        }
    }
}

fn counts(robots: &[Robot]) -> [u64; 5] {
    let mut c = [0u64; 5];
    for r in robots {
        c[r.compartment()] += 1;
    }
    c
}

fn update_passage(
    cycle: u64,
    c: &[u64; 5],
    threshold: Option<u64>,
    fp_a: &mut Option<f64>,
    fp_b: &mut Option<f64>,
) {
    if let Some(t) = threshold {
        if fp_a.is_none() && c[0] + c[2] >= t {
            *fp_a = Some(cycle as f64);
        }
        if fp_b.is_none() && c[1] + c[3] >= t {
            *fp_b = Some(cycle as f64);
        }
    }
}

/// Picks one opinion uniformly among the cycle-start broadcasters within
/// communication range — the first message a polling robot hears.
fn sample_message(
    snapshot: &[(f64, f64, Opinion)],
    x: f64,
    y: f64,
    range_cm: f64,
    rng: &mut ChaCha8Rng,
) -> Option<Opinion> {
    let r2 = range_cm * range_cm;
    let mut hits = 0u64;
    let mut chosen = None;
    for &(sx, sy, op) in snapshot {
        let d2 = (sx - x) * (sx - x) + (sy - y) * (sy - y);
        if d2 <= r2 {
            hits += 1;
            // Reservoir of size one keeps each in-range broadcaster
            // equally likely without a second pass.
            if rng.gen_range(0..hits) == 0 {
                chosen = Some(op);
            }
        }
    }
    chosen
}

/// Runs one embodied experiment to the horizon.
pub fn run_sim(cfg: &SimConfig, seed: u64) -> Result<RunRecord, SimError> {
    let cfg = cfg.clone().validated()?;
    let mut rng = rng_from_seed(seed);
    let arena = build_arena(&cfg, &mut rng)?;
    let n = cfg.params.n;
    let n_a = ((cfg.initial_a_fraction * n as f64 + 0.5).floor() as u32).min(n);

    // Spawn uniformly over the interior rectangle, outside the border ring.
    let margin = cfg.cell_size_cm;
    let mut robots: Vec<Robot> = (0..n)
        .map(|i| {
            let x = rng.gen_range(margin..arena.width_cm() - margin);
            let y = rng.gen_range(margin..arena.height_cm() - margin);
            let heading = rng.gen_range(-PI..PI);
            let opinion = if i < n_a { Opinion::A } else { Opinion::B };
            Robot::new(x, y, heading, opinion, &cfg, arena.n_cells(), &mut rng)
        })
        .collect();

    let threshold = cfg.quorum.map(|q| quorum_count(q, n as u64));
    let mut fp_a = None;
    let mut fp_b = None;
    let mut samples =
        Vec::with_capacity((cfg.horizon_cycles / cfg.sample_every + 2) as usize);
    let mut n_polls = 0u64;
    let mut n_selfsource = 0u64;
    let mut snapshot: Vec<(f64, f64, Opinion)> = Vec::with_capacity(n as usize);

    for cycle in 0..cfg.horizon_cycles {
        if cycle % cfg.sample_every == 0 {
            let c = counts(&robots);
            update_passage(cycle, &c, threshold, &mut fp_a, &mut fp_b);
            samples.push((cycle, c));
        }
        // Messages heard this cycle come from robots that were broadcasting
        // at the start of it.
        snapshot.clear();
        snapshot.extend(robots.iter().filter(|r| r.is_broadcasting()).map(|r| {
            (r.x, r.y, r.opinion.expect("broadcasting robots are committed"))
        }));
        for i in 0..robots.len() {
            let inbox = match robots[i].fsm {
                FsmState::Polling => {
                    n_polls += 1;
                    sample_message(
                        &snapshot,
                        robots[i].x,
                        robots[i].y,
                        cfg.comm_range_cm,
                        &mut rng,
                    )
                }
                FsmState::SelfSourcing => {
                    n_selfsource += 1;
                    None
                }
                _ => None,
            };
            step_robot(&mut robots[i], &arena, &cfg, inbox, &mut rng);
        }
    }
    let c = counts(&robots);
    update_passage(cfg.horizon_cycles, &c, threshold, &mut fp_a, &mut fp_b);
    samples.push((cfg.horizon_cycles, c));

    Ok(RunRecord {
        seed,
        samples,
        final_counts: c,
        first_passage_a: fp_a,
        first_passage_b: fp_b,
        horizon_cycles: cfg.horizon_cycles,
        n,
        n_polls,
        n_selfsource,
    })
}

/// Runs independent replicates in parallel; run `i` is seeded from the
/// master seed and its index, so results do not depend on thread schedule.
pub fn run_batch_sim(
    cfg: &SimConfig,
    n_runs: usize,
    master_seed: u64,
) -> Result<Vec<RunRecord>, SimError> {
    let cfg = cfg.clone().validated()?;
    (0..n_runs)
        .into_par_iter()
        .map(|i| run_sim(&cfg, seed_for_run(master_seed, i as u64)))
        .collect()
}
