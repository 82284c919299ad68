//! Decision-speed tabulation over mechanism and swarm-size grids.

use super::gillespie::{run_batch, InitialCondition, RunOptions};
use super::SsaError;
use crate::metrics::{decision_speed, RunSummary, SpeedStat};
use crate::params::{Mechanism, ModelParams};
use crate::rngutil::seed_for_run;
use serde::{Deserialize, Serialize};

/// Decision-speed statistics for one `(mechanism, N)` grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedCell {
    pub mechanism: Mechanism,
    pub n: u32,
    pub stat: SpeedStat,
}

/// Runs `runs_per_cell` trajectories for every mechanism/size combination and
/// tabulates the time of the first quorum crossing. Cells where no run ever
/// reached quorum report `n_decided = 0` with no mean — a missing cell, not a
/// zero. Each cell draws from its own derived seed, so adding rows or columns
/// to the grid never perturbs the others.
pub fn decision_speed_sweep(
    base: &ModelParams,
    mechanisms: &[Mechanism],
    sizes: &[u32],
    initial: InitialCondition,
    opts: &RunOptions,
    runs_per_cell: usize,
    master_seed: u64,
) -> Result<Vec<SpeedCell>, SsaError> {
    assert!(
        opts.quorum.is_some(),
        "a decision-speed sweep needs a quorum threshold"
    );
    let mut cells = Vec::with_capacity(mechanisms.len() * sizes.len());
    for (mi, &mechanism) in mechanisms.iter().enumerate() {
        for (ni, &n) in sizes.iter().enumerate() {
            let p = ModelParams {
                mechanism,
                n,
                ..*base
            }
            .validate()
            .map_err(|e| SsaError::BadInitial(e.to_string()))?;
            let cell_index = (mi * sizes.len() + ni) as u64;
            let cell_seed = seed_for_run(master_seed, cell_index);
            let runs = run_batch(&p, &initial, opts, runs_per_cell, cell_seed)?;
            let summaries: Vec<RunSummary> = runs.iter().map(RunSummary::from).collect();
            cells.push(SpeedCell {
                mechanism,
                n,
                stat: decision_speed(&summaries),
            });
        }
    }
    Ok(cells)
}
