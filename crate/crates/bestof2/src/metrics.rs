//! Outcome metrics shared by the stochastic and embodied simulation levels.
//!
//! Every run reduces to a [`RunSummary`] — final committed counts plus the
//! first quorum-crossing times — and the metrics aggregate those summaries:
//! cohesion (how unanimous the final state is), accuracy (how often the
//! better option won the quorum race), and decision speed (how fast decided
//! runs decided).

use crate::ssa::gillespie::SsaRun;
use serde::{Deserialize, Serialize};

/// Level-agnostic digest of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    /// Population size.
    pub n: u32,
    /// Agents committed to the better option at the end of the run.
    pub final_a: u64,
    /// Agents committed to the other option at the end of the run.
    pub final_b: u64,
    /// First time the better option held a quorum, if ever.
    pub first_passage_a: Option<f64>,
    /// First time the other option held a quorum, if ever.
    pub first_passage_b: Option<f64>,
    /// Time covered by the run.
    pub horizon: f64,
}

/// Which option first assembled a quorum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecidedOption {
    A,
    B,
}

impl RunSummary {
    /// The option that crossed quorum first, if any did. When both crossed
    /// (possible only with thresholds at or below one half) the earlier one
    /// wins; an exact tie counts for A.
    pub fn decided_option(&self) -> Option<DecidedOption> {
        match (self.first_passage_a, self.first_passage_b) {
            (None, None) => None,
            (Some(_), None) => Some(DecidedOption::A),
            (None, Some(_)) => Some(DecidedOption::B),
            (Some(ta), Some(tb)) => Some(if ta <= tb {
                DecidedOption::A
            } else {
                DecidedOption::B
            }),
        }
    }

    /// Time of the first quorum crossing by either option.
    pub fn decision_time(&self) -> Option<f64> {
        match (self.first_passage_a, self.first_passage_b) {
            (None, None) => None,
            (Some(t), None) | (None, Some(t)) => Some(t),
            (Some(ta), Some(tb)) => Some(ta.min(tb)),
        }
    }
}

impl From<&SsaRun> for RunSummary {
    fn from(run: &SsaRun) -> Self {
        RunSummary {
            n: run.final_state.n() as u32,
            final_a: run.final_state.a_tot(),
            final_b: run.final_state.b_tot(),
            first_passage_a: run.first_passage_a,
            first_passage_b: run.first_passage_b,
            horizon: run.horizon,
        }
    }
}

/// Cohesion of a final state: `|A_tot - B_tot| / N`, one at consensus, zero
/// at an even split.
pub fn cohesion(s: &RunSummary) -> f64 {
    (s.final_a as f64 - s.final_b as f64).abs() / s.n as f64
}

/// Mean cohesion over a batch.
pub fn mean_cohesion(batch: &[RunSummary]) -> f64 {
    assert!(!batch.is_empty(), "cohesion of an empty batch");
    batch.iter().map(cohesion).sum::<f64>() / batch.len() as f64
}

/// Fraction of runs in which the better option held a quorum at some point
/// within the horizon (a first crossing counts even if support later
/// receded). Undecided runs count against. With `best_is_either` (the
/// equal-quality case, where neither option is better) a crossing by either
/// option counts.
pub fn accuracy(batch: &[RunSummary], best_is_either: bool) -> f64 {
    assert!(!batch.is_empty(), "accuracy of an empty batch");
    let hits = batch
        .iter()
        .filter(|s| {
            s.first_passage_a.is_some() || (best_is_either && s.first_passage_b.is_some())
        })
        .count();
    hits as f64 / batch.len() as f64
}

/// Mean and sample standard deviation of decision times, over decided runs
/// only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedStat {
    /// Mean decision time; `None` when no run decided.
    pub mean: Option<f64>,
    /// Sample standard deviation; `None` with fewer than two decided runs.
    pub std_dev: Option<f64>,
    pub n_decided: usize,
    pub n_runs: usize,
}

/// Decision-speed statistics of a batch. Undecided runs are excluded from
/// the moments but reported through `n_decided` versus `n_runs`, so a cell
/// with no decisions is visibly missing rather than silently zero.
pub fn decision_speed(batch: &[RunSummary]) -> SpeedStat {
    let times: Vec<f64> = batch.iter().filter_map(RunSummary::decision_time).collect();
    let n_decided = times.len();
    let mean = if n_decided > 0 {
        Some(times.iter().sum::<f64>() / n_decided as f64)
    } else {
        None
    };
    let std_dev = if n_decided > 1 {
        let m = mean.unwrap();
        let var = times.iter().map(|t| (t - m).powi(2)).sum::<f64>() / (n_decided - 1) as f64;
        Some(var.sqrt())
    } else {
        None
    };
    SpeedStat {
        mean,
        std_dev,
        n_decided,
        n_runs: batch.len(),
    }
}

/// One cell of a parameter-grid summary: the full parameter tuple plus all
/// three metrics, ready for figure-style CSV export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapRow {
    pub eta: f64,
    pub eta_a: f64,
    /// Quality ratio `q_b / q_a`.
    pub q: f64,
    /// Mechanism label, e.g. `"ds"`.
    pub mechanism: String,
    pub cohesion: f64,
    pub accuracy: f64,
    pub speed: SpeedStat,
}

/// Reduces a batch to one heatmap row under the given parameter tuple.
pub fn summarize_cell(
    batch: &[RunSummary],
    eta: f64,
    eta_a: f64,
    q: f64,
    mechanism: &str,
    best_is_either: bool,
) -> HeatmapRow {
    HeatmapRow {
        eta,
        eta_a,
        q,
        mechanism: mechanism.to_string(),
        cohesion: mean_cohesion(batch),
        accuracy: accuracy(batch, best_is_either),
        speed: decision_speed(batch),
    }
}
