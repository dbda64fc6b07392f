use serde::{Deserialize, Serialize};

use super::sampling::{sample_attacks_with, sample_on_times_counted, single_window_with, DEFAULT_REJECTION_CAP};
use super::{count_overlaps, AttackKind, AttackTrace, LengthDist, SamplingError};
use crate::rng::run_trials;
use crate::schedule::{AttackParams, CycleParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleWindowEstimate {
    /// Fraction of trials in which the window missed every block.
    pub p_hat: f64,
    /// Binomial standard error of `p_hat`.
    pub stderr: f64,
    pub trials: u64,
    /// Accepted schedules per whole-set draw in the rejection sampler.
    pub acceptance_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// Per-trial record of the single-window experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleWindowTrial {
    pub overlap_count: u64,
    /// Whole-set draws the rejection sampler needed.
    pub attempts: u64,
}

/// One attack window of length δ placed uniformly on `[0, T−δ]` against a
/// fresh on-time schedule, per trial.
pub fn single_window_trials(
    seed: u64,
    horizon: f64,
    on_count: u64,
    cycle: CycleParams,
    delta: f64,
    trials: u64,
) -> Result<Vec<SingleWindowTrial>, SamplingError> {
    if trials == 0 {
        return Err(SamplingError::NoTrials);
    }
    run_trials(seed, trials, |_, rng| {
        let (schedule, attempts) =
            sample_on_times_counted(rng, horizon, on_count, cycle, DEFAULT_REJECTION_CAP)?;
        let window = single_window_with(rng, horizon, delta)?;
        let trace = AttackTrace::from_windows(horizon, vec![window])?;
        Ok(SingleWindowTrial {
            overlap_count: count_overlaps(&schedule, &trace).overlap_count,
            attempts,
        })
    })
}

/// Empirical no-overlap probability of the single-window experiment.
pub fn estimate_no_overlap_single_window(
    seed: u64,
    horizon: f64,
    on_count: u64,
    cycle: CycleParams,
    delta: f64,
    trials: u64,
) -> Result<SingleWindowEstimate, SamplingError> {
    let per_trial = single_window_trials(seed, horizon, on_count, cycle, delta, trials)?;
    Ok(summarize_single_window(&per_trial))
}

pub fn summarize_single_window(per_trial: &[SingleWindowTrial]) -> SingleWindowEstimate {
    let trials = per_trial.len() as u64;
    let misses = per_trial.iter().filter(|t| t.overlap_count == 0).count() as u64;
    let draws: u64 = per_trial.iter().map(|t| t.attempts.max(1)).sum();
    let n = trials as f64;
    let p_hat = misses as f64 / n;
    SingleWindowEstimate {
        p_hat,
        stderr: (p_hat * (1.0 - p_hat) / n).sqrt(),
        trials,
        acceptance_rate: trials as f64 / draws as f64,
    }
}

/// Overlap count per trial with fresh schedules and full attack traces.
#[allow(clippy::too_many_arguments)]
pub fn overlap_count_trials(
    seed: u64,
    horizon: f64,
    on_count: u64,
    cycle: CycleParams,
    params: AttackParams,
    kind: AttackKind,
    lengths: LengthDist,
    trials: u64,
) -> Result<Vec<u64>, SamplingError> {
    if trials == 0 {
        return Err(SamplingError::NoTrials);
    }
    run_trials(seed, trials, |_, rng| {
        let (schedule, _) = sample_on_times_counted(rng, horizon, on_count, cycle, DEFAULT_REJECTION_CAP)?;
        let trace = sample_attacks_with(rng, horizon, params, kind, lengths)?;
        Ok(count_overlaps(&schedule, &trace).overlap_count)
    })
}

/// Mean number of (block, window) overlaps per horizon.
#[allow(clippy::too_many_arguments)]
pub fn estimate_expected_overlaps(
    seed: u64,
    horizon: f64,
    on_count: u64,
    cycle: CycleParams,
    params: AttackParams,
    kind: AttackKind,
    lengths: LengthDist,
    trials: u64,
) -> Result<OverlapEstimate, SamplingError> {
    let counts = overlap_count_trials(seed, horizon, on_count, cycle, params, kind, lengths, trials)?;
    Ok(mean_and_stderr(&counts))
}

pub fn mean_and_stderr(counts: &[u64]) -> OverlapEstimate {
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<u64>() as f64 / n;
    let var = if counts.len() > 1 {
        counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    OverlapEstimate {
        mean,
        stderr: (var / n).sqrt(),
        trials: counts.len() as u64,
    }
}
