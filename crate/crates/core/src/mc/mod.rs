//! Monte Carlo timeline simulation.
//!
//! Defender on-time blocks and attacker burst windows are both sorted,
//! pairwise-disjoint sets of half-open intervals over `[0, T]`. An overlap
//! is a (block, window) pair with a nonempty intersection.

mod estimate;
mod overlap;
mod sampling;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schedule::{AttackParams, CycleParams, ScheduleError};

pub use estimate::{
    estimate_expected_overlaps, estimate_no_overlap_single_window, mean_and_stderr, overlap_count_trials,
    single_window_trials, summarize_single_window, OverlapEstimate, SingleWindowEstimate, SingleWindowTrial,
};
pub use overlap::{count_overlaps, count_overlaps_brute_force, overlap_pairs, OverlapPair, TrialOutcome};
pub use sampling::{
    sample_attacks, sample_attacks_with, sample_on_times, sample_on_times_counted, sample_on_times_with,
    single_window_with, DEFAULT_REJECTION_CAP,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("{on_count} blocks of length {tau} cannot be placed disjointly in horizon {horizon}")]
    Infeasible { on_count: u64, tau: f64, horizon: f64 },
    #[error("rejection sampler gave up after {attempts} attempts; on-time request is too dense")]
    RejectionCapExceeded { attempts: u64 },
    #[error("attack window length {length} exceeds horizon {horizon}")]
    WindowTooLong { length: f64, horizon: f64 },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("invalid interval set: {0}")]
    InvalidIntervals(String),
    #[error(transparent)]
    Params(#[from] ScheduleError),
}

/// Half-open interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Self {
        assert!(start <= end, "interval start must not exceed end");
        Self { start, end }
    }

    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Start of the intersection with `other`, if it is nonempty.
    pub fn intersection_start(&self, other: &Interval) -> Option<f64> {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        (lo < hi).then_some(lo)
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.intersection_start(other).is_some()
    }
}

/// Position inside an on-time block. Blocks run reset, swap-in, online, swap-out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CyclePhase {
    Reset,
    SwapIn,
    Online,
    SwapOut,
}

impl CyclePhase {
    pub const ALL: [CyclePhase; 4] = [Self::Reset, Self::SwapIn, Self::Online, Self::SwapOut];

    pub fn duration(self, cycle: &CycleParams) -> f64 {
        match self {
            Self::Reset => cycle.tau_reset,
            Self::SwapIn | Self::SwapOut => cycle.tau_swap,
            Self::Online => cycle.tau_online,
        }
    }

    /// Phase containing `offset` from the block start (half-open phases;
    /// zero-length phases are never returned).
    pub fn at_offset(cycle: &CycleParams, offset: f64) -> Option<CyclePhase> {
        if offset < 0.0 {
            return None;
        }
        let mut end = 0.0;
        for phase in Self::ALL {
            end += phase.duration(cycle);
            if offset < end {
                return Some(phase);
            }
        }
        None
    }
}

fn check_interval_set(horizon: f64, intervals: &[Interval]) -> Result<(), SamplingError> {
    for (i, w) in intervals.iter().enumerate() {
        if !(w.start.is_finite() && w.end.is_finite()) || w.start > w.end {
            return Err(SamplingError::InvalidIntervals(format!("interval {i} is malformed")));
        }
        if w.start < 0.0 || w.end > horizon {
            return Err(SamplingError::InvalidIntervals(format!(
                "interval {i} [{}, {}) leaves [0, {horizon}]",
                w.start, w.end
            )));
        }
        if i > 0 && intervals[i - 1].end > w.start {
            return Err(SamplingError::InvalidIntervals(format!(
                "intervals {} and {i} are unsorted or overlap",
                i - 1
            )));
        }
    }
    Ok(())
}

/// Sorted on-times whose blocks `[T_i, T_i+τ)` are pairwise disjoint inside `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnTimeSchedule {
    horizon: f64,
    cycle: CycleParams,
    on_times: Vec<f64>,
}

impl OnTimeSchedule {
    pub fn new(horizon: f64, cycle: CycleParams, on_times: Vec<f64>) -> Result<Self, SamplingError> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(ScheduleError::NonPositive {
                field: "total_time",
                value: horizon,
            }
            .into());
        }
        let tau = cycle.duration();
        for (i, &t) in on_times.iter().enumerate() {
            if !t.is_finite() || t < 0.0 || t + tau > horizon {
                return Err(SamplingError::InvalidIntervals(format!(
                    "block {i} at {t} leaves [0, {horizon}]"
                )));
            }
            if i > 0 {
                let prev = on_times[i - 1];
                if t <= prev || t < prev + tau {
                    return Err(SamplingError::InvalidIntervals(format!(
                        "blocks {} and {i} are unsorted or overlap",
                        i - 1
                    )));
                }
            }
        }
        Ok(Self {
            horizon,
            cycle,
            on_times,
        })
    }

    pub fn empty(horizon: f64, cycle: CycleParams) -> Self {
        Self {
            horizon,
            cycle,
            on_times: Vec::new(),
        }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn cycle(&self) -> &CycleParams {
        &self.cycle
    }

    pub fn on_times(&self) -> &[f64] {
        &self.on_times
    }

    pub fn len(&self) -> usize {
        self.on_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.on_times.is_empty()
    }

    pub fn block(&self, index: usize) -> Interval {
        let t = self.on_times[index];
        Interval::new(t, t + self.cycle.duration())
    }

    pub fn blocks(&self) -> impl Iterator<Item = Interval> + '_ {
        (0..self.on_times.len()).map(|i| self.block(i))
    }
}

/// How attack gaps are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackKind {
    /// Every gap equals θ.
    FixedPeriod,
    /// Gaps uniform on `[0.5θ, 1.5θ]`.
    UniformJitter,
    /// Gaps exponential with mean θ.
    ExponentialGap,
    /// One window placed uniformly over the horizon; θ is ignored.
    SingleUniform,
    /// Hand-built window set.
    Explicit,
}

/// How attack lengths are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthDist {
    #[default]
    Fixed,
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackTrace {
    horizon: f64,
    windows: Vec<Interval>,
    kind: AttackKind,
    params: Option<AttackParams>,
}

impl AttackTrace {
    pub fn from_windows(horizon: f64, windows: Vec<Interval>) -> Result<Self, SamplingError> {
        check_interval_set(horizon, &windows)?;
        Ok(Self {
            horizon,
            windows,
            kind: AttackKind::Explicit,
            params: None,
        })
    }

    pub(crate) fn generated(
        horizon: f64,
        windows: Vec<Interval>,
        kind: AttackKind,
        params: AttackParams,
    ) -> Self {
        debug_assert!(check_interval_set(horizon, &windows).is_ok());
        Self {
            horizon,
            windows,
            kind,
            params: Some(params),
        }
    }

    pub fn empty(horizon: f64) -> Self {
        Self {
            horizon,
            windows: Vec::new(),
            kind: AttackKind::Explicit,
            params: None,
        }
    }

    /// Single window spanning the whole horizon.
    pub fn covering(horizon: f64) -> Self {
        Self {
            horizon,
            windows: vec![Interval::new(0.0, horizon)],
            kind: AttackKind::Explicit,
            params: None,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn windows(&self) -> &[Interval] {
        &self.windows
    }

    pub fn kind(&self) -> AttackKind {
        self.kind
    }

    pub fn params(&self) -> Option<&AttackParams> {
        self.params.as_ref()
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }
}
