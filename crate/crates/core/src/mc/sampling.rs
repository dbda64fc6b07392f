use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::{AttackKind, AttackTrace, Interval, LengthDist, OnTimeSchedule, SamplingError};
use crate::rng::{root_rng, TrialRng};
use crate::schedule::{AttackParams, CycleParams, ScheduleError};

pub const DEFAULT_REJECTION_CAP: u64 = 1_000_000;

/// Draws `M` on-times i.i.d. uniform on `[0, T−τ]`, redrawing the whole set
/// until all blocks are pairwise disjoint. Deterministic in `seed`.
pub fn sample_on_times(
    seed: u64,
    horizon: f64,
    on_count: u64,
    cycle: CycleParams,
) -> Result<OnTimeSchedule, SamplingError> {
    sample_on_times_with(&mut root_rng(seed), horizon, on_count, cycle)
}

pub fn sample_on_times_with(
    rng: &mut TrialRng,
    horizon: f64,
    on_count: u64,
    cycle: CycleParams,
) -> Result<OnTimeSchedule, SamplingError> {
    sample_on_times_counted(rng, horizon, on_count, cycle, DEFAULT_REJECTION_CAP).map(|(s, _)| s)
}

/// Like [`sample_on_times_with`], also returning how many whole-set draws were needed.
pub fn sample_on_times_counted(
    rng: &mut TrialRng,
    horizon: f64,
    on_count: u64,
    cycle: CycleParams,
    rejection_cap: u64,
) -> Result<(OnTimeSchedule, u64), SamplingError> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(ScheduleError::NonPositive {
            field: "total_time",
            value: horizon,
        }
        .into());
    }
    if on_count == 0 {
        return Ok((OnTimeSchedule::empty(horizon, cycle), 0));
    }
    let tau = cycle.duration();
    let total = on_count as f64 * tau;
    // Two or more blocks filling the horizon exactly is a measure-zero event
    // under continuous sampling.
    if total > horizon || (on_count >= 2 && total >= horizon) {
        return Err(SamplingError::Infeasible {
            on_count,
            tau,
            horizon,
        });
    }
    let span = horizon - tau;
    let mut times = vec![0.0; on_count as usize];
    for attempt in 1..=rejection_cap {
        for t in times.iter_mut() {
            *t = rng.random_range(0.0..=span);
        }
        times.sort_by(f64::total_cmp);
        let disjoint = times.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] >= tau);
        if disjoint {
            let schedule = OnTimeSchedule::new(horizon, cycle, times)?;
            return Ok((schedule, attempt));
        }
    }
    Err(SamplingError::RejectionCapExceeded {
        attempts: rejection_cap,
    })
}

fn draw_length(rng: &mut TrialRng, params: &AttackParams, lengths: LengthDist) -> f64 {
    match lengths {
        LengthDist::Fixed => params.mean_length,
        LengthDist::Exponential => Exp::new(1.0 / params.mean_length)
            .expect("mean length validated positive")
            .sample(rng),
    }
}

fn draw_gap(rng: &mut TrialRng, params: &AttackParams, kind: AttackKind) -> f64 {
    let theta = params.mean_interval;
    match kind {
        AttackKind::FixedPeriod => theta,
        AttackKind::UniformJitter => rng.random_range(0.5 * theta..=1.5 * theta),
        AttackKind::ExponentialGap => Exp::new(1.0 / theta)
            .expect("mean interval validated positive")
            .sample(rng),
        AttackKind::SingleUniform | AttackKind::Explicit => unreachable!("not a renewal kind"),
    }
}

/// Generates an attack trace over `[0, T]`.
///
/// Renewal kinds alternate gap, window, gap, window, ... from time 0 until a
/// window would start at or past `T`; the last window is clipped to `T`.
pub fn sample_attacks(
    seed: u64,
    horizon: f64,
    params: AttackParams,
    kind: AttackKind,
    lengths: LengthDist,
) -> Result<AttackTrace, SamplingError> {
    sample_attacks_with(&mut root_rng(seed), horizon, params, kind, lengths)
}

pub fn sample_attacks_with(
    rng: &mut TrialRng,
    horizon: f64,
    params: AttackParams,
    kind: AttackKind,
    lengths: LengthDist,
) -> Result<AttackTrace, SamplingError> {
    let params = AttackParams::new(params.mean_interval, params.mean_length)?;
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(ScheduleError::NonPositive {
            field: "total_time",
            value: horizon,
        }
        .into());
    }
    match kind {
        AttackKind::SingleUniform => {
            let length = draw_length(rng, &params, lengths).min(horizon);
            return single_window_with(rng, horizon, length).map(|w| {
                AttackTrace::generated(horizon, vec![w], AttackKind::SingleUniform, params)
            });
        }
        AttackKind::Explicit => {
            return Err(SamplingError::InvalidIntervals(
                "explicit traces are built with AttackTrace::from_windows".into(),
            ))
        }
        _ => {}
    }
    let mut windows = Vec::new();
    let mut t = 0.0;
    loop {
        let start = t + draw_gap(rng, &params, kind);
        if start >= horizon {
            break;
        }
        let end = (start + draw_length(rng, &params, lengths)).min(horizon);
        windows.push(Interval::new(start, end));
        t = end;
    }
    Ok(AttackTrace::generated(horizon, windows, kind, params))
}

/// One window of the given length, start uniform on `[0, T − length]`.
pub fn single_window_with(rng: &mut TrialRng, horizon: f64, length: f64) -> Result<Interval, SamplingError> {
    if !(length.is_finite() && length >= 0.0) {
        return Err(ScheduleError::Negative {
            field: "delta",
            value: length,
        }
        .into());
    }
    if length > horizon {
        return Err(SamplingError::WindowTooLong { length, horizon });
    }
    let start = rng.random_range(0.0..=horizon - length);
    Ok(Interval::new(start, (start + length).min(horizon)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    fn online(tau: f64) -> CycleParams {
        CycleParams::online_only(tau).unwrap()
    }

    #[test]
    fn empty_schedule_for_zero_on_times() {
        let s = sample_on_times(1, 10.0, 0, online(1.0)).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn single_on_time_mean_is_uniform_midpoint() {
        // T0 ~ U[0, 9]: mean 4.5, sd 9/√12.
        let n = 100_000u64;
        let sum: f64 = (0..n)
            .map(|t| {
                let mut rng = trial_rng(2024, t);
                sample_on_times_with(&mut rng, 10.0, 1, online(1.0)).unwrap().on_times()[0]
            })
            .sum();
        let mean = sum / n as f64;
        let sigma = 9.0 / 12f64.sqrt() / (n as f64).sqrt();
        assert!((mean - 4.5).abs() <= 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn pigeonhole_rejects_exact_fill() {
        let err = sample_on_times(3, 3.0, 3, online(1.0)).unwrap_err();
        assert!(matches!(err, SamplingError::Infeasible { .. }));
        assert!(sample_on_times(3, 3.0, 4, online(1.0)).is_err());
        // a single block may fill the horizon
        let s = sample_on_times(3, 3.0, 1, online(3.0)).unwrap();
        assert_eq!(s.on_times(), &[0.0]);
    }

    #[test]
    fn rejection_cap_signals_over_dense_request() {
        let mut rng = trial_rng(5, 0);
        let err = sample_on_times_counted(&mut rng, 10.0, 9, online(1.0), 50).unwrap_err();
        assert_eq!(err, SamplingError::RejectionCapExceeded { attempts: 50 });
    }

    #[test]
    fn sampled_blocks_are_disjoint_and_inside() {
        for seed in 0..200 {
            let s = sample_on_times(seed, 100.0, 12, online(2.0)).unwrap();
            let blocks: Vec<_> = s.blocks().collect();
            assert!(blocks.iter().all(|b| b.start >= 0.0 && b.end <= 100.0));
            assert!(blocks.windows(2).all(|w| w[0].end <= w[1].start));
        }
    }

    #[test]
    fn fixed_period_trace_enumerates() {
        let p = AttackParams::new(10.0, 1.0).unwrap();
        let trace = sample_attacks(0, 100.0, p, AttackKind::FixedPeriod, LengthDist::Fixed).unwrap();
        assert_eq!(trace.len(), 9);
        assert_eq!(trace.windows()[0], Interval::new(10.0, 11.0));
        assert_eq!(trace.windows()[1], Interval::new(21.0, 22.0));
        assert_eq!(trace.windows()[8], Interval::new(98.0, 99.0));
        let none = sample_attacks(0, 5.0, p, AttackKind::FixedPeriod, LengthDist::Fixed).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn last_window_is_clipped_to_horizon() {
        let p = AttackParams::new(10.0, 5.0).unwrap();
        let trace = sample_attacks(0, 42.0, p, AttackKind::FixedPeriod, LengthDist::Fixed).unwrap();
        assert_eq!(trace.windows().last().unwrap(), &Interval::new(40.0, 42.0));
    }

    #[test]
    fn exponential_gap_count_matches_renewal_rate() {
        // Delayed renewal: first start after Exp(θ), then cycles of δ + Exp(θ).
        // A = T/(θ+δ) = 192.3; sd of the count ≈ sqrt(T·Var/μ³).
        let p = AttackParams::new(50.0, 2.0).unwrap();
        let n = 1000u64;
        let counts: Vec<f64> = (0..n)
            .map(|t| {
                let mut rng = trial_rng(77, t);
                sample_attacks_with(&mut rng, 1e4, p, AttackKind::ExponentialGap, LengthDist::Fixed)
                    .unwrap()
                    .len() as f64
            })
            .collect();
        let mean = counts.iter().sum::<f64>() / n as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        let rate = 1e4 / 52.0;
        assert!((mean - rate).abs() <= 3.0 * se, "mean {mean} rate {rate} se {se}");
    }

    #[test]
    fn jitter_gaps_stay_in_band() {
        let p = AttackParams::new(10.0, 1.0).unwrap();
        let trace = sample_attacks(4, 1000.0, p, AttackKind::UniformJitter, LengthDist::Fixed).unwrap();
        let mut prev_end = 0.0;
        for w in trace.windows() {
            let gap = w.start - prev_end;
            assert!((5.0..=15.0).contains(&gap), "gap {gap}");
            prev_end = w.end;
        }
    }

    #[test]
    fn determinism_given_seed() {
        let p = AttackParams::new(20.0, 3.0).unwrap();
        let a = sample_attacks(11, 500.0, p, AttackKind::ExponentialGap, LengthDist::Exponential).unwrap();
        let b = sample_attacks(11, 500.0, p, AttackKind::ExponentialGap, LengthDist::Exponential).unwrap();
        assert_eq!(a, b);
        let s1 = sample_on_times(11, 500.0, 7, online(1.0)).unwrap();
        let s2 = sample_on_times(11, 500.0, 7, online(1.0)).unwrap();
        assert_eq!(s1, s2);
    }
}
