//! Closed-form timing analytics for the randomized on-time defense.
//!
//! All quantities are pure functions of the defender's cycle timing, the
//! horizon, and the attacker's mean burst statistics. Time is an abstract
//! real-valued unit throughout.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default fraction of the unit-overlap bound treated as "safely below" it.
pub const DEFAULT_SAFETY_FRACTION: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("{field} must be finite and non-negative, got {value}")]
    Negative { field: &'static str, value: f64 },
    #[error("{field} must be finite and positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("exclusion window δ+τ = {window} exceeds horizon T = {horizon}")]
    WindowExceedsHorizon { window: f64, horizon: f64 },
    #[error("cycle duration τ_O + 2τ_S + τ_R must be positive")]
    EmptyCycle,
    #[error("probability {value} outside [0, 1]")]
    BadProbability { value: f64 },
}

fn non_negative(field: &'static str, value: f64) -> Result<f64, ScheduleError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(ScheduleError::Negative { field, value })
    }
}

fn positive(field: &'static str, value: f64) -> Result<f64, ScheduleError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ScheduleError::NonPositive { field, value })
    }
}

/// Phase durations of a single protocol cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleParams {
    pub tau_online: f64,
    pub tau_swap: f64,
    pub tau_reset: f64,
}

impl CycleParams {
    /// Validated constructor; the derived cycle length must be positive.
    pub fn new(tau_online: f64, tau_swap: f64, tau_reset: f64) -> Result<Self, ScheduleError> {
        let c = Self::unchecked(tau_online, tau_swap, tau_reset)?;
        if c.duration() <= 0.0 {
            return Err(ScheduleError::EmptyCycle);
        }
        Ok(c)
    }

    /// Only checks non-negativity; allows an all-zero cycle.
    pub fn unchecked(tau_online: f64, tau_swap: f64, tau_reset: f64) -> Result<Self, ScheduleError> {
        Ok(Self {
            tau_online: non_negative("tau_online", tau_online)?,
            tau_swap: non_negative("tau_swap", tau_swap)?,
            tau_reset: non_negative("tau_reset", tau_reset)?,
        })
    }

    /// A cycle spent entirely online, for experiments that only care about τ.
    pub fn online_only(tau: f64) -> Result<Self, ScheduleError> {
        Self::new(tau, 0.0, 0.0)
    }

    pub fn duration(&self) -> f64 {
        cycle_duration(self)
    }
}

/// τ = τ_O + 2τ_S + τ_R
pub fn cycle_duration(cycle: &CycleParams) -> f64 {
    cycle.tau_online + 2.0 * cycle.tau_swap + cycle.tau_reset
}

/// Attacker burst statistics: θ is the mean gap, δ the mean burst length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackParams {
    pub mean_interval: f64,
    pub mean_length: f64,
}

impl AttackParams {
    pub fn new(mean_interval: f64, mean_length: f64) -> Result<Self, ScheduleError> {
        Ok(Self {
            mean_interval: positive("mean_interval", mean_interval)?,
            mean_length: positive("mean_length", mean_length)?,
        })
    }
}

/// Horizon T with M on-times; the density c = M/T is always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonParams {
    total_time: f64,
    on_count: u64,
}

impl HorizonParams {
    pub fn new(total_time: f64, on_count: u64) -> Result<Self, ScheduleError> {
        Ok(Self {
            total_time: positive("total_time", total_time)?,
            on_count,
        })
    }

    /// Horizon carrying `M = round(c·T)` on-times.
    pub fn from_density(total_time: f64, density: f64) -> Result<Self, ScheduleError> {
        positive("density", density)?;
        Self::new(total_time, (density * total_time).round() as u64)
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn on_count(&self) -> u64 {
        self.on_count
    }

    pub fn density(&self) -> f64 {
        self.on_count as f64 / self.total_time
    }
}

fn clamp_probability(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// Probability that a single attack window of length δ misses one randomly
/// placed on-block of length τ: `[T − (δ+τ)]/T`.
pub fn q1(total_time: f64, delta: f64, tau: f64) -> Result<f64, ScheduleError> {
    let total_time = positive("total_time", total_time)?;
    let delta = non_negative("delta", delta)?;
    let tau = non_negative("tau", tau)?;
    let window = delta + tau;
    if window > total_time {
        return Err(ScheduleError::WindowExceedsHorizon {
            window,
            horizon: total_time,
        });
    }
    Ok(clamp_probability((total_time - window) / total_time))
}

/// `q₁^M`: independent-placement approximation for M on-blocks.
pub fn q_no_overlap(q1: f64, on_count: u64) -> Result<f64, ScheduleError> {
    if !(0.0..=1.0).contains(&q1) {
        return Err(ScheduleError::BadProbability { value: q1 });
    }
    Ok(clamp_probability(q1.powf(on_count as f64)))
}

/// `p = 1 − q₁^M`, the probability that a given attack window hits at least one block.
pub fn p_catastrophe(total_time: f64, on_count: u64, delta: f64, tau: f64) -> Result<f64, ScheduleError> {
    let q = q1(total_time, delta, tau)?;
    Ok(clamp_probability(1.0 - q_no_overlap(q, on_count)?))
}

/// Large-horizon limit of [`p_catastrophe`] at fixed density `c = M/T`:
/// `1 − exp[−c(δ+τ)]`.
pub fn p_asymptotic(density: f64, delta: f64, tau: f64) -> Result<f64, ScheduleError> {
    let density = positive("density", density)?;
    let delta = non_negative("delta", delta)?;
    let tau = non_negative("tau", tau)?;
    // exp_m1 keeps full precision in the small-argument regime.
    Ok(clamp_probability(-(-density * (delta + tau)).exp_m1()))
}

/// Expected number of catastrophic overlaps over the horizon,
/// `A·p` with `A = T/(θ+δ)` attack windows on average.
pub fn expected_overlaps(
    total_time: f64,
    theta: f64,
    delta: f64,
    tau: f64,
    on_count: u64,
) -> Result<f64, ScheduleError> {
    let theta = non_negative("theta", theta)?;
    let delta_checked = non_negative("delta", delta)?;
    if theta + delta_checked <= 0.0 {
        return Err(ScheduleError::NonPositive {
            field: "theta + delta",
            value: theta + delta_checked,
        });
    }
    let p = p_catastrophe(total_time, on_count, delta, tau)?;
    Ok(total_time / (theta + delta) * p)
}

/// First-order expansion of [`expected_overlaps`] for δ, τ ≪ T:
/// `M(δ+τ)/(θ+δ)`.
pub fn expected_overlaps_linearized(theta: f64, delta: f64, tau: f64, on_count: u64) -> f64 {
    on_count as f64 * (delta + tau) / (theta + delta)
}

/// Unit-overlap bound on the number of on-times, `(δ+θ)/(δ+τ)`.
pub fn max_safe_on_times(delta: f64, theta: f64, tau: f64) -> Result<f64, ScheduleError> {
    let delta = non_negative("delta", delta)?;
    let theta = non_negative("theta", theta)?;
    let tau = non_negative("tau", tau)?;
    if delta + tau <= 0.0 {
        return Err(ScheduleError::NonPositive {
            field: "delta + tau",
            value: delta + tau,
        });
    }
    Ok((delta + theta) / (delta + tau))
}

/// `M` is treated as safe when it is at most `fraction` of the unit-overlap bound.
pub fn is_safe_on_count(on_count: u64, bound: f64, fraction: f64) -> bool {
    on_count as f64 <= fraction * bound
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cycle_duration_examples() {
        let zero = CycleParams::unchecked(0.0, 0.0, 0.0).unwrap();
        assert_eq!(cycle_duration(&zero), 0.0);
        assert_eq!(cycle_duration(&CycleParams::new(1.0, 0.25, 0.5).unwrap()), 2.0);
        assert_eq!(cycle_duration(&CycleParams::new(0.0, 0.5, 0.0).unwrap()), 1.0);
        assert_eq!(CycleParams::new(0.0, 0.0, 0.0), Err(ScheduleError::EmptyCycle));
        assert!(CycleParams::new(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn q1_examples() {
        assert!(close(q1(100.0, 1.0, 1.0).unwrap(), 0.98, 1e-15));
        assert_eq!(q1(7.5, 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(q1(10.0, 6.0, 4.0).unwrap(), 0.0);
        assert!(matches!(
            q1(10.0, 6.0, 4.5),
            Err(ScheduleError::WindowExceedsHorizon { .. })
        ));
    }

    #[test]
    fn q_no_overlap_examples() {
        assert_eq!(q_no_overlap(0.98, 0).unwrap(), 1.0);
        assert_eq!(q_no_overlap(1.0, 1000).unwrap(), 1.0);
        assert!(close(q_no_overlap(0.98, 10).unwrap(), 0.8170728068875467, 1e-12));
        assert!(q_no_overlap(1.5, 1).is_err());
    }

    #[test]
    fn p_catastrophe_examples() {
        assert_eq!(p_catastrophe(50.0, 0, 3.0, 2.0).unwrap(), 0.0);
        assert!(close(p_catastrophe(100.0, 10, 1.0, 1.0).unwrap(), 0.1829271931124533, 1e-12));
        assert_eq!(p_catastrophe(10.0, 1, 6.0, 4.0).unwrap(), 1.0);
        assert!(p_catastrophe(10.0, 1, 6.0, 5.0).is_err());
    }

    #[test]
    fn p_asymptotic_examples() {
        assert_eq!(p_asymptotic(0.3, 0.0, 0.0).unwrap(), 0.0);
        assert!(close(p_asymptotic(0.01, 2.0, 1.0).unwrap(), 0.029554466451491845, 1e-15));
        let small = p_asymptotic(0.001, 1.0, 0.5).unwrap();
        assert!(close(small, 0.0014988755622891148, 1e-15));
        assert!((small - 0.0015).abs() / 0.0015 < 1e-3);
    }

    #[test]
    fn expected_overlaps_examples() {
        assert_eq!(expected_overlaps(1000.0, 50.0, 2.0, 1.0, 0).unwrap(), 0.0);
        let ap = expected_overlaps(1000.0, 50.0, 2.0, 1.0, 10).unwrap();
        assert!(close(ap, 0.5691965971362148, 1e-12));
        let full = expected_overlaps(1e6, 50.0, 2.0, 1.0, 10).unwrap();
        let lin = expected_overlaps_linearized(50.0, 2.0, 1.0, 10);
        assert!((full - lin).abs() / lin < 0.01);
        assert!(expected_overlaps(10.0, 50.0, 8.0, 3.0, 1).is_err());
    }

    #[test]
    fn max_safe_on_times_examples() {
        assert_eq!(max_safe_on_times(1.0, 99.0, 1.0).unwrap(), 50.0);
        assert_eq!(max_safe_on_times(1.0, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(max_safe_on_times(2.0, 998.0, 0.0).unwrap(), 500.0);
        assert!(max_safe_on_times(0.0, 5.0, 0.0).is_err());
        assert!(is_safe_on_count(5, 50.0, DEFAULT_SAFETY_FRACTION));
        assert!(!is_safe_on_count(6, 50.0, DEFAULT_SAFETY_FRACTION));
    }

    #[test]
    fn horizon_density_is_derived() {
        let h = HorizonParams::new(1000.0, 10).unwrap();
        assert_eq!(h.density(), 0.01);
        let h = HorizonParams::from_density(1e5, 0.01).unwrap();
        assert_eq!(h.on_count(), 1000);
        assert!(HorizonParams::new(0.0, 1).is_err());
    }

    #[test]
    fn attack_params_positive() {
        assert!(AttackParams::new(0.0, 1.0).is_err());
        assert!(AttackParams::new(1.0, -1.0).is_err());
        assert!(AttackParams::new(50.0, 2.0).is_ok());
    }
}
