//! Experiment configuration.
//!
//! One JSON document per run. Every block is optional at parse time; each
//! subcommand requires the blocks it uses and validates them with the field
//! path in the message.

use std::path::Path;

use serde::{Deserialize, Serialize};
use swapguard_core::matrix::C64;
use swapguard_core::mc::{AttackKind, Interval, LengthDist};
use swapguard_core::protocol::{Payload, Scope};
use swapguard_core::schedule::{AttackParams, CycleParams};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<u64>,
    #[serde(default)]
    pub timing: Option<TimingConfig>,
    #[serde(default)]
    pub attack: Option<AttackConfig>,
    #[serde(default)]
    pub network: Option<NetworkBlock>,
    #[serde(default)]
    pub channel: Option<ChannelConfig>,
    #[serde(default)]
    pub assertions: Option<Assertions>,
    #[serde(default)]
    pub algebra: Option<AlgebraConfig>,
    #[serde(default)]
    pub shares: Option<SharesConfig>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingConfig {
    pub total_time: f64,
    pub tau_online: f64,
    #[serde(default)]
    pub tau_swap: f64,
    #[serde(default)]
    pub tau_reset: f64,
    /// Number of on-times for simulations.
    #[serde(default)]
    pub on_count: Option<u64>,
    /// Grid of on-time counts for `analyze`.
    #[serde(default)]
    pub on_counts: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackConfig {
    /// Mean gap θ between windows.
    #[serde(default)]
    pub mean_interval: Option<f64>,
    /// Mean window length δ.
    pub mean_length: f64,
    #[serde(default = "default_kind")]
    pub kind: AttackKind,
    #[serde(default)]
    pub lengths: LengthDist,
    /// Window list for the explicit kind, as `[start, end]` pairs.
    #[serde(default)]
    pub windows: Option<Vec<[f64; 2]>>,
}

fn default_kind() -> AttackKind {
    AttackKind::SingleUniform
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkBlock {
    pub nodes: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub payload: PayloadConfig,
    #[serde(default)]
    pub scope: Scope,
}

fn default_dim() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayloadConfig {
    #[default]
    BellChain,
    Product,
    /// Amplitudes as `[re, im]` pairs.
    Custom(Vec<[f64; 2]>),
}

impl PayloadConfig {
    pub fn to_payload(&self) -> Payload {
        match self {
            Self::BellChain => Payload::BellChain,
            Self::Product => Payload::Product,
            Self::Custom(v) => Payload::Custom(v.iter().map(|[re, im]| C64::new(*re, *im)).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChannelConfig {
    // Empty braces so stray keys are rejected.
    Identity {},
    FullyDepolarizing {},
    Erasure {},
    Leakage { gamma: f64 },
    Postselect { level: usize },
    Random { kraus_count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertions {
    #[serde(default)]
    pub mean_fidelity: Option<Target>,
    #[serde(default)]
    pub catastrophe_rate: Option<Target>,
    #[serde(default)]
    pub absorbed_equals_windows: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlgebraConfig {
    pub swap_dims: Vec<usize>,
    pub conjugation_dims: Vec<usize>,
    pub random_channels: usize,
    pub phis: Vec<f64>,
    pub bosonic_modes: usize,
    pub bosonic_n_max: usize,
    pub tolerance: f64,
    /// Perturbs one Kraus entry by 1e-6 to check that the harness notices.
    pub inject_fault: bool,
}

impl Default for AlgebraConfig {
    fn default() -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};
        Self {
            swap_dims: vec![2, 3, 4],
            conjugation_dims: vec![2, 3],
            random_channels: 20,
            phis: vec![0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2],
            bosonic_modes: 4,
            bosonic_n_max: 3,
            tolerance: 1e-10,
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharesConfig {
    #[serde(default)]
    pub secret: Option<u64>,
    pub k: usize,
    pub n: usize,
    #[serde(default = "default_prime")]
    pub prime: u64,
}

fn default_prime() -> u64 {
    65537
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub per_trial_csv: bool,
}

fn config_err(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {msg}"))
}

fn non_negative(path: &str, v: f64) -> Result<f64, CliError> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(config_err(path, format!("must be a finite value >= 0, got {v}")));
    }
    Ok(v)
}

fn positive(path: &str, v: f64) -> Result<f64, CliError> {
    if !(v.is_finite() && v > 0.0) {
        return Err(config_err(path, format!("must be a finite value > 0, got {v}")));
    }
    Ok(v)
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("{path}: {}", e.into_inner()))
        })?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(config_err(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", cfg.schema_version),
            ));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| config_err("seed", "required for stochastic subcommands"))
    }

    pub fn trials(&self) -> Result<u64, CliError> {
        match self.trials {
            None => Err(config_err("trials", "required")),
            Some(0) => Err(config_err("trials", "must be at least 1")),
            Some(t) => Ok(t),
        }
    }

    pub fn timing(&self) -> Result<&TimingConfig, CliError> {
        self.timing.as_ref().ok_or_else(|| config_err("timing", "block required"))
    }

    pub fn attack(&self) -> Result<&AttackConfig, CliError> {
        self.attack.as_ref().ok_or_else(|| config_err("attack", "block required"))
    }

    pub fn network(&self) -> Result<&NetworkBlock, CliError> {
        self.network.as_ref().ok_or_else(|| config_err("network", "block required"))
    }

    pub fn channel(&self) -> Result<&ChannelConfig, CliError> {
        self.channel.as_ref().ok_or_else(|| config_err("channel", "block required"))
    }
}

impl TimingConfig {
    pub fn horizon(&self) -> Result<f64, CliError> {
        positive("timing.total_time", self.total_time)
    }

    pub fn cycle(&self) -> Result<CycleParams, CliError> {
        let on = non_negative("timing.tau_online", self.tau_online)?;
        let swap = non_negative("timing.tau_swap", self.tau_swap)?;
        let reset = non_negative("timing.tau_reset", self.tau_reset)?;
        CycleParams::new(on, swap, reset).map_err(|e| config_err("timing", e))
    }

    pub fn on_count(&self) -> Result<u64, CliError> {
        self.on_count.ok_or_else(|| config_err("timing.on_count", "required"))
    }

    pub fn on_counts(&self) -> Result<Vec<u64>, CliError> {
        match (&self.on_counts, self.on_count) {
            (Some(v), _) if !v.is_empty() => Ok(v.clone()),
            (Some(_), _) => Err(config_err("timing.on_counts", "must be nonempty")),
            (None, Some(m)) => Ok(vec![m]),
            (None, None) => Err(config_err("timing.on_counts", "required")),
        }
    }
}

impl AttackConfig {
    pub fn delta(&self) -> Result<f64, CliError> {
        non_negative("attack.mean_length", self.mean_length)
    }

    pub fn theta(&self) -> Result<f64, CliError> {
        let theta = self
            .mean_interval
            .ok_or_else(|| config_err("attack.mean_interval", "required"))?;
        non_negative("attack.mean_interval", theta)
    }

    /// Renewal parameters; both means must be positive.
    pub fn params(&self) -> Result<AttackParams, CliError> {
        let theta = positive("attack.mean_interval", self.theta()?)?;
        let delta = positive("attack.mean_length", self.delta()?)?;
        AttackParams::new(theta, delta).map_err(|e| config_err("attack", e))
    }

    pub fn explicit_windows(&self) -> Result<Vec<Interval>, CliError> {
        let w = self
            .windows
            .as_ref()
            .ok_or_else(|| config_err("attack.windows", "required for the explicit kind"))?;
        Ok(w.iter().map(|[s, e]| Interval::new(*s, *e)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected_with_path() {
        let err = ExperimentConfig::from_json(r#"{"schema_version":1,"timing":{"total_time":1,"tau_online":1,"bogus":2}}"#)
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("timing"), "{msg}");
        assert!(msg.contains("bogus"), "{msg}");
        assert!(ExperimentConfig::from_json(r#"{"schema_version":1,"extra":0}"#).is_err());
    }

    #[test]
    fn schema_version_checked() {
        assert!(ExperimentConfig::from_json(r#"{"schema_version":2}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"schema_version":1}"#).is_ok());
    }

    #[test]
    fn negative_length_names_field() {
        let cfg = ExperimentConfig::from_json(r#"{"schema_version":1,"attack":{"mean_length":-2}}"#).unwrap();
        let msg = cfg.attack().unwrap().delta().unwrap_err().to_string();
        assert!(msg.contains("attack.mean_length"), "{msg}");
    }

    #[test]
    fn channel_tags() {
        let cfg = ExperimentConfig::from_json(
            r#"{"schema_version":1,"channel":{"type":"leakage","gamma":0.3},"network":{"nodes":2,"payload":{"custom":[[1,0],[0,0],[0,0],[0,0]]}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.channel().unwrap(), &ChannelConfig::Leakage { gamma: 0.3 });
        assert!(matches!(cfg.network().unwrap().payload, PayloadConfig::Custom(_)));
        assert!(ExperimentConfig::from_json(r#"{"schema_version":1,"channel":{"type":"erasure","gamma":1}}"#).is_err());
    }

    #[test]
    fn zero_trials_rejected() {
        let cfg = ExperimentConfig::from_json(r#"{"schema_version":1,"trials":0}"#).unwrap();
        assert!(cfg.trials().unwrap_err().to_string().contains("trials:"));
    }
}
