//! Protocol runs over a network of data/ancilla/decoy nodes.
//!
//! Node `k` owns sites `3k` (data), `3k + 1` (ancilla) and `3k + 2`
//! (decoy). The payload starts in the ancillas. Each on-time block runs
//! reset (data and decoys to `|0⟩`), swap-in, online, swap-out, so at the
//! end of every block the payload is back in the ancillas.
//!
//! An attack window fires its channel once. A window that meets a block
//! fires in the first block it meets: before swap-in if it only touches the
//! reset phase, otherwise while the payload sits in the data sites. A window
//! that meets no block fires during the gap, while the payload is quarantined.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{self, C64, ZERO};
use crate::mc::{
    overlap_pairs, sample_attacks_with, sample_on_times_counted, AttackKind, AttackTrace, CyclePhase, Interval,
    LengthDist, OnTimeSchedule, SamplingError, DEFAULT_REJECTION_CAP,
};
use crate::qstate::{
    apply_channel, bell_vector, fidelity, partial_trace, DensityState, KrausChannel, QuantumError,
    SiteLayout, SiteRole,
};
use crate::rng::run_trials;
use crate::schedule::{AttackParams, CycleParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error("schedule horizon {schedule} differs from attack horizon {attacks}")]
    HorizonMismatch { schedule: f64, attacks: f64 },
    #[error("network needs at least one node")]
    NoNodes,
    #[error("payload has length {found}, expected {expected}")]
    PayloadDimension { expected: usize, found: usize },
    #[error("trials must be at least 1")]
    NoTrials,
}

/// State stored across the ancillas of all nodes (node 0 most significant).
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    /// Bell pairs on nodes (0,1), (2,3), ...; a trailing odd node holds `|0⟩`.
    BellChain,
    /// `|+⟩` on every node.
    Product,
    Custom(Vec<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub nodes: usize,
    /// Local dimension shared by every site.
    pub dim: usize,
    pub payload: Payload,
}

impl NetworkConfig {
    pub fn new(nodes: usize, dim: usize, payload: Payload) -> Self {
        Self { nodes, dim, payload }
    }

    pub fn bell_chain(nodes: usize) -> Self {
        Self::new(nodes, 2, Payload::BellChain)
    }

    pub fn layout(&self) -> Result<SiteLayout, ProtocolError> {
        if self.nodes == 0 {
            return Err(ProtocolError::NoNodes);
        }
        Ok(SiteLayout::network(self.nodes, self.dim)?)
    }

    pub fn data_site(node: usize) -> usize {
        3 * node
    }

    pub fn ancilla_site(node: usize) -> usize {
        3 * node + 1
    }

    pub fn decoy_site(node: usize) -> usize {
        3 * node + 2
    }

    /// Payload vector on the ancillas, length `dim^nodes`.
    pub fn payload_vector(&self) -> Result<Vec<C64>, ProtocolError> {
        let d = self.dim;
        let expected = d.pow(self.nodes as u32);
        let v = match &self.payload {
            Payload::BellChain => {
                let mut v = vec![C64::new(1.0, 0.0)];
                let mut k = 0;
                while k < self.nodes {
                    v = if k + 1 < self.nodes {
                        matrix::kron_ket(&v, &bell_vector(d, d))
                    } else {
                        matrix::kron_ket(&v, &matrix::basis_ket(d, 0))
                    };
                    k += 2;
                }
                v
            }
            Payload::Product => {
                let mut plus = vec![ZERO; d];
                plus[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                plus[1] = plus[0];
                (0..self.nodes).fold(vec![C64::new(1.0, 0.0)], |v, _| matrix::kron_ket(&v, &plus))
            }
            Payload::Custom(v) => v.clone(),
        };
        if v.len() != expected {
            return Err(ProtocolError::PayloadDimension {
                expected,
                found: v.len(),
            });
        }
        Ok(v)
    }

    /// Payload in the ancillas, data and decoys in `|0⟩`.
    pub fn initial_state(&self) -> Result<DensityState, ProtocolError> {
        let layout = self.layout()?;
        let payload = self.payload_vector()?;
        let strides: Vec<usize> = (0..self.nodes).map(|k| layout.stride(Self::ancilla_site(k))).collect();
        let mut ket = vec![ZERO; layout.total_dim()];
        for (j, amp) in payload.iter().enumerate() {
            let mut rest = j;
            let mut index = 0;
            for k in (0..self.nodes).rev() {
                index += (rest % self.dim) * strides[k];
                rest /= self.dim;
            }
            ket[index] = *amp;
        }
        Ok(DensityState::from_pure(layout, &ket)?)
    }
}

/// Sites a malware channel reaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    /// Data sites during blocks, decoys in between.
    #[default]
    OnlineSites,
    /// Decoys only.
    DecoysOnly,
    /// Data and decoys at all times.
    AnyExposed,
}

impl Scope {
    fn roles(self, in_block: bool) -> &'static [SiteRole] {
        match (self, in_block) {
            (Scope::OnlineSites, true) => &[SiteRole::Data],
            (Scope::OnlineSites, false) | (Scope::DecoysOnly, _) => &[SiteRole::Decoy],
            (Scope::AnyExposed, _) => &[SiteRole::Data, SiteRole::Decoy],
        }
    }
}

/// Single-site channel template plus its scope.
#[derive(Debug, Clone, PartialEq)]
pub struct MalwarePolicy {
    pub channel: KrausChannel,
    pub scope: Scope,
}

impl MalwarePolicy {
    pub fn new(channel: KrausChannel, scope: Scope) -> Self {
        Self { channel, scope }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub final_fidelity: f64,
    pub overlap_count: u64,
    /// Block phase at the start of every (block, window) intersection.
    pub hit_phases: Vec<CyclePhase>,
    /// Windows that met no block and hit only quarantined sites.
    pub decoy_attacks_absorbed: u64,
    pub catastrophic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Firing {
    Gap,
    BeforeSwap(usize),
    Exposed(usize),
}

fn fire(
    state: DensityState,
    policy: &MalwarePolicy,
    in_block: bool,
) -> Result<DensityState, ProtocolError> {
    let roles = policy.scope.roles(in_block);
    let targets: Vec<usize> = (0..state.layout().len())
        .filter(|&s| roles.contains(&state.layout().sites()[s].role))
        .collect();
    let mut state = state;
    for s in targets {
        state = apply_channel(&state, &policy.channel.retarget(vec![s]))?.state;
    }
    Ok(state)
}

pub fn run_protocol(
    config: &NetworkConfig,
    schedule: &OnTimeSchedule,
    attacks: &AttackTrace,
    policy: &MalwarePolicy,
) -> Result<RunReport, ProtocolError> {
    if schedule.horizon() != attacks.horizon() {
        return Err(ProtocolError::HorizonMismatch {
            schedule: schedule.horizon(),
            attacks: attacks.horizon(),
        });
    }
    if policy.channel.target_sites().len() != 1 || policy.channel.local_dim() != config.dim {
        return Err(QuantumError::DimensionMismatch {
            expected: config.dim,
            found: policy.channel.local_dim(),
        }
        .into());
    }
    let mut state = config.initial_state()?;
    let payload = config.payload_vector()?;
    let windows = attacks.windows();
    let overlaps = overlap_pairs(schedule, attacks);
    let cycle = schedule.cycle();

    let mut firing = vec![Firing::Gap; windows.len()];
    let mut assigned = vec![false; windows.len()];
    for p in &overlaps {
        if assigned[p.window] {
            continue;
        }
        assigned[p.window] = true;
        let on = schedule.on_times()[p.block];
        let exposed = Interval::new(on + cycle.tau_reset, on + cycle.duration());
        firing[p.window] = if windows[p.window].intersects(&exposed) {
            Firing::Exposed(p.block)
        } else {
            Firing::BeforeSwap(p.block)
        };
    }

    let resettable: Vec<usize> = (0..config.nodes)
        .flat_map(|k| [NetworkConfig::data_site(k), NetworkConfig::decoy_site(k)])
        .collect();
    // S = iP per node; S† differs from S by a sign, so both conjugations
    // reduce to the exchange.
    let pairs_da: Vec<(usize, usize)> = (0..config.nodes)
        .map(|k| (NetworkConfig::data_site(k), NetworkConfig::ancilla_site(k)))
        .collect();

    let mut next = 0;
    for (i, block) in schedule.blocks().enumerate() {
        while next < windows.len() && windows[next].start < block.start {
            if firing[next] == Firing::Gap {
                state = fire(state, policy, false)?;
            }
            next += 1;
        }
        state = state.reset_sites(&resettable)?;
        for f in &firing {
            if *f == Firing::BeforeSwap(i) {
                state = fire(state, policy, true)?;
            }
        }
        state = state.exchange_sites(&pairs_da)?;
        for f in &firing {
            if *f == Firing::Exposed(i) {
                state = fire(state, policy, true)?;
            }
        }
        // Online communication is identity evolution on the payload.
        state = state.exchange_sites(&pairs_da)?;
    }
    for f in &firing[next..] {
        if *f == Firing::Gap {
            state = fire(state, policy, false)?;
        }
    }

    let ancillas: Vec<usize> = (0..config.nodes).map(NetworkConfig::ancilla_site).collect();
    let reduced = partial_trace(&state, &ancillas)?;
    let final_fidelity = fidelity(&reduced, &payload)?;
    let overlap_count = overlaps.len() as u64;
    Ok(RunReport {
        final_fidelity,
        overlap_count,
        hit_phases: overlaps.iter().map(|p| p.phase).collect(),
        decoy_attacks_absorbed: firing.iter().filter(|f| **f == Firing::Gap).count() as u64,
        catastrophic: overlap_count > 0,
    })
}

/// Where a sweep's attack traces come from.
#[derive(Debug, Clone, PartialEq)]
pub enum AttackSource {
    /// A fresh trace per trial.
    Sampled {
        params: AttackParams,
        kind: AttackKind,
        lengths: LengthDist,
    },
    /// The same trace in every trial.
    Fixed(AttackTrace),
}

/// Parameters of a repeated experiment with a fresh schedule per trial.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub horizon: f64,
    pub on_count: u64,
    pub cycle: CycleParams,
    pub attacks: AttackSource,
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub catastrophe_rate: f64,
    /// Binomial standard error of `catastrophe_rate`.
    pub stderr: f64,
    pub mean_fidelity: f64,
    pub fidelity_stderr: f64,
    pub mean_overlap_count: f64,
    pub windows_total: u64,
    pub absorbed_total: u64,
    pub trials: u64,
}

pub fn sweep_experiment(
    seed: u64,
    config: &NetworkConfig,
    spec: &SweepSpec,
    policy: &MalwarePolicy,
) -> Result<SweepResult, ProtocolError> {
    if spec.trials == 0 {
        return Err(ProtocolError::NoTrials);
    }
    let reports = run_trials(seed, spec.trials, |_, rng| {
        let (schedule, _) =
            sample_on_times_counted(rng, spec.horizon, spec.on_count, spec.cycle, DEFAULT_REJECTION_CAP)?;
        let sampled;
        let trace = match &spec.attacks {
            AttackSource::Sampled { params, kind, lengths } => {
                sampled = sample_attacks_with(rng, spec.horizon, *params, *kind, *lengths)?;
                &sampled
            }
            AttackSource::Fixed(trace) => trace,
        };
        let r = run_protocol(config, &schedule, trace, policy)?;
        Ok::<_, ProtocolError>((r, trace.len() as u64))
    })?;
    let n = spec.trials as f64;
    let rate = reports.iter().filter(|(r, _)| r.catastrophic).count() as f64 / n;
    let mean_fidelity = reports.iter().map(|(r, _)| r.final_fidelity).sum::<f64>() / n;
    let var = if spec.trials > 1 {
        reports
            .iter()
            .map(|(r, _)| (r.final_fidelity - mean_fidelity).powi(2))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    Ok(SweepResult {
        catastrophe_rate: rate,
        stderr: (rate * (1.0 - rate) / n).sqrt(),
        mean_fidelity,
        fidelity_stderr: (var / n).sqrt(),
        mean_overlap_count: reports.iter().map(|(r, _)| r.overlap_count).sum::<u64>() as f64 / n,
        windows_total: reports.iter().map(|(_, w)| w).sum(),
        absorbed_total: reports.iter().map(|(r, _)| r.decoy_attacks_absorbed).sum(),
        trials: spec.trials,
    })
}
