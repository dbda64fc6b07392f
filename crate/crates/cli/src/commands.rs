use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use swapguard_core::fock::{
    self, bch_identity_residual, particle_swap, qubit_restriction, shift_monomial_residual, FockRegister,
    LadderMonomial,
};
use swapguard_core::matrix::{basis_ket, kron_ket, ComplexMatrix, C64, I};
use swapguard_core::mc::{
    mean_and_stderr, overlap_count_trials, single_window_trials, AttackKind, AttackTrace,
};
use swapguard_core::protocol::{sweep_experiment, AttackSource, MalwarePolicy, NetworkConfig, Scope, SweepSpec};
use swapguard_core::qstate::{
    embedded_superoperator, exchange_operator, generalized_swap, heisenberg_swap, local_pauli, random_channel,
    swap_conjugated_superoperator, KrausChannel, PauliAxis, SiteLayout,
};
use swapguard_core::rng::trial_rng;
use swapguard_core::schedule;
use swapguard_core::secret::{self, Field, Share};

use crate::config::{AlgebraConfig, ChannelConfig, ExperimentConfig, Target, TimingConfig};
use crate::output::{fmt_float, to_csv};
use crate::CliError;

/// Largest pair dimension `d²` the SWAP checks accept.
pub const MAX_SWAP_PAIR_DIM: usize = 256;
/// Largest superoperator dimension `d⁴` the conjugation checks accept.
pub const MAX_SUPEROPERATOR_DIM: usize = 1024;

fn config_err(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {msg}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeRow {
    pub m: u64,
    pub q1: f64,
    pub q_m: f64,
    pub p: f64,
    pub p_asymptotic: f64,
    pub expected_overlaps: f64,
    pub eq1_bound: f64,
}

pub const ANALYZE_HEADER: [&str; 7] = ["M", "q1", "q_M", "p", "p_asymptotic", "expected_overlaps", "eq1_bound"];

pub fn cmd_analyze(cfg: &ExperimentConfig) -> Result<Vec<AnalyzeRow>, CliError> {
    let timing = cfg.timing()?;
    let attack = cfg.attack()?;
    let horizon = timing.horizon()?;
    let tau = timing.cycle()?.duration();
    let delta = attack.delta()?;
    let theta = attack.theta()?;
    let grid = timing.on_counts()?;
    let q1 = schedule::q1(horizon, delta, tau).map_err(|e| config_err("timing", e))?;
    let eq1_bound = schedule::max_safe_on_times(delta, theta, tau).map_err(|e| config_err("attack", e))?;
    grid.into_iter()
        .map(|m| {
            let err = |e| config_err("timing.on_counts", e);
            Ok(AnalyzeRow {
                m,
                q1,
                q_m: schedule::q_no_overlap(q1, m).map_err(err)?,
                p: schedule::p_catastrophe(horizon, m, delta, tau).map_err(err)?,
                p_asymptotic: if m == 0 {
                    0.0
                } else {
                    schedule::p_asymptotic(m as f64 / horizon, delta, tau).map_err(err)?
                },
                expected_overlaps: schedule::expected_overlaps(horizon, theta, delta, tau, m).map_err(err)?,
                eq1_bound,
            })
        })
        .collect()
}

pub fn analyze_csv(rows: &[AnalyzeRow]) -> String {
    to_csv(
        &ANALYZE_HEADER,
        rows.iter().map(|r| {
            let mut v = vec![r.m.to_string()];
            v.extend([r.q1, r.q_m, r.p, r.p_asymptotic, r.expected_overlaps, r.eq1_bound].map(fmt_float));
            v
        }),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum TimingReport {
    /// One uniformly placed window per trial; `p_hat` is the catastrophe frequency.
    SingleWindow {
        seed: u64,
        trials: u64,
        p_hat: f64,
        stderr: f64,
        analytic_p: f64,
        z_score: Option<f64>,
        acceptance: bool,
        acceptance_rate: f64,
    },
    /// Renewal attack traces; compares the mean overlap count with `A·p`.
    OverlapCount {
        seed: u64,
        trials: u64,
        mean_overlaps: f64,
        stderr: f64,
        analytic_expected_overlaps: f64,
        z_score: Option<f64>,
        relative_error: Option<f64>,
        acceptance: bool,
    },
}

impl TimingReport {
    pub fn acceptance(&self) -> bool {
        match self {
            Self::SingleWindow { acceptance, .. } | Self::OverlapCount { acceptance, .. } => *acceptance,
        }
    }
}

pub struct TimingRun {
    pub report: TimingReport,
    /// `trial,overlap_count` rows.
    pub per_trial_csv: String,
}

fn sampling_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("simulation: {e}"))
}

pub fn cmd_simulate_timing(cfg: &ExperimentConfig) -> Result<TimingRun, CliError> {
    let seed = cfg.seed()?;
    let trials = cfg.trials()?;
    let timing = cfg.timing()?;
    let attack = cfg.attack()?;
    let horizon = timing.horizon()?;
    let cycle = timing.cycle()?;
    let m = timing.on_count()?;
    let delta = attack.delta()?;
    let tau = cycle.duration();
    let (report, counts): (TimingReport, Vec<u64>) = match attack.kind {
        AttackKind::SingleUniform => {
            let per = single_window_trials(seed, horizon, m, cycle, delta, trials).map_err(sampling_err)?;
            let est = swapguard_core::mc::summarize_single_window(&per);
            let p_hat = 1.0 - est.p_hat;
            let analytic_p = schedule::p_catastrophe(horizon, m, delta, tau).map_err(sampling_err)?;
            let sigma = (analytic_p * (1.0 - analytic_p) / trials as f64).sqrt();
            let z_score = (sigma > 0.0).then(|| (p_hat - analytic_p) / sigma);
            let acceptance = match z_score {
                Some(z) => z.abs() <= 3.0,
                None => p_hat == analytic_p,
            };
            let report = TimingReport::SingleWindow {
                seed,
                trials,
                p_hat,
                stderr: est.stderr,
                analytic_p,
                z_score,
                acceptance,
                acceptance_rate: est.acceptance_rate,
            };
            (report, per.iter().map(|t| t.overlap_count).collect())
        }
        AttackKind::Explicit => {
            return Err(config_err("attack.kind", "simulate-timing needs a sampled attack kind"));
        }
        kind => {
            let params = attack.params()?;
            let counts = overlap_count_trials(seed, horizon, m, cycle, params, kind, attack.lengths, trials)
                .map_err(sampling_err)?;
            let est = mean_and_stderr(&counts);
            let analytic = schedule::expected_overlaps(horizon, params.mean_interval, delta, tau, m)
                .map_err(sampling_err)?;
            let gap = (est.mean - analytic).abs();
            let report = TimingReport::OverlapCount {
                seed,
                trials,
                mean_overlaps: est.mean,
                stderr: est.stderr,
                analytic_expected_overlaps: analytic,
                z_score: (est.stderr > 0.0).then(|| (est.mean - analytic) / est.stderr),
                relative_error: (analytic > 0.0).then(|| gap / analytic),
                acceptance: gap <= (0.05 * analytic).max(3.0 * est.stderr),
            };
            (report, counts)
        }
    };
    let per_trial_csv = to_csv(
        &["trial", "overlap_count"],
        counts.iter().enumerate().map(|(t, c)| vec![t.to_string(), c.to_string()]),
    );
    Ok(TimingRun { report, per_trial_csv })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssertionResult {
    pub name: String,
    pub expected: f64,
    pub tolerance: f64,
    pub observed: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumReport {
    pub seed: u64,
    pub trials: u64,
    pub nodes: usize,
    pub dim: usize,
    pub scope: Scope,
    pub catastrophe_rate: f64,
    pub stderr: f64,
    pub mean_fidelity: f64,
    pub fidelity_stderr: f64,
    pub mean_overlap_count: f64,
    pub windows_total: u64,
    pub absorbed_total: u64,
    pub assertions: Vec<AssertionResult>,
    pub pass: bool,
}

pub fn build_channel(cfg: &ChannelConfig, dim: usize, seed: u64) -> Result<KrausChannel, CliError> {
    let err = |e| config_err("channel", e);
    Ok(match *cfg {
        ChannelConfig::Identity {} => KrausChannel::identity(0, dim),
        ChannelConfig::FullyDepolarizing {} => KrausChannel::fully_depolarizing(0, dim),
        ChannelConfig::Erasure {} => KrausChannel::erasure(0, dim),
        ChannelConfig::Leakage { gamma } => KrausChannel::leakage(0, dim, gamma).map_err(err)?,
        ChannelConfig::Postselect { level } => KrausChannel::postselect(0, dim, level).map_err(err)?,
        ChannelConfig::Random { kraus_count } => {
            if kraus_count == 0 {
                return Err(config_err("channel.kraus_count", "must be at least 1"));
            }
            // Stream u64::MAX is never used by a trial.
            let mut rng = trial_rng(seed, u64::MAX);
            random_channel(&mut rng, dim, vec![0], kraus_count).map_err(err)?
        }
    })
}

fn check_target(name: &str, target: &Target, observed: f64) -> AssertionResult {
    AssertionResult {
        name: name.into(),
        expected: target.value,
        tolerance: target.tolerance,
        observed,
        pass: (observed - target.value).abs() <= target.tolerance,
    }
}

pub fn cmd_simulate_quantum(cfg: &ExperimentConfig) -> Result<QuantumReport, CliError> {
    let seed = cfg.seed()?;
    let trials = cfg.trials()?;
    let timing = cfg.timing()?;
    let attack = cfg.attack()?;
    let net = cfg.network()?;
    if net.dim < 2 {
        return Err(config_err("network.dim", "must be at least 2"));
    }
    let network = NetworkConfig::new(net.nodes, net.dim, net.payload.to_payload());
    network.layout().map_err(|e| config_err("network", e))?;
    network.payload_vector().map_err(|e| config_err("network.payload", e))?;
    let channel = build_channel(cfg.channel()?, net.dim, seed)?;
    let horizon = timing.horizon()?;
    let attacks = match attack.kind {
        AttackKind::Explicit => AttackSource::Fixed(
            AttackTrace::from_windows(horizon, attack.explicit_windows()?)
                .map_err(|e| config_err("attack.windows", e))?,
        ),
        AttackKind::SingleUniform => {
            let delta = attack.delta()?;
            let theta = attack.mean_interval.unwrap_or(1.0);
            AttackSource::Sampled {
                params: schedule::AttackParams::new(theta, delta).map_err(|e| config_err("attack", e))?,
                kind: AttackKind::SingleUniform,
                lengths: attack.lengths,
            }
        }
        kind => AttackSource::Sampled {
            params: attack.params()?,
            kind,
            lengths: attack.lengths,
        },
    };
    let spec = SweepSpec {
        horizon,
        on_count: timing.on_count()?,
        cycle: timing.cycle()?,
        attacks,
        trials,
    };
    let policy = MalwarePolicy::new(channel, net.scope);
    let r = sweep_experiment(seed, &network, &spec, &policy).map_err(sampling_err)?;
    let mut assertions = Vec::new();
    if let Some(a) = &cfg.assertions {
        if let Some(t) = &a.mean_fidelity {
            assertions.push(check_target("mean_fidelity", t, r.mean_fidelity));
        }
        if let Some(t) = &a.catastrophe_rate {
            assertions.push(check_target("catastrophe_rate", t, r.catastrophe_rate));
        }
        if a.absorbed_equals_windows {
            assertions.push(AssertionResult {
                name: "absorbed_equals_windows".into(),
                expected: r.windows_total as f64,
                tolerance: 0.0,
                observed: r.absorbed_total as f64,
                pass: r.absorbed_total == r.windows_total,
            });
        }
    }
    let pass = assertions.iter().all(|a| a.pass);
    Ok(QuantumReport {
        seed,
        trials,
        nodes: net.nodes,
        dim: net.dim,
        scope: net.scope,
        catastrophe_rate: r.catastrophe_rate,
        stderr: r.stderr,
        mean_fidelity: r.mean_fidelity,
        fidelity_stderr: r.fidelity_stderr,
        mean_overlap_count: r.mean_overlap_count,
        windows_total: r.windows_total,
        absorbed_total: r.absorbed_total,
        assertions,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub seed: u64,
    pub fault_injected: bool,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Accumulates named residual checks against one tolerance.
pub struct Checks {
    tolerance: f64,
    list: Vec<Check>,
}

impl Checks {
    pub fn new(tolerance: f64) -> Self {
        Self {
            tolerance,
            list: Vec::new(),
        }
    }

    pub fn into_vec(self) -> Vec<Check> {
        self.list
    }

    fn push(&mut self, name: impl Into<String>, residual: f64) {
        self.list.push(Check {
            name: name.into(),
            max_residual: residual,
            tolerance: self.tolerance,
            pass: residual.is_finite() && residual < self.tolerance,
        });
    }
}

pub fn validate_algebra(a: &AlgebraConfig) -> Result<(), CliError> {
    for &d in &a.swap_dims {
        if d < 2 || d * d > MAX_SWAP_PAIR_DIM {
            return Err(config_err(
                "algebra.swap_dims",
                format!("d={d} outside 2..=16 (pair dimension cap {MAX_SWAP_PAIR_DIM})"),
            ));
        }
    }
    for &d in &a.conjugation_dims {
        if d < 2 || d.pow(4) > MAX_SUPEROPERATOR_DIM {
            return Err(config_err(
                "algebra.conjugation_dims",
                format!("d={d} gives superoperator dimension {} above cap {MAX_SUPEROPERATOR_DIM}", d.pow(4)),
            ));
        }
    }
    if a.bosonic_modes < 4 || !a.bosonic_modes.is_multiple_of(2) {
        return Err(config_err("algebra.bosonic_modes", "must be even and at least 4"));
    }
    if a.bosonic_n_max == 0 {
        return Err(config_err("algebra.bosonic_n_max", "must be at least 1"));
    }
    FockRegister::bosonic(a.bosonic_modes, a.bosonic_n_max).map_err(|e| {
        config_err(
            "algebra.bosonic_modes",
            format!("{} modes at n_max={}: {e}", a.bosonic_modes, a.bosonic_n_max),
        )
    })?;
    if !(a.tolerance.is_finite() && a.tolerance > 0.0) {
        return Err(config_err("algebra.tolerance", "must be > 0"));
    }
    if a.phis.iter().any(|p| !p.is_finite()) {
        return Err(config_err("algebra.phis", "must be finite"));
    }
    Ok(())
}

pub fn swap_checks(checks: &mut Checks, d: usize) -> Result<(), CliError> {
    let internal = |e| CliError::Runtime(format!("swap d={d}: {e}"));
    let layout = SiteLayout::data_ancilla_pair(d).map_err(internal)?;
    let s = generalized_swap(&layout, d, 0, 1).map_err(internal)?;
    let n = d * d;
    checks.push(format!("swap_unitarity_d{d}"), s.unitarity_residual());
    let minus_id = ComplexMatrix::identity(n).scale_real(-1.0);
    checks.push(format!("swap_square_d{d}"), s.matmul(&s).max_abs_diff(&minus_id));
    let mut action: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let out = s.mul_vec(&kron_ket(&basis_ket(d, a), &basis_ket(d, b)));
            let want = kron_ket(&basis_ket(d, b), &basis_ket(d, a));
            for (x, y) in out.iter().zip(&want) {
                action = action.max((x - y * I).norm());
            }
        }
    }
    checks.push(format!("swap_action_d{d}"), action);
    let via_exp = exchange_operator(d).scale(I * FRAC_PI_2).expm();
    checks.push(format!("swap_exponential_d{d}"), via_exp.max_abs_diff(&s));
    if d == 2 {
        let h = heisenberg_swap(&layout, 0, 1).map_err(internal)?;
        checks.push("heisenberg_swap_d2", h.max_abs_diff(&s));
    }
    Ok(())
}

pub fn conjugation_checks(checks: &mut Checks, a: &AlgebraConfig, d: usize, seed: u64, fault: bool) -> Result<(), CliError> {
    let internal = |e| CliError::Runtime(format!("conjugation d={d}: {e}"));
    let layout = SiteLayout::data_ancilla_pair(d).map_err(internal)?;
    let mut rng = trial_rng(seed, d as u64);
    let mut channels = vec![KrausChannel::unitary(local_pauli(PauliAxis::X, d), vec![0]).map_err(internal)?];
    for i in 0..a.random_channels {
        channels.push(random_channel(&mut rng, d, vec![0], 1 + i % 4).map_err(internal)?);
    }
    if d >= 3 {
        channels.push(KrausChannel::leakage(0, d, 0.3).map_err(internal)?);
    }
    let mut worst: f64 = 0.0;
    for (i, ch) in channels.iter().enumerate() {
        let mut ops = ch.kraus_ops().to_vec();
        if fault && i == 0 {
            // Largest entry of the first Kraus operator.
            let k = &mut ops[0];
            let (r, c) = (0..d * d)
                .map(|j| (j / d, j % d))
                .max_by(|x, y| k[*x].norm().total_cmp(&k[*y].norm()))
                .expect("nonempty");
            k[(r, c)] += C64::new(1e-6, 0.0);
        }
        let lhs = swap_conjugated_superoperator(&layout, &ops, &[0]).map_err(internal)?;
        let rhs = embedded_superoperator(&layout, ch.kraus_ops(), &[1]).map_err(internal)?;
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    checks.push(format!("conjugation_identity_d{d}"), worst);
    Ok(())
}

fn sampled_bosonic_monomials() -> Vec<LadderMonomial> {
    let mut out = Vec::new();
    for k in 0..3 {
        for l in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    if k + l + m + n <= 3 {
                        out.push(LadderMonomial::new(k, l, m, n));
                    }
                }
            }
        }
    }
    out
}

fn qubit_restriction_residual(reg: &FockRegister) -> Result<f64, fock::FockError> {
    let s = particle_swap(reg, 0, 1)?;
    let restricted = qubit_restriction(reg, &s, 0, 1)?;
    let reference = swapguard_core::qstate::swap_local(2);
    // Phase per row from the reference's pivot entry.
    let phases: Vec<C64> = (0..4)
        .map(|r| {
            let c = (0..4)
                .max_by(|&a, &b| reference[(r, a)].norm().total_cmp(&reference[(r, b)].norm()))
                .expect("4 columns");
            restricted[(r, c)] / reference[(r, c)]
        })
        .collect();
    let rebuilt = ComplexMatrix::from_fn(4, 4, |r, c| phases[r] * reference[(r, c)]);
    let unimodular = phases.iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max);
    Ok(rebuilt.max_abs_diff(&restricted).max(unimodular))
}

pub fn fock_checks(checks: &mut Checks, a: &AlgebraConfig) -> Result<(), CliError> {
    let internal = |e| CliError::Runtime(format!("fock: {e}"));
    let fermi = FockRegister::fermionic(4).map_err(internal)?;
    let bose_pair = FockRegister::bosonic(2, a.bosonic_n_max).map_err(internal)?;
    let (mut fb, mut bb): (f64, f64) = (0.0, 0.0);
    for &phi in &a.phis {
        fb = fb.max(bch_identity_residual(&fermi, 0, 2, phi).map_err(internal)?);
        fb = fb.max(bch_identity_residual(&fermi, 1, 3, phi).map_err(internal)?);
        bb = bb.max(bch_identity_residual(&bose_pair, 0, 1, phi).map_err(internal)?);
    }
    checks.push("bch_fermionic", fb);
    checks.push("bch_bosonic", bb);
    let mut fm: f64 = 0.0;
    for f in LadderMonomial::fermionic_set() {
        fm = fm.max(shift_monomial_residual(&fermi, &f, 0, 1).map_err(internal)?);
    }
    checks.push("monomial_shift_fermionic", fm);
    let bose = FockRegister::bosonic(a.bosonic_modes, a.bosonic_n_max).map_err(internal)?;
    let mut bm: f64 = 0.0;
    for f in sampled_bosonic_monomials() {
        bm = bm.max(shift_monomial_residual(&bose, &f, 0, 1).map_err(internal)?);
    }
    checks.push("monomial_shift_bosonic", bm);
    checks.push("fermionic_canonical_relations", fock::canonical_relation_residual(&fermi).map_err(internal)?);
    checks.push("bosonic_canonical_relations", fock::canonical_relation_residual(&bose).map_err(internal)?);
    checks.push("fermionic_swap_qubit_restriction", qubit_restriction_residual(&fermi).map_err(internal)?);
    let bose_qubits = FockRegister::bosonic(4, a.bosonic_n_max.max(1)).map_err(internal)?;
    checks.push("bosonic_swap_qubit_restriction", qubit_restriction_residual(&bose_qubits).map_err(internal)?);
    Ok(())
}

pub fn cmd_verify_algebra(cfg: &ExperimentConfig, inject_fault: bool) -> Result<AlgebraReport, CliError> {
    let a = cfg.algebra.clone().unwrap_or_default();
    validate_algebra(&a)?;
    let fault = inject_fault || a.inject_fault;
    let seed = cfg.seed.unwrap_or(0);
    let mut checks = Checks::new(a.tolerance);
    for &d in &a.swap_dims {
        swap_checks(&mut checks, d)?;
    }
    for (i, &d) in a.conjugation_dims.iter().enumerate() {
        conjugation_checks(&mut checks, &a, d, seed, fault && i == 0)?;
    }
    fock_checks(&mut checks, &a)?;
    let pass = checks.list.iter().all(|c| c.pass);
    Ok(AlgebraReport {
        seed,
        fault_injected: fault,
        checks: checks.into_vec(),
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub k: usize,
    pub n: usize,
    pub p: u64,
    pub files: Vec<String>,
}

pub struct SplitRun {
    pub report: SplitReport,
    /// `(file name, contents)` per party.
    pub files: Vec<(String, String)>,
}

pub fn share_file_name(party_id: u64) -> String {
    format!("party-{party_id}.json")
}

pub fn cmd_shares_split(
    cfg: &ExperimentConfig,
    secret_override: Option<u64>,
    k_override: Option<usize>,
    n_override: Option<usize>,
) -> Result<SplitRun, CliError> {
    let block = cfg.shares.as_ref();
    let k = k_override
        .or(block.map(|b| b.k))
        .ok_or_else(|| config_err("shares.k", "required"))?;
    let n = n_override
        .or(block.map(|b| b.n))
        .ok_or_else(|| config_err("shares.n", "required"))?;
    let secret_value = secret_override
        .or(block.and_then(|b| b.secret))
        .ok_or_else(|| config_err("shares.secret", "required"))?;
    let prime = block.map_or(Field::DEFAULT.p, |b| b.prime);
    let field = Field::for_prime(prime).map_err(|e| config_err("shares.prime", e))?;
    let seed = cfg.seed()?;
    let mut rng = trial_rng(seed, 0);
    let set = secret::split_in(field, secret_value, k, n, &mut rng).map_err(|e| config_err("shares", e))?;
    let files: Vec<(String, String)> = set
        .shares
        .iter()
        .map(|s| (share_file_name(s.party_id), crate::output::to_json(s)))
        .collect();
    Ok(SplitRun {
        report: SplitReport {
            k,
            n,
            p: field.p,
            files: files.iter().map(|(name, _)| name.clone()).collect(),
        },
        files,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructReport {
    pub seed: u64,
    pub shares_used: usize,
    pub total_time: f64,
    pub on_count: u64,
    /// First (up to) five on-times of the derived schedule.
    pub on_times: Vec<f64>,
}

pub fn read_share(path: &Path) -> Result<Share, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| CliError::Config(format!("malformed share file {}: {}: {}", path.display(), e.path(), e.inner())))
}

/// Schedule used for derived on-times when no timing block is configured.
pub fn default_share_timing() -> TimingConfig {
    TimingConfig {
        total_time: 1000.0,
        tau_online: 1.0,
        tau_swap: 0.0,
        tau_reset: 0.0,
        on_count: Some(10),
        on_counts: None,
    }
}

pub fn cmd_shares_reconstruct(cfg: &ExperimentConfig, files: &[PathBuf]) -> Result<ReconstructReport, CliError> {
    let shares = files.iter().map(|p| read_share(p)).collect::<Result<Vec<_>, _>>()?;
    let seed = secret::reconstruct(&shares).map_err(|e| CliError::Config(format!("shares: {e}")))?;
    let timing = cfg.timing.clone().unwrap_or_else(default_share_timing);
    let horizon = timing.horizon()?;
    let m = timing.on_count()?;
    let schedule = secret::expand_schedule(seed, horizon, m, timing.cycle()?).map_err(sampling_err)?;
    Ok(ReconstructReport {
        seed,
        shares_used: shares.first().map_or(0, |s| s.k),
        total_time: horizon,
        on_count: m,
        on_times: schedule.on_times().iter().take(5).copied().collect(),
    })
}
