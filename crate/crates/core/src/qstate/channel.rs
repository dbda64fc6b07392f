use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::layout::check_site_set;
use super::{DensityState, QuantumError, SiteLayout};
use crate::matrix::{ComplexMatrix, C64, DEFAULT_TOLERANCE};

/// Completely positive map `ρ ↦ Σ K ρ K†` on a subset of sites.
///
/// Kraus matrices act on the tensor product of the target sites, in the
/// order the targets are listed.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    kraus_ops: Vec<ComplexMatrix>,
    target_sites: Vec<usize>,
    trace_preserving: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelResult {
    pub state: DensityState,
    /// Trace before renormalization; 1 for trace-preserving channels.
    pub selection_probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompletenessReport {
    /// Max-abs of `Σ K†K − I`.
    pub residual: f64,
    /// Smallest eigenvalue of `I − Σ K†K`.
    pub min_deficit_eigenvalue: f64,
}

fn completeness(ops: &[ComplexMatrix]) -> CompletenessReport {
    let m = ops[0].rows();
    let mut effect = ComplexMatrix::zeros(m, m);
    for k in ops {
        effect = &effect + &k.adjoint().matmul(k);
    }
    let identity = ComplexMatrix::identity(m);
    let deficit = &identity - &effect;
    CompletenessReport {
        residual: effect.max_abs_diff(&identity),
        min_deficit_eigenvalue: deficit.hermitian_eigenvalues()[0],
    }
}

impl KrausChannel {
    /// Checks shapes and completeness: `Σ K†K = I` when `trace_preserving`,
    /// otherwise `Σ K†K ≤ I`.
    pub fn new(
        kraus_ops: Vec<ComplexMatrix>,
        target_sites: Vec<usize>,
        trace_preserving: bool,
    ) -> Result<Self, QuantumError> {
        let first = kraus_ops.first().ok_or(QuantumError::EmptySiteSet)?;
        let m = first.rows();
        for k in &kraus_ops {
            if k.rows() != m || k.cols() != m {
                return Err(QuantumError::DimensionMismatch {
                    expected: m,
                    found: k.rows().max(k.cols()),
                });
            }
        }
        if target_sites.is_empty() {
            return Err(QuantumError::EmptySiteSet);
        }
        let report = completeness(&kraus_ops);
        if trace_preserving {
            if report.residual > DEFAULT_TOLERANCE {
                return Err(QuantumError::Completeness {
                    residual: report.residual,
                });
            }
        } else if report.min_deficit_eigenvalue < -DEFAULT_TOLERANCE {
            return Err(QuantumError::Completeness {
                residual: -report.min_deficit_eigenvalue,
            });
        }
        Ok(Self {
            kraus_ops,
            target_sites,
            trace_preserving,
        })
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    pub fn target_sites(&self) -> &[usize] {
        &self.target_sites
    }

    pub fn trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    pub fn local_dim(&self) -> usize {
        self.kraus_ops[0].rows()
    }

    pub fn completeness(&self) -> CompletenessReport {
        completeness(&self.kraus_ops)
    }

    /// Same Kraus matrices on different sites.
    pub fn retarget(&self, target_sites: Vec<usize>) -> Self {
        assert_eq!(target_sites.len(), self.target_sites.len());
        Self {
            kraus_ops: self.kraus_ops.clone(),
            target_sites,
            trace_preserving: self.trace_preserving,
        }
    }

    pub fn identity(site: usize, dim: usize) -> Self {
        Self::unitary(ComplexMatrix::identity(dim), vec![site]).expect("identity is unitary")
    }

    pub fn unitary(u: ComplexMatrix, target_sites: Vec<usize>) -> Result<Self, QuantumError> {
        Self::new(vec![u], target_sites, true)
    }

    /// Completely depolarizing channel `ρ ↦ tr(ρ) I/d`, from the `d²`
    /// Weyl operators `XᵃZᵇ/d`.
    pub fn fully_depolarizing(site: usize, dim: usize) -> Self {
        let d = dim;
        let omega = |k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64);
        let mut ops = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                // X^a Z^b |j⟩ = ω^{bj} |j + a⟩
                let mut w = ComplexMatrix::zeros(d, d);
                for j in 0..d {
                    w[((j + a) % d, j)] = omega((b * j) % d) / d as f64;
                }
                ops.push(w);
            }
        }
        Self::new(ops, vec![site], true).expect("Weyl twirl is trace preserving")
    }

    /// Measure-and-replace: the site ends in `|0⟩` whatever it held.
    pub fn erasure(site: usize, dim: usize) -> Self {
        let ops = (0..dim).map(|k| ComplexMatrix::basis_outer(dim, 0, k)).collect();
        Self::new(ops, vec![site], true).expect("erasure is trace preserving")
    }

    /// Leaks `|0⟩` into `|2⟩` with probability `gamma`; needs `dim ≥ 3`.
    pub fn leakage(site: usize, dim: usize, gamma: f64) -> Result<Self, QuantumError> {
        if dim < 3 {
            return Err(QuantumError::DimensionMismatch { expected: 3, found: dim });
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(QuantumError::BadLayout(format!("leakage probability {gamma} outside [0, 1]")));
        }
        let leak = ComplexMatrix::basis_outer(dim, 2, 0).scale_real(gamma.sqrt());
        let mut stay = ComplexMatrix::identity(dim);
        stay[(0, 0)] = C64::new((1.0 - gamma).sqrt(), 0.0);
        Self::new(vec![leak, stay], vec![site], true)
    }

    /// Selective projective measurement that keeps outcome `level`.
    pub fn postselect(site: usize, dim: usize, level: usize) -> Result<Self, QuantumError> {
        if level >= dim {
            return Err(QuantumError::DimensionMismatch { expected: dim, found: level + 1 });
        }
        Self::new(vec![ComplexMatrix::basis_outer(dim, level, level)], vec![site], false)
    }

    /// Superoperator of the channel embedded in the joint space of `layout`.
    pub fn superoperator(&self, layout: &SiteLayout) -> Result<ComplexMatrix, QuantumError> {
        embedded_superoperator(layout, &self.kraus_ops, &self.target_sites)
    }
}

/// `Ŝ = Σ K ⊗ K̄`, acting on row-major `vec(ρ)`.
pub fn superoperator(ops: &[ComplexMatrix]) -> ComplexMatrix {
    let m = ops[0].rows();
    let mut out = ComplexMatrix::zeros(m * m, m * m);
    for k in ops {
        out = &out + &k.kron(&k.conj());
    }
    out
}

/// Superoperator of local Kraus matrices after embedding them on `sites`.
pub fn embedded_superoperator(
    layout: &SiteLayout,
    ops: &[ComplexMatrix],
    sites: &[usize],
) -> Result<ComplexMatrix, QuantumError> {
    let full = ops
        .iter()
        .map(|k| layout.embed(k, sites))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(superoperator(&full))
}

/// Applies `ch` to `state`. Selective channels are renormalized and their
/// pre-normalization trace reported.
pub fn apply_channel(state: &DensityState, ch: &KrausChannel) -> Result<ChannelResult, QuantumError> {
    let layout = state.layout();
    check_site_set(layout, &ch.target_sites)?;
    let want = layout.local_dim(&ch.target_sites)?;
    if want != ch.local_dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: want,
            found: ch.local_dim(),
        });
    }
    let out = state.apply_kraus(&ch.kraus_ops, &ch.target_sites)?;
    let trace = out.trace();
    if ch.trace_preserving {
        return Ok(ChannelResult {
            state: out,
            selection_probability: 1.0,
        });
    }
    if trace <= DEFAULT_TOLERANCE {
        return Err(QuantumError::ZeroSelection);
    }
    Ok(ChannelResult {
        state: out.scaled(1.0 / trace),
        selection_probability: trace,
    })
}

/// Random trace-preserving channel with `kraus_count` operators on sites of
/// total dimension `dim`: the blocks of a Haar-like random isometry
/// `C^dim → C^(kraus_count·dim)` built by Gram-Schmidt on Gaussian columns.
pub fn random_channel<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    target_sites: Vec<usize>,
    kraus_count: usize,
) -> Result<KrausChannel, QuantumError> {
    assert!(kraus_count >= 1);
    let rows = dim * kraus_count;
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..rows)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        // Two Gram-Schmidt passes for orthogonality to roundoff.
        for _ in 0..2 {
            for u in &cols {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        cols.push(v);
    }
    let ops = (0..kraus_count)
        .map(|k| ComplexMatrix::from_fn(dim, dim, |r, c| cols[c][k * dim + r]))
        .collect();
    KrausChannel::new(ops, target_sites, true)
}
