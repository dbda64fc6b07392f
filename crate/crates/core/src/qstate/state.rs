use serde::Serialize;

use super::layout::{check_site_set, LocalIndexer};
use super::{QuantumError, Site, SiteLayout, EIGENVALUE_FLOOR};
use crate::matrix::{self, ComplexMatrix, C64, DEFAULT_TOLERANCE, ZERO};

/// Mixed state over a [`SiteLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    layout: SiteLayout,
    rho: ComplexMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateDiagnostics {
    pub trace: f64,
    pub hermiticity_residual: f64,
    pub min_eigenvalue: f64,
}

impl DensityState {
    /// Validates Hermiticity, unit trace and the eigenvalue floor.
    pub fn new(layout: SiteLayout, rho: ComplexMatrix) -> Result<Self, QuantumError> {
        let state = Self::unchecked(layout, rho)?;
        let diag = state.diagnostics();
        if diag.hermiticity_residual > DEFAULT_TOLERANCE {
            return Err(QuantumError::InvalidState(format!(
                "not Hermitian (residual {:e})",
                diag.hermiticity_residual
            )));
        }
        if (diag.trace - 1.0).abs() > DEFAULT_TOLERANCE {
            return Err(QuantumError::InvalidState(format!("trace {} != 1", diag.trace)));
        }
        if diag.min_eigenvalue < EIGENVALUE_FLOOR {
            return Err(QuantumError::InvalidState(format!(
                "negative eigenvalue {:e}",
                diag.min_eigenvalue
            )));
        }
        Ok(state)
    }

    fn unchecked(layout: SiteLayout, rho: ComplexMatrix) -> Result<Self, QuantumError> {
        let n = layout.total_dim();
        if rho.rows() != n || rho.cols() != n {
            return Err(QuantumError::DimensionMismatch {
                expected: n,
                found: rho.rows().max(rho.cols()),
            });
        }
        if !rho.is_finite() {
            return Err(QuantumError::InvalidState("non-finite entries".into()));
        }
        Ok(Self { layout, rho })
    }

    /// `|ψ⟩⟨ψ|` for a unit vector.
    pub fn from_pure(layout: SiteLayout, ket: &[C64]) -> Result<Self, QuantumError> {
        check_normalized(ket)?;
        let rho = ComplexMatrix::outer(ket, ket);
        Self::unchecked(layout, rho)
    }

    /// All sites in `|0⟩`.
    pub fn ground(layout: SiteLayout) -> Self {
        let n = layout.total_dim();
        Self {
            layout,
            rho: ComplexMatrix::basis_outer(n, 0, 0),
        }
    }

    pub fn layout(&self) -> &SiteLayout {
        &self.layout
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// `tr(ρ²)`
    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.rho[(i, j)] * self.rho[(j, i)]).re;
            }
        }
        acc
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        StateDiagnostics {
            trace: self.trace(),
            hermiticity_residual: self.rho.hermiticity_residual(),
            min_eigenvalue: self.rho.hermitian_eigenvalues().first().copied().unwrap_or(0.0),
        }
    }

    /// `U ρ U†` for a local unitary (or any local operator) on `sites`.
    pub fn apply_local(&self, op: &ComplexMatrix, sites: &[usize]) -> Result<Self, QuantumError> {
        self.apply_kraus(std::slice::from_ref(op), sites)
    }

    /// `Σ K ρ K†` without normalization.
    pub(crate) fn apply_kraus(&self, ops: &[ComplexMatrix], sites: &[usize]) -> Result<Self, QuantumError> {
        let idx = LocalIndexer::new(&self.layout, sites)?;
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in ops {
            idx.check_op(k)?;
            let half = idx.left_mul(k, &self.rho);
            out = &out + &idx.right_mul_adjoint(&half, k);
        }
        Ok(Self {
            layout: self.layout.clone(),
            rho: out,
        })
    }

    /// Resets each listed site to `|0⟩`, discarding its content:
    /// `ρ ↦ |0⟩⟨0|_R ⊗ tr_R ρ`.
    pub fn reset_sites(&self, sites: &[usize]) -> Result<Self, QuantumError> {
        let idx = LocalIndexer::new(&self.layout, sites)?;
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        let src = self.rho.as_slice();
        let dst = out.as_mut_slice();
        for i in 0..n {
            let (li, bi) = (idx.local_of[i], idx.base_of[i]);
            for j in 0..n {
                if idx.local_of[j] == li {
                    dst[bi * n + idx.base_of[j]] += src[i * n + j];
                }
            }
        }
        Ok(Self {
            layout: self.layout.clone(),
            rho: out,
        })
    }

    /// Conjugation by the product of full exchanges `P` of each listed site
    /// pair. Any phase on the exchange (such as `S = iP`) cancels.
    pub fn exchange_sites(&self, pairs: &[(usize, usize)]) -> Result<Self, QuantumError> {
        let flat: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        check_site_set(&self.layout, &flat)?;
        let mut swaps = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            let (da, db) = (self.layout.site(a)?.dim, self.layout.site(b)?.dim);
            if da != db {
                return Err(QuantumError::DimensionMismatch { expected: da, found: db });
            }
            swaps.push((self.layout.stride(a), self.layout.stride(b), da));
        }
        let n = self.dim();
        let perm: Vec<usize> = (0..n)
            .map(|i| {
                swaps.iter().fold(i, |k, &(sa, sb, d)| {
                    let (xa, xb) = ((k / sa) % d, (k / sb) % d);
                    k - xa * sa - xb * sb + xb * sa + xa * sb
                })
            })
            .collect();
        let mut out = ComplexMatrix::zeros(n, n);
        let src = self.rho.as_slice();
        let dst = out.as_mut_slice();
        for i in 0..n {
            let pi = perm[i] * n;
            for j in 0..n {
                dst[pi + perm[j]] = src[i * n + j];
            }
        }
        Ok(Self {
            layout: self.layout.clone(),
            rho: out,
        })
    }

    pub(crate) fn scaled(&self, factor: f64) -> Self {
        Self {
            layout: self.layout.clone(),
            rho: self.rho.scale_real(factor),
        }
    }
}

fn check_normalized(ket: &[C64]) -> Result<(), QuantumError> {
    let norm = matrix::norm(ket);
    if (norm - 1.0).abs() > DEFAULT_TOLERANCE {
        return Err(QuantumError::NotNormalized { norm });
    }
    Ok(())
}

/// `⟨ψ|ρ|ψ⟩` for a unit reference vector.
pub fn fidelity(state: &DensityState, reference: &[C64]) -> Result<f64, QuantumError> {
    if reference.len() != state.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: state.dim(),
            found: reference.len(),
        });
    }
    check_normalized(reference)?;
    let rho_psi = state.rho.mul_vec(reference);
    Ok(matrix::inner(reference, &rho_psi).re.clamp(0.0, 1.0))
}

/// Reduced state on `keep_sites` (reported in ascending site order).
pub fn partial_trace(state: &DensityState, keep_sites: &[usize]) -> Result<DensityState, QuantumError> {
    let layout = &state.layout;
    check_site_set(layout, keep_sites)?;
    let mut keep = keep_sites.to_vec();
    keep.sort_unstable();
    let traced: Vec<usize> = (0..layout.len()).filter(|s| !keep.contains(s)).collect();
    let reduced_layout =
        SiteLayout::unpaired(keep.iter().map(|&s| layout.sites()[s]).collect::<Vec<Site>>())?;
    if traced.is_empty() {
        return Ok(DensityState {
            layout: reduced_layout,
            rho: state.rho.clone(),
        });
    }
    let kept = LocalIndexer::new(layout, &keep)?;
    let gone = LocalIndexer::new(layout, &traced)?;
    let r = kept.local_dim;
    let mut rho = ComplexMatrix::zeros(r, r);
    for a in 0..r {
        for b in 0..r {
            let mut acc = ZERO;
            for &t in &gone.offsets {
                acc += state.rho[(kept.offsets[a] + t, kept.offsets[b] + t)];
            }
            rho[(a, b)] = acc;
        }
    }
    Ok(DensityState {
        layout: reduced_layout,
        rho,
    })
}

/// `(|00⟩ + |11⟩)/√2` on two sites of local dimension `da`, `db`.
pub fn bell_vector(da: usize, db: usize) -> Vec<C64> {
    let mut v = vec![ZERO; da * db];
    let amp = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[0] = amp;
    v[db + 1] = amp;
    v
}

/// Bell pair on `site_a`, `site_b` with every other site in `|0⟩`.
pub fn bell_pair(layout: &SiteLayout, site_a: usize, site_b: usize) -> Result<DensityState, QuantumError> {
    check_site_set(layout, &[site_a, site_b])?;
    let n = layout.total_dim();
    let mut ket = vec![ZERO; n];
    let amp = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    ket[0] = amp;
    ket[layout.stride(site_a) + layout.stride(site_b)] = amp;
    DensityState::from_pure(layout.clone(), &ket)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::SiteRole;

    fn qubits(n: usize) -> SiteLayout {
        SiteLayout::unpaired(
            (0..n)
                .map(|node| Site {
                    dim: 2,
                    role: SiteRole::Decoy,
                    node,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn bell_pair_properties() {
        let l = qubits(2);
        let b = bell_pair(&l, 0, 1).unwrap();
        assert!((fidelity(&b, &bell_vector(2, 2)).unwrap() - 1.0).abs() < 1e-12);
        assert!((b.purity() - 1.0).abs() < 1e-12);
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        for keep in [0, 1] {
            let r = partial_trace(&b, &[keep]).unwrap();
            assert!(r.rho().approx_eq(&half, 1e-12));
        }
    }

    #[test]
    fn fidelity_examples() {
        let l = qubits(2);
        let mixed = DensityState::new(l.clone(), ComplexMatrix::identity(4).scale_real(0.25)).unwrap();
        assert!((fidelity(&mixed, &bell_vector(2, 2)).unwrap() - 0.25).abs() < 1e-12);
        let zero = DensityState::ground(l.clone());
        assert_eq!(fidelity(&zero, &matrix::basis_ket(4, 3)).unwrap(), 0.0);
        assert!(matches!(
            fidelity(&zero, &[C64::new(2.0, 0.0), ZERO, ZERO, ZERO]),
            Err(QuantumError::NotNormalized { .. })
        ));
    }

    #[test]
    fn partial_trace_of_nothing_and_of_product() {
        let l = qubits(3);
        // |1⟩ ⊗ |+⟩ ⊗ |0⟩
        let plus = [C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2];
        let ket = matrix::kron_ket(&matrix::kron_ket(&matrix::basis_ket(2, 1), &plus), &matrix::basis_ket(2, 0));
        let s = DensityState::from_pure(l, &ket).unwrap();
        let all = partial_trace(&s, &[0, 1, 2]).unwrap();
        assert_eq!(all.rho(), s.rho());
        let mid = partial_trace(&s, &[1]).unwrap();
        assert!(mid.rho().approx_eq(&ComplexMatrix::outer(&plus, &plus), 1e-12));
        let outer = partial_trace(&s, &[2, 0]).unwrap();
        let want = matrix::kron_ket(&matrix::basis_ket(2, 1), &matrix::basis_ket(2, 0));
        assert!(outer.rho().approx_eq(&ComplexMatrix::outer(&want, &want), 1e-12));
        assert!(partial_trace(&s, &[]).is_err());
        assert!(partial_trace(&s, &[1, 1]).is_err());
        assert!(partial_trace(&s, &[3]).is_err());
    }

    #[test]
    fn invalid_states_rejected() {
        let l = qubits(1);
        let not_unit = ComplexMatrix::identity(2);
        assert!(DensityState::new(l.clone(), not_unit).is_err());
        let negative = ComplexMatrix::from_real_rows(&[&[1.5, 0.0], &[0.0, -0.5]]);
        assert!(DensityState::new(l.clone(), negative).is_err());
        let non_herm = ComplexMatrix::from_real_rows(&[&[0.5, 0.3], &[0.0, 0.5]]);
        assert!(DensityState::new(l.clone(), non_herm).is_err());
    }

    fn random_state(layout: SiteLayout, seed: u64) -> DensityState {
        let mut rng = crate::rng::root_rng(seed);
        let all: Vec<usize> = (0..layout.len()).collect();
        let dim = layout.total_dim();
        let ch = crate::qstate::random_channel(&mut rng, dim, all, 3).unwrap();
        crate::qstate::apply_channel(&DensityState::ground(layout), &ch).unwrap().state
    }

    #[test]
    fn reset_matches_kraus_form() {
        let l = SiteLayout::unpaired(
            [2, 3, 2]
                .iter()
                .map(|&dim| Site {
                    dim,
                    role: SiteRole::Decoy,
                    node: 0,
                })
                .collect(),
        )
        .unwrap();
        let s = random_state(l, 4);
        for sites in [vec![0], vec![1], vec![2, 0], vec![0, 1, 2]] {
            let mut want = s.clone();
            for &site in &sites {
                let d = s.layout().sites()[site].dim;
                let ops: Vec<ComplexMatrix> = (0..d).map(|k| ComplexMatrix::basis_outer(d, 0, k)).collect();
                want = want.apply_kraus(&ops, &[site]).unwrap();
            }
            assert!(s.reset_sites(&sites).unwrap().rho().approx_eq(want.rho(), 1e-14));
        }
    }

    #[test]
    fn exchange_matches_swap_conjugation() {
        let l = SiteLayout::network(2, 2).unwrap();
        let s = random_state(l.clone(), 5);
        let swap = crate::qstate::swap_local(2);
        let want = s.apply_local(&swap, &[0, 1]).unwrap().apply_local(&swap, &[3, 4]).unwrap();
        let got = s.exchange_sites(&[(0, 1), (3, 4)]).unwrap();
        assert!(got.rho().approx_eq(want.rho(), 1e-14));
        let back = got.exchange_sites(&[(0, 1), (3, 4)]).unwrap();
        assert!(back.rho().approx_eq(s.rho(), 0.0));
        let q = SiteLayout::data_ancilla_pair(3).unwrap();
        let s = random_state(q, 6);
        let want = s.apply_local(&crate::qstate::swap_local(3), &[0, 1]).unwrap();
        assert!(s.exchange_sites(&[(1, 0)]).unwrap().rho().approx_eq(want.rho(), 1e-14));
        assert!(s.exchange_sites(&[(0, 0)]).is_err());
    }

    #[test]
    fn reset_is_idempotent() {
        let l = qubits(2);
        let b = bell_pair(&l, 0, 1).unwrap();
        let once = b.reset_sites(&[1]).unwrap();
        let twice = once.reset_sites(&[1]).unwrap();
        assert!(once.rho().approx_eq(twice.rho(), 0.0));
        let r = partial_trace(&once, &[1]).unwrap();
        assert!(r.rho().approx_eq(&ComplexMatrix::basis_outer(2, 0, 0), 1e-15));
    }
}
