//! Data/ancilla exchange operators.
//!
//! Both constructions return `S = iP` where `P` exchanges the full local
//! Hilbert spaces of the two sites. The global phase `i` is kept as is;
//! it cancels in every conjugation `S†(·)S`.

use serde::{Deserialize, Serialize};

use super::{superoperator, KrausChannel, QuantumError, SiteLayout};
use crate::matrix::{ComplexMatrix, DEFAULT_TOLERANCE, I, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [Self::X, Self::Y, Self::Z];
}

/// Pauli matrix on levels `|0⟩, |1⟩` of a `dim`-level site, identity on the rest.
pub fn local_pauli(axis: PauliAxis, dim: usize) -> ComplexMatrix {
    assert!(dim >= 2);
    let mut m = ComplexMatrix::identity(dim);
    let block = match axis {
        PauliAxis::X => [ZERO, ONE, ONE, ZERO],
        PauliAxis::Y => [ZERO, -I, I, ZERO],
        PauliAxis::Z => [ONE, ZERO, ZERO, -ONE],
    };
    m[(0, 0)] = block[0];
    m[(0, 1)] = block[1];
    m[(1, 0)] = block[2];
    m[(1, 1)] = block[3];
    m
}

/// Single-site Pauli embedded in the joint space.
pub fn pauli_operator(layout: &SiteLayout, axis: PauliAxis, site: usize) -> Result<ComplexMatrix, QuantumError> {
    let d = layout.site(site)?.dim;
    layout.embed(&local_pauli(axis, d), &[site])
}

/// `P = Σ_{α,β} |α⟩⟨β| ⊗ |β⟩⟨α|` on two `dim`-level sites.
pub fn exchange_operator(dim: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(dim * dim, dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            // (|α⟩⟨β| ⊗ |β⟩⟨α|) |β α⟩ = |α β⟩
            p[(a * dim + b, b * dim + a)] = ONE;
        }
    }
    p
}

/// Local `iP` on a pair of `dim`-level sites.
pub fn swap_local(dim: usize) -> ComplexMatrix {
    exchange_operator(dim).scale(I)
}

fn pair_dims(layout: &SiteLayout, a: usize, b: usize) -> Result<(usize, usize), QuantumError> {
    if a == b {
        return Err(QuantumError::DuplicateSite(a));
    }
    Ok((layout.site(a)?.dim, layout.site(b)?.dim))
}

/// `exp(iπ/2 · P)` with `P = ½(σ⃗_d·σ⃗_a + 1)` built from embedded Paulis.
/// Since `P² = I` the exponential is exactly `iP`. Qubit sites only.
pub fn heisenberg_swap(layout: &SiteLayout, data_site: usize, ancilla_site: usize) -> Result<ComplexMatrix, QuantumError> {
    let (dd, da) = pair_dims(layout, data_site, ancilla_site)?;
    for d in [dd, da] {
        if d != 2 {
            return Err(QuantumError::DimensionMismatch { expected: 2, found: d });
        }
    }
    let n = layout.total_dim();
    let mut dot = ComplexMatrix::identity(n);
    for axis in PauliAxis::ALL {
        let sd = pauli_operator(layout, axis, data_site)?;
        let sa = pauli_operator(layout, axis, ancilla_site)?;
        dot = &dot + &sd.matmul(&sa);
    }
    let p = dot.scale_real(0.5);
    Ok(p.scale(I))
}

/// `S = iP` for the full `dim`-level exchange, embedded in the joint space.
pub fn generalized_swap(
    layout: &SiteLayout,
    dim: usize,
    data_site: usize,
    ancilla_site: usize,
) -> Result<ComplexMatrix, QuantumError> {
    let (dd, da) = pair_dims(layout, data_site, ancilla_site)?;
    for d in [dd, da] {
        if d != dim {
            return Err(QuantumError::DimensionMismatch { expected: dim, found: d });
        }
    }
    let p_local = exchange_operator(dim);
    let residual = p_local
        .matmul(&p_local)
        .max_abs_diff(&ComplexMatrix::identity(dim * dim));
    debug_assert!(residual <= DEFAULT_TOLERANCE, "P² ≠ I (residual {residual:e})");
    layout.embed(&p_local.scale(I), &[data_site, ancilla_site])
}

/// The same channel acting on the ancillas paired with its data targets.
pub fn conjugate_channel_by_swap(layout: &SiteLayout, ch: &KrausChannel) -> Result<KrausChannel, QuantumError> {
    let targets = ch
        .target_sites()
        .iter()
        .map(|&s| layout.paired_ancilla(s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ch.retarget(targets))
}

/// Superoperator of `ρ ↦ S† M(S ρ S†) S`, where `S` is the product of the
/// generalized SWAPs on every data site `ops` act on.
pub fn swap_conjugated_superoperator(
    layout: &SiteLayout,
    ops: &[ComplexMatrix],
    data_sites: &[usize],
) -> Result<ComplexMatrix, QuantumError> {
    let n = layout.total_dim();
    let mut s = ComplexMatrix::identity(n);
    for &d in data_sites {
        let a = layout.paired_ancilla(d)?;
        let dim = layout.site(d)?.dim;
        s = s.matmul(&generalized_swap(layout, dim, d, a)?);
    }
    let s_dag = s.adjoint();
    let conjugated = ops
        .iter()
        .map(|k| Ok(s_dag.matmul(&layout.embed(k, data_sites)?).matmul(&s)))
        .collect::<Result<Vec<_>, QuantumError>>()?;
    Ok(superoperator(&conjugated))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{basis_ket, kron_ket, C64};
    use crate::qstate::{apply_channel, random_channel, DensityState};
    use crate::rng::root_rng;

    fn pair(d: usize) -> SiteLayout {
        SiteLayout::data_ancilla_pair(d).unwrap()
    }

    #[test]
    fn pauli_actions() {
        let l = SiteLayout::data_ancilla_pair(2).unwrap();
        let x = local_pauli(PauliAxis::X, 2);
        assert_eq!(x.mul_vec(&basis_ket(2, 0)), basis_ket(2, 1));
        let z = local_pauli(PauliAxis::Z, 2);
        assert_eq!(z.mul_vec(&basis_ket(2, 1)), vec![ZERO, -ONE]);
        let xyz = local_pauli(PauliAxis::X, 2)
            .matmul(&local_pauli(PauliAxis::Y, 2))
            .matmul(&local_pauli(PauliAxis::Z, 2));
        assert!(xyz.approx_eq(&ComplexMatrix::identity(2).scale(I), 1e-15));
        let embedded = pauli_operator(&l, PauliAxis::X, 1).unwrap();
        assert!(embedded.approx_eq(&ComplexMatrix::identity(2).kron(&x), 0.0));
        assert!(pauli_operator(&l, PauliAxis::X, 2).is_err());
    }

    #[test]
    fn heisenberg_swap_exchanges_with_phase_i() {
        let l = pair(2);
        let s = heisenberg_swap(&l, 0, 1).unwrap();
        // |01⟩ is index 1, |10⟩ index 2
        let out = s.mul_vec(&basis_ket(4, 1));
        let want: Vec<C64> = basis_ket(4, 2).iter().map(|z| z * I).collect();
        for (a, b) in out.iter().zip(&want) {
            assert!((a - b).norm() < 1e-15);
        }
        let out = s.mul_vec(&basis_ket(4, 0));
        assert!((out[0] - I).norm() < 1e-15);
    }

    #[test]
    fn heisenberg_matches_exponential_and_generalized() {
        let l = pair(2);
        let s = heisenberg_swap(&l, 0, 1).unwrap();
        let p = s.scale(-I);
        let via_exp = p.scale(I * std::f64::consts::FRAC_PI_2).expm();
        assert!(via_exp.approx_eq(&s, 1e-10));
        let g = generalized_swap(&l, 2, 0, 1).unwrap();
        assert!(g.approx_eq(&s, 1e-10));
    }

    #[test]
    fn heisenberg_rejects_qutrits() {
        assert!(matches!(
            heisenberg_swap(&pair(3), 0, 1),
            Err(QuantumError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn generalized_swap_algebra() {
        for d in [2, 3, 4] {
            let l = pair(d);
            let s = generalized_swap(&l, d, 0, 1).unwrap();
            assert!(s.unitarity_residual() < 1e-12);
            let minus_i = ComplexMatrix::identity(d * d).scale_real(-1.0);
            assert!(s.matmul(&s).approx_eq(&minus_i, 1e-12));
        }
        let l = pair(3);
        let s = generalized_swap(&l, 3, 0, 1).unwrap();
        let out = s.mul_vec(&kron_ket(&basis_ket(3, 2), &basis_ket(3, 0)));
        let want = kron_ket(&basis_ket(3, 0), &basis_ket(3, 2));
        for (a, b) in out.iter().zip(&want) {
            assert!((a - b * I).norm() < 1e-15);
        }
        assert!(generalized_swap(&l, 2, 0, 1).is_err());
    }

    #[test]
    fn sigma_x_retargets_to_ancilla() {
        let l = pair(2);
        let ch = KrausChannel::unitary(local_pauli(PauliAxis::X, 2), vec![0]).unwrap();
        let moved = conjugate_channel_by_swap(&l, &ch).unwrap();
        assert_eq!(moved.target_sites(), &[1]);
        assert_eq!(moved.kraus_ops(), ch.kraus_ops());
        let bad = KrausChannel::unitary(local_pauli(PauliAxis::X, 2), vec![1]).unwrap();
        assert_eq!(conjugate_channel_by_swap(&l, &bad), Err(QuantumError::Unpaired(1)));
    }

    #[test]
    fn swap_then_attack_equals_ancilla_attack_on_states() {
        let mut rng = root_rng(12);
        let l = pair(2);
        let s = generalized_swap(&l, 2, 0, 1).unwrap();
        for _ in 0..10 {
            let ch = random_channel(&mut rng, 2, vec![0], 2).unwrap();
            let moved = conjugate_channel_by_swap(&l, &ch).unwrap();
            let mixer = random_channel(&mut rng, 4, vec![0, 1], 3).unwrap();
            let rho = apply_channel(&DensityState::ground(l.clone()), &mixer).unwrap().state;
            let swapped = rho.apply_local(&s, &[0, 1]).unwrap();
            let attacked = apply_channel(&swapped, &ch).unwrap().state;
            let back = attacked.apply_local(&s.adjoint(), &[0, 1]).unwrap();
            let direct = apply_channel(&rho, &moved).unwrap().state;
            assert!(back.rho().approx_eq(direct.rho(), 1e-12));
        }
    }
}
