//! Second-quantized mode registers.
//!
//! Particle `p` owns modes `2p` (q = 0) and `2p + 1` (q = 1), so with a data
//! particle 0 and an ancilla particle 1 the declared mode order is data-0,
//! data-1, ancilla-0, ancilla-1. The basis index is mixed radix in
//! `n_max + 1` with mode 0 most significant. Fermionic operators carry the
//! Jordan-Wigner string `(-1)^{Σ_{i<j} n_i}` in that order.
//!
//! In this convention the particle SWAP sends, for fermions,
//! `f†_{α,d} f†_{β,a}|vac⟩ → f†_{β,d} f†_{α,a}|vac⟩` and, for bosons, to minus
//! that. `f†_{q,d}|vac⟩` alone goes to `-f†_{q,a}|vac⟩` in both cases.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{ComplexMatrix, C64, MAX_JOINT_DIM, ZERO};

pub const DEFAULT_BOSONIC_CUTOFF: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Fermionic,
    Bosonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Create,
    Annihilate,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("mode {mode} out of range for {modes} modes")]
    BadMode { mode: usize, modes: usize },
    #[error("rotation needs two distinct modes, got {0} twice")]
    ModeCollision(usize),
    #[error("particle {particle} out of range for {particles} particles")]
    BadParticle { particle: usize, particles: usize },
    #[error("register needs at least one mode and a cutoff of at least 1")]
    EmptyRegister,
    #[error("register dimension exceeds cap {cap}")]
    DimensionCap { cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockRegister {
    statistics: Statistics,
    modes: usize,
    n_max: usize,
    dim: usize,
}

impl FockRegister {
    /// `n_max` is ignored for fermions (forced to 1) and defaults to
    /// [`DEFAULT_BOSONIC_CUTOFF`] for bosons.
    pub fn new(statistics: Statistics, modes: usize, n_max: Option<usize>) -> Result<Self, FockError> {
        let n_max = match statistics {
            Statistics::Fermionic => 1,
            Statistics::Bosonic => n_max.unwrap_or(DEFAULT_BOSONIC_CUTOFF),
        };
        if modes == 0 || n_max == 0 {
            return Err(FockError::EmptyRegister);
        }
        let dim = u32::try_from(modes)
            .ok()
            .and_then(|m| (n_max + 1).checked_pow(m))
            .filter(|&d| d <= MAX_JOINT_DIM)
            .ok_or(FockError::DimensionCap { cap: MAX_JOINT_DIM })?;
        Ok(Self {
            statistics,
            modes,
            n_max,
            dim,
        })
    }

    pub fn fermionic(modes: usize) -> Result<Self, FockError> {
        Self::new(Statistics::Fermionic, modes, None)
    }

    pub fn bosonic(modes: usize, n_max: usize) -> Result<Self, FockError> {
        Self::new(Statistics::Bosonic, modes, Some(n_max))
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.modes / 2
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Mode `q` of `particle`.
    pub fn mode(&self, particle: usize, q: usize) -> Result<usize, FockError> {
        if particle >= self.particles() || q > 1 {
            return Err(FockError::BadParticle {
                particle,
                particles: self.particles(),
            });
        }
        Ok(2 * particle + q)
    }

    fn check_mode(&self, mode: usize) -> Result<(), FockError> {
        if mode >= self.modes {
            return Err(FockError::BadMode {
                mode,
                modes: self.modes,
            });
        }
        Ok(())
    }

    fn stride(&self, mode: usize) -> usize {
        (self.n_max + 1).pow((self.modes - 1 - mode) as u32)
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        let radix = self.n_max + 1;
        let mut occ = vec![0; self.modes];
        let mut rest = index;
        for slot in occ.iter_mut().rev() {
            *slot = rest % radix;
            rest /= radix;
        }
        occ
    }

    /// Basis index of an occupation tuple; `None` if any entry exceeds the cutoff.
    pub fn index_of(&self, occupations: &[usize]) -> Option<usize> {
        if occupations.len() != self.modes || occupations.iter().any(|&n| n > self.n_max) {
            return None;
        }
        Some(occupations.iter().fold(0, |acc, &n| acc * (self.n_max + 1) + n))
    }

    pub fn vacuum(&self) -> Vec<C64> {
        crate::matrix::basis_ket(self.dim, 0)
    }

    /// Basis indices whose total occupation is at most `max_total`.
    pub fn indices_with_total_at_most(&self, max_total: usize) -> Vec<usize> {
        (0..self.dim)
            .filter(|&i| self.occupations(i).iter().sum::<usize>() <= max_total)
            .collect()
    }
}

pub fn ladder_matrix(register: &FockRegister, mode: usize, kind: LadderKind) -> Result<ComplexMatrix, FockError> {
    register.check_mode(mode)?;
    let n = register.dim;
    let stride = register.stride(mode);
    let mut lower = ComplexMatrix::zeros(n, n);
    for col in 0..n {
        let occ = register.occupations(col);
        let k = occ[mode];
        if k == 0 {
            continue;
        }
        let amp = match register.statistics {
            Statistics::Fermionic => {
                let parity: usize = occ[..mode].iter().sum();
                if parity.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            }
            Statistics::Bosonic => (k as f64).sqrt(),
        };
        lower[(col - stride, col)] = C64::new(amp, 0.0);
    }
    Ok(match kind {
        LadderKind::Annihilate => lower,
        LadderKind::Create => lower.adjoint(),
    })
}

/// `c_d† c_a − c_a† c_d`.
pub fn rotation_generator(register: &FockRegister, mode_d: usize, mode_a: usize) -> Result<ComplexMatrix, FockError> {
    if mode_d == mode_a {
        register.check_mode(mode_d)?;
        return Err(FockError::ModeCollision(mode_d));
    }
    let cd = ladder_matrix(register, mode_d, LadderKind::Annihilate)?;
    let ca = ladder_matrix(register, mode_a, LadderKind::Annihilate)?;
    Ok(&cd.adjoint().matmul(&ca) - &ca.adjoint().matmul(&cd))
}

/// `exp[φ(c_d† c_a − c_a† c_d)]`.
pub fn mode_rotation(register: &FockRegister, mode_d: usize, mode_a: usize, phi: f64) -> Result<ComplexMatrix, FockError> {
    Ok(rotation_generator(register, mode_d, mode_a)?.scale_real(phi).expm())
}

/// `S = S⁰ S¹`, the `φ = π/2` rotations of both modes of the pair.
pub fn particle_swap(register: &FockRegister, particle_d: usize, particle_a: usize) -> Result<ComplexMatrix, FockError> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let s0 = mode_rotation(register, register.mode(particle_d, 0)?, register.mode(particle_a, 0)?, half_pi)?;
    let s1 = mode_rotation(register, register.mode(particle_d, 1)?, register.mode(particle_a, 1)?, half_pi)?;
    Ok(s0.matmul(&s1))
}

/// `F = (c₀†)^k (c₁†)^l (c₀)^m (c₁)^n` on one particle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LadderMonomial {
    pub k: u32,
    pub l: u32,
    pub m: u32,
    pub n: u32,
}

impl LadderMonomial {
    pub const IDENTITY: Self = Self { k: 0, l: 0, m: 0, n: 0 };

    pub fn new(k: u32, l: u32, m: u32, n: u32) -> Self {
        Self { k, l, m, n }
    }

    /// The 16 monomials with every exponent in {0, 1}.
    pub fn fermionic_set() -> Vec<Self> {
        (0..16u32)
            .map(|b| Self::new(b >> 3 & 1, b >> 2 & 1, b >> 1 & 1, b & 1))
            .collect()
    }

    pub fn creation_degree(&self) -> usize {
        (self.k + self.l) as usize
    }

    /// Fermionic monomials with an exponent above 1 are the zero operator.
    pub fn vanishes_for(&self, statistics: Statistics) -> bool {
        statistics == Statistics::Fermionic && [self.k, self.l, self.m, self.n].iter().any(|&e| e > 1)
    }

    pub fn operator(&self, register: &FockRegister, particle: usize) -> Result<ComplexMatrix, FockError> {
        let m0 = register.mode(particle, 0)?;
        let m1 = register.mode(particle, 1)?;
        let factors = [
            (m0, LadderKind::Create, self.k),
            (m1, LadderKind::Create, self.l),
            (m0, LadderKind::Annihilate, self.m),
            (m1, LadderKind::Annihilate, self.n),
        ];
        let mut out = ComplexMatrix::identity(register.dim);
        for (mode, kind, power) in factors {
            let c = ladder_matrix(register, mode, kind)?;
            for _ in 0..power {
                out = out.matmul(&c);
            }
        }
        Ok(out)
    }
}

/// `S† F_d S` for the particle SWAP between `particle_d` and `particle_a`.
pub fn shift_monomial(
    register: &FockRegister,
    monomial: &LadderMonomial,
    particle_d: usize,
    particle_a: usize,
) -> Result<ComplexMatrix, FockError> {
    let s = particle_swap(register, particle_d, particle_a)?;
    let f = monomial.operator(register, particle_d)?;
    Ok(s.adjoint().matmul(&f).matmul(&s))
}

/// Columns on which truncation cannot affect an operator that raises the
/// total occupation by at most `raise`. Every column for fermions.
fn exact_columns(register: &FockRegister, raise: usize) -> Vec<usize> {
    match register.statistics {
        Statistics::Fermionic => (0..register.dim).collect(),
        Statistics::Bosonic => register.indices_with_total_at_most(register.n_max.saturating_sub(raise)),
    }
}

fn restricted_residual(register: &FockRegister, a: &ComplexMatrix, b: &ComplexMatrix, raise: usize) -> f64 {
    let cols = exact_columns(register, raise);
    a.restrict_columns(&cols).max_abs_diff(&b.restrict_columns(&cols))
}

/// Max-abs gap between `S† F_d S` and `F_a`. For bosons only columns with
/// total occupation `≤ n_max − (k + l)` are compared.
pub fn shift_monomial_residual(
    register: &FockRegister,
    monomial: &LadderMonomial,
    particle_d: usize,
    particle_a: usize,
) -> Result<f64, FockError> {
    let shifted = shift_monomial(register, monomial, particle_d, particle_a)?;
    let target = monomial.operator(register, particle_a)?;
    Ok(restricted_residual(register, &shifted, &target, monomial.creation_degree()))
}

/// Max-abs residual of `e^{−φG} c_d† e^{φG} = cos φ c_d† + sin φ c_a†` and of
/// the annihilation analog. Bosonic creation checks use columns with total
/// occupation below `n_max`.
pub fn bch_identity_residual(register: &FockRegister, mode_d: usize, mode_a: usize, phi: f64) -> Result<f64, FockError> {
    let u = mode_rotation(register, mode_d, mode_a, phi)?;
    let u_inv = u.adjoint();
    let (c, s) = (phi.cos(), phi.sin());
    let mut worst: f64 = 0.0;
    for (kind, raise) in [(LadderKind::Create, 1), (LadderKind::Annihilate, 0)] {
        let fd = ladder_matrix(register, mode_d, kind)?;
        let fa = ladder_matrix(register, mode_a, kind)?;
        let lhs = u_inv.matmul(&fd).matmul(&u);
        let rhs = &fd.scale_real(c) + &fa.scale_real(s);
        worst = worst.max(restricted_residual(register, &lhs, &rhs, raise));
    }
    Ok(worst)
}

/// Max-abs residual of the canonical relations over all mode pairs:
/// `{c_i, c_j†} = δ_ij`, `{c_i, c_j} = 0` for fermions and the commutator
/// versions for bosons, the latter on columns with every occupation below `n_max`.
pub fn canonical_relation_residual(register: &FockRegister) -> Result<f64, FockError> {
    let lowers = (0..register.modes)
        .map(|m| ladder_matrix(register, m, LadderKind::Annihilate))
        .collect::<Result<Vec<_>, _>>()?;
    let cols: Vec<usize> = match register.statistics {
        Statistics::Fermionic => (0..register.dim).collect(),
        Statistics::Bosonic => (0..register.dim)
            .filter(|&i| register.occupations(i).iter().all(|&n| n < register.n_max))
            .collect(),
    };
    let id = ComplexMatrix::identity(register.dim);
    let zero = ComplexMatrix::zeros(register.dim, register.dim);
    let bracket = |a: &ComplexMatrix, b: &ComplexMatrix| match register.statistics {
        Statistics::Fermionic => a.anticommutator(b),
        Statistics::Bosonic => a.commutator(b),
    };
    let mut worst: f64 = 0.0;
    for (i, ci) in lowers.iter().enumerate() {
        for (j, cj) in lowers.iter().enumerate() {
            let want = if i == j { &id } else { &zero };
            let mixed = bracket(ci, &cj.adjoint()).restrict_columns(&cols);
            worst = worst.max(mixed.max_abs_diff(&want.restrict_columns(&cols)));
            let same = bracket(ci, cj).restrict_columns(&cols);
            worst = worst.max(same.max_abs());
        }
    }
    Ok(worst)
}

/// Restriction of `op` to the states with exactly one quantum on each of
/// the two particles, as a matrix on `|α⟩_d ⊗ |β⟩_a` (index `2α + β`).
pub fn qubit_restriction(
    register: &FockRegister,
    op: &ComplexMatrix,
    particle_d: usize,
    particle_a: usize,
) -> Result<ComplexMatrix, FockError> {
    let mut idx = Vec::with_capacity(4);
    for alpha in 0..2 {
        for beta in 0..2 {
            let mut occ = vec![0; register.modes];
            occ[register.mode(particle_d, alpha)?] = 1;
            occ[register.mode(particle_a, beta)?] = 1;
            idx.push(register.index_of(&occ).expect("unit occupations fit any cutoff"));
        }
    }
    Ok(op.submatrix(&idx, &idx))
}

/// Diagonal `D` with `restricted = D · reference`, if one exists to `tolerance`.
pub fn diagonal_phase(restricted: &ComplexMatrix, reference: &ComplexMatrix, tolerance: f64) -> Option<Vec<C64>> {
    let n = restricted.rows();
    let mut phases = vec![ZERO; n];
    for r in 0..n {
        let c = (0..n).max_by(|&a, &b| reference[(r, a)].norm().total_cmp(&reference[(r, b)].norm()))?;
        if reference[(r, c)].norm() < tolerance {
            return None;
        }
        phases[r] = restricted[(r, c)] / reference[(r, c)];
    }
    let rebuilt = ComplexMatrix::from_fn(n, n, |r, c| phases[r] * reference[(r, c)]);
    (rebuilt.max_abs_diff(restricted) <= tolerance).then_some(phases)
}
