//! Threshold sharing of the 64-bit seed that generates the on-time schedule.
//!
//! The seed is cut into little-endian limbs and each limb is shared with its
//! own random polynomial of degree `k − 1` over a prime field. Shares carry
//! no integrity check: a corrupted value reconstructs a wrong seed, which
//! shows up only as a schedule mismatch between holders.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mc::{sample_on_times, OnTimeSchedule, SamplingError};
use crate::schedule::CycleParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Field {
    pub p: u64,
    pub limb_bits: u32,
}

impl Field {
    pub const DEFAULT: Field = Field { p: 65537, limb_bits: 16 };
    /// Small field for exhaustive checks.
    pub const TEST: Field = Field { p: 257, limb_bits: 8 };

    pub fn for_prime(p: u64) -> Result<Self, SecretError> {
        [Self::DEFAULT, Self::TEST]
            .into_iter()
            .find(|f| f.p == p)
            .ok_or(SecretError::UnsupportedPrime(p))
    }

    pub fn limbs(&self) -> usize {
        (64 / self.limb_bits) as usize
    }

    fn mask(&self) -> u64 {
        (1u64 << self.limb_bits) - 1
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }

    /// Horner evaluation of `Σ coeffs[i] x^i`.
    pub fn evaluate(&self, coeffs: &[u64], x: u64) -> u64 {
        coeffs.iter().rev().fold(0, |acc, &c| (self.mul(acc, x) + c) % self.p)
    }

    /// Value at 0 of the polynomial through `points`.
    pub fn interpolate_at_zero(&self, points: &[(u64, u64)]) -> u64 {
        let p = self.p;
        let mut acc = 0;
        for (i, &(xi, yi)) in points.iter().enumerate() {
            let (mut num, mut den) = (1, 1);
            for (j, &(xj, _)) in points.iter().enumerate() {
                if i != j {
                    num = self.mul(num, p - xj % p);
                    den = self.mul(den, (xi + p - xj % p) % p);
                }
            }
            acc = (acc + self.mul(yi, self.mul(num, self.inv(den)))) % p;
        }
        acc
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SecretError {
    #[error("threshold must satisfy 1 <= k <= n, got k={k}, n={n}")]
    BadThreshold { k: usize, n: usize },
    #[error("{n} parties do not fit in field {p}")]
    TooManyParties { n: usize, p: u64 },
    #[error("insufficient quorum: {have} shares, need {need}")]
    InsufficientQuorum { have: usize, need: usize },
    #[error("party {0} appears more than once")]
    DuplicateParty(u64),
    #[error("unsupported prime {0}")]
    UnsupportedPrime(u64),
    #[error("inconsistent shares: {0}")]
    Inconsistent(String),
}

/// One party's share file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Share {
    pub party_id: u64,
    pub p: u64,
    pub k: usize,
    pub limbs: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareSet {
    pub k: usize,
    pub n: usize,
    pub p: u64,
    pub shares: Vec<Share>,
}

pub fn split<R: Rng + ?Sized>(seed: u64, k: usize, n: usize, rng: &mut R) -> Result<ShareSet, SecretError> {
    split_in(Field::DEFAULT, seed, k, n, rng)
}

/// Shares `seed` among parties `1..=n` over `field`.
pub fn split_in<R: Rng + ?Sized>(
    field: Field,
    seed: u64,
    k: usize,
    n: usize,
    rng: &mut R,
) -> Result<ShareSet, SecretError> {
    if k == 0 || k > n {
        return Err(SecretError::BadThreshold { k, n });
    }
    if n as u64 >= field.p {
        return Err(SecretError::TooManyParties { n, p: field.p });
    }
    let mut shares: Vec<Share> = (1..=n as u64)
        .map(|party_id| Share {
            party_id,
            p: field.p,
            k,
            limbs: Vec::with_capacity(field.limbs()),
        })
        .collect();
    for limb in 0..field.limbs() {
        let secret = (seed >> (limb as u32 * field.limb_bits)) & field.mask();
        let mut coeffs = vec![secret];
        coeffs.extend((1..k).map(|_| rng.random_range(0..field.p)));
        for share in &mut shares {
            share.limbs.push(field.evaluate(&coeffs, share.party_id));
        }
    }
    Ok(ShareSet { k, n, p: field.p, shares })
}

/// Interpolates each limb from the first `k` shares.
pub fn reconstruct(shares: &[Share]) -> Result<u64, SecretError> {
    let first = shares.first().ok_or(SecretError::InsufficientQuorum { have: 0, need: 1 })?;
    let field = Field::for_prime(first.p)?;
    let k = first.k;
    for (i, s) in shares.iter().enumerate() {
        if s.p != first.p || s.k != k {
            return Err(SecretError::Inconsistent(format!("share {i} has a different field or threshold")));
        }
        if s.limbs.len() != field.limbs() {
            return Err(SecretError::Inconsistent(format!(
                "share {i} has {} limbs, expected {}",
                s.limbs.len(),
                field.limbs()
            )));
        }
        if s.party_id == 0 || s.party_id >= field.p || s.limbs.iter().any(|&v| v >= field.p) {
            return Err(SecretError::Inconsistent(format!("share {i} holds values outside the field")));
        }
        if shares[..i].iter().any(|o| o.party_id == s.party_id) {
            return Err(SecretError::DuplicateParty(s.party_id));
        }
    }
    if k == 0 || shares.len() < k {
        return Err(SecretError::InsufficientQuorum {
            have: shares.len(),
            need: k,
        });
    }
    let quorum = &shares[..k];
    let mut seed = 0u64;
    for limb in 0..field.limbs() {
        let points: Vec<(u64, u64)> = quorum.iter().map(|s| (s.party_id, s.limbs[limb])).collect();
        let value = field.interpolate_at_zero(&points);
        if value > field.mask() {
            return Err(SecretError::Inconsistent(format!("limb {limb} decodes outside its range")));
        }
        seed |= value << (limb as u32 * field.limb_bits);
    }
    Ok(seed)
}

/// The schedule every quorum holder derives from the reconstructed seed.
pub fn expand_schedule(
    seed: u64,
    horizon: f64,
    on_count: u64,
    cycle: CycleParams,
) -> Result<OnTimeSchedule, SamplingError> {
    sample_on_times(seed, horizon, on_count, cycle)
}
