use serde::{Deserialize, Serialize};

use super::QuantumError;
use crate::matrix::{ComplexMatrix, MAX_JOINT_DIM, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiteRole {
    Data,
    Ancilla,
    Decoy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Site {
    /// Local dimension; 2 is a qubit, larger values carry leakage levels.
    pub dim: usize,
    pub role: SiteRole,
    /// Network node owning the site. A data site pairs with the ancilla on its node.
    pub node: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteLayout {
    sites: Vec<Site>,
}

impl SiteLayout {
    /// Validates local dimensions, the joint-dimension cap, and that every
    /// data site has exactly one same-dimension ancilla on its node.
    pub fn new(sites: Vec<Site>) -> Result<Self, QuantumError> {
        let layout = Self::unpaired(sites)?;
        for (i, s) in layout.sites.iter().enumerate() {
            if s.role == SiteRole::Data {
                layout.paired_ancilla(i)?;
            }
        }
        Ok(layout)
    }

    /// Layout without the pairing requirement, as produced by partial traces.
    pub fn unpaired(sites: Vec<Site>) -> Result<Self, QuantumError> {
        if sites.is_empty() {
            return Err(QuantumError::EmptySiteSet);
        }
        let mut dim: usize = 1;
        for (i, s) in sites.iter().enumerate() {
            if s.dim < 2 {
                return Err(QuantumError::BadLayout(format!("site {i} has dimension {} < 2", s.dim)));
            }
            dim = dim
                .checked_mul(s.dim)
                .filter(|&d| d <= MAX_JOINT_DIM)
                .ok_or(QuantumError::DimensionCap {
                    dim: dim.saturating_mul(s.dim),
                    cap: MAX_JOINT_DIM,
                })?;
        }
        Ok(Self { sites })
    }

    /// One data site (0) and its ancilla (1), both of dimension `dim`.
    pub fn data_ancilla_pair(dim: usize) -> Result<Self, QuantumError> {
        Self::new(vec![
            Site {
                dim,
                role: SiteRole::Data,
                node: 0,
            },
            Site {
                dim,
                role: SiteRole::Ancilla,
                node: 0,
            },
        ])
    }

    /// `nodes` nodes, each with data, ancilla and decoy sites in that order.
    pub fn network(nodes: usize, dim: usize) -> Result<Self, QuantumError> {
        let sites = (0..nodes)
            .flat_map(|node| {
                [SiteRole::Data, SiteRole::Ancilla, SiteRole::Decoy]
                    .into_iter()
                    .map(move |role| Site { dim, role, node })
            })
            .collect();
        Self::new(sites)
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.sites.iter().map(|s| s.dim).product()
    }

    pub fn site(&self, index: usize) -> Result<&Site, QuantumError> {
        self.sites.get(index).ok_or(QuantumError::BadSite {
            index,
            len: self.sites.len(),
        })
    }

    pub fn sites_with_role(&self, role: SiteRole) -> Vec<usize> {
        (0..self.sites.len()).filter(|&i| self.sites[i].role == role).collect()
    }

    pub fn paired_ancilla(&self, data_site: usize) -> Result<usize, QuantumError> {
        let d = self.site(data_site)?;
        if d.role != SiteRole::Data {
            return Err(QuantumError::Unpaired(data_site));
        }
        let mut matches = self
            .sites
            .iter()
            .enumerate()
            .filter(|(_, s)| s.role == SiteRole::Ancilla && s.node == d.node);
        match (matches.next(), matches.next()) {
            (Some((i, s)), None) if s.dim == d.dim => Ok(i),
            _ => Err(QuantumError::Unpaired(data_site)),
        }
    }

    /// Stride of a site in the joint index.
    pub fn stride(&self, site: usize) -> usize {
        self.sites[site + 1..].iter().map(|s| s.dim).product()
    }

    /// Product of the local dimensions of `sites`, after validating them.
    pub fn local_dim(&self, sites: &[usize]) -> Result<usize, QuantumError> {
        check_site_set(self, sites)?;
        Ok(sites.iter().map(|&s| self.sites[s].dim).product())
    }

    /// Embeds a local operator on `sites` into the joint space.
    pub fn embed(&self, op: &ComplexMatrix, sites: &[usize]) -> Result<ComplexMatrix, QuantumError> {
        let idx = LocalIndexer::new(self, sites)?;
        idx.check_op(op)?;
        let n = self.total_dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            let (li, base) = (idx.local_of[i], idx.base_of[i]);
            for (lj, &off) in idx.offsets.iter().enumerate() {
                let v = op[(li, lj)];
                if v != ZERO {
                    out[(i, base + off)] = v;
                }
            }
        }
        Ok(out)
    }
}

pub(crate) fn check_site_set(layout: &SiteLayout, sites: &[usize]) -> Result<(), QuantumError> {
    if sites.is_empty() {
        return Err(QuantumError::EmptySiteSet);
    }
    for (k, &s) in sites.iter().enumerate() {
        layout.site(s)?;
        if sites[..k].contains(&s) {
            return Err(QuantumError::DuplicateSite(s));
        }
    }
    Ok(())
}

/// Splits joint indices into a local part on a site subset and the rest.
pub(crate) struct LocalIndexer {
    /// Local index → joint offset contributed by the subset's digits.
    pub offsets: Vec<usize>,
    /// Joint index → local index.
    pub local_of: Vec<usize>,
    /// Joint index → joint index with the subset's digits zeroed.
    pub base_of: Vec<usize>,
    pub local_dim: usize,
}

impl LocalIndexer {
    pub fn new(layout: &SiteLayout, sites: &[usize]) -> Result<Self, QuantumError> {
        check_site_set(layout, sites)?;
        let dims: Vec<usize> = sites.iter().map(|&s| layout.sites[s].dim).collect();
        let strides: Vec<usize> = sites.iter().map(|&s| layout.stride(s)).collect();
        let local_dim: usize = dims.iter().product();
        let offsets = (0..local_dim)
            .map(|mut l| {
                let mut off = 0;
                for k in (0..sites.len()).rev() {
                    off += (l % dims[k]) * strides[k];
                    l /= dims[k];
                }
                off
            })
            .collect::<Vec<_>>();
        let n = layout.total_dim();
        let mut local_of = Vec::with_capacity(n);
        let mut base_of = Vec::with_capacity(n);
        for i in 0..n {
            let mut l = 0;
            for k in 0..sites.len() {
                l = l * dims[k] + (i / strides[k]) % dims[k];
            }
            local_of.push(l);
            base_of.push(i - offsets[l]);
        }
        Ok(Self {
            offsets,
            local_of,
            base_of,
            local_dim,
        })
    }

    pub fn check_op(&self, op: &ComplexMatrix) -> Result<(), QuantumError> {
        if op.rows() != self.local_dim || op.cols() != self.local_dim {
            return Err(QuantumError::DimensionMismatch {
                expected: self.local_dim,
                found: op.rows().max(op.cols()),
            });
        }
        Ok(())
    }

    /// `K ρ` for a local `K`.
    pub fn left_mul(&self, op: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
        let n = rho.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        let src = rho.as_slice();
        let dst = out.as_mut_slice();
        for i in 0..n {
            let (li, base) = (self.local_of[i], self.base_of[i]);
            let row = &mut dst[i * n..(i + 1) * n];
            for (lk, &off) in self.offsets.iter().enumerate() {
                let a = op[(li, lk)];
                if a == ZERO {
                    continue;
                }
                let k = base + off;
                for (o, r) in row.iter_mut().zip(&src[k * n..(k + 1) * n]) {
                    *o += a * r;
                }
            }
        }
        out
    }

    /// `ρ K†` for a local `K`.
    pub fn right_mul_adjoint(&self, rho: &ComplexMatrix, op: &ComplexMatrix) -> ComplexMatrix {
        let n = rho.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        let src = rho.as_slice();
        let dst = out.as_mut_slice();
        for j in 0..n {
            let (lj, base) = (self.local_of[j], self.base_of[j]);
            for (lk, &off) in self.offsets.iter().enumerate() {
                let a = op[(lj, lk)].conj();
                if a == ZERO {
                    continue;
                }
                let k = base + off;
                for i in 0..n {
                    dst[i * n + j] += src[i * n + k] * a;
                }
            }
        }
        out
    }
}
