//! Dense multi-site quantum states.
//!
//! Sites are ordered; site 0 is the most significant digit of the joint
//! basis index. Local operators are applied by index arithmetic rather than
//! by embedding into the joint space, so cost stays `O(D²·m)` for a joint
//! dimension `D` and local dimension `m`.

mod channel;
mod layout;
mod state;
mod swap;

use thiserror::Error;

pub use channel::{
    apply_channel, embedded_superoperator, random_channel, superoperator, ChannelResult, KrausChannel,
};
pub use layout::{Site, SiteLayout, SiteRole};
pub use state::{bell_pair, bell_vector, fidelity, partial_trace, DensityState};
pub use swap::{
    conjugate_channel_by_swap, exchange_operator, generalized_swap, heisenberg_swap, local_pauli,
    pauli_operator, swap_conjugated_superoperator, swap_local, PauliAxis,
};

/// Eigenvalue floor for positivity checks.
pub const EIGENVALUE_FLOOR: f64 = -1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("site index {index} out of range for {len} sites")]
    BadSite { index: usize, len: usize },
    #[error("site {0} listed more than once")]
    DuplicateSite(usize),
    #[error("site set must be nonempty")]
    EmptySiteSet,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("joint dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("site {0} has no paired ancilla")]
    Unpaired(usize),
    #[error("Kraus completeness violated: residual {residual:e}")]
    Completeness { residual: f64 },
    #[error("reference vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("selective channel has zero probability on this state")]
    ZeroSelection,
    #[error("invalid layout: {0}")]
    BadLayout(String),
}
