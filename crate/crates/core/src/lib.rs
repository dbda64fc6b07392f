//! Simulation and verification toolkit for a randomized-swap defense of
//! quantum network storage against malicious operations.
//!
//! - [`schedule`]: closed-form catastrophe probabilities and overlap counts.
//! - [`mc`]: Monte Carlo timelines of defender blocks and attack bursts.
//! - [`qstate`]: dense density matrices, Kraus channels and SWAP operators.
//! - [`fock`]: fermionic and bosonic mode registers and the ladder-operator SWAP.
//! - [`protocol`]: multi-node protocol runs under an attack trace.
//! - [`secret`]: threshold sharing of the on-time schedule seed.

pub mod fock;
pub mod matrix;
pub mod mc;
pub mod protocol;
pub mod qstate;
pub mod rng;
pub mod schedule;
pub mod secret;
