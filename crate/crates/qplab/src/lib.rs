//! Dense small-system laboratory for quantum promise problems.
//!
//! Qubit ordering is little-endian throughout: qubit `q` is bit `q` of a
//! basis index. `a.tensor(&b)` is the Kronecker product `a ⊗ b`, so the
//! qubits of `b` come first (low indices) and those of `a` follow.

pub mod crypto;
pub mod error;
pub mod hamlab;
pub mod io;
pub mod proto;
pub mod qcore;
pub mod qprim;
pub mod verify;

pub use error::{QError, Result};
