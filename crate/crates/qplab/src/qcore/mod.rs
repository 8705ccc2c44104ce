//! Exact state arithmetic, metrics and the gate model.

pub mod circuit;
pub mod linalg;
pub mod metrics;
pub mod random;
pub mod state;

pub use circuit::{Gate, GateCircuit, GateKind};
pub use linalg::{CMat, CVec, C64};
pub use metrics::{
    fidelity, helstrom_measurement, pgm, trace_distance, uhlmann_unitary, uhlmann_unitary_on,
    TwoOutcomePovm,
};
pub use random::{haar_state, haar_unitary, min_eigenpair, random_density, rng_for, QRng};
pub use state::{DensityMatrix, HermitianOperator, PureState};

/// Largest register the dense routines accept.
pub const MAX_QUBITS: usize = 12;
/// Validation tolerance for norms, hermiticity and trace.
pub const TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as outside the support.
pub const EIG_CUTOFF: f64 = 1e-12;

pub(crate) fn check_cap(n: usize) -> crate::Result<()> {
    if n > MAX_QUBITS {
        Err(crate::QError::Cap { n, cap: MAX_QUBITS })
    } else {
        Ok(())
    }
}
