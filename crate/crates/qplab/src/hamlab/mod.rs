//! Hamiltonian promise instances and the clock construction.

pub mod cook_levin;
pub mod geometric;
pub mod lhwm;
pub mod terms;

pub use cook_levin::{
    cook_levin, cook_levin_variant, history_state, honest_history_circuit, identity_verifier, random_verifier, reference_b, BSource, CircuitWitnessSpec,
    ClockInstance, ClockLayout, DEFAULT_PENALTY,
};
pub use geometric::{geometric_bounds, primed_operators, subspace_angle, GeometricBounds};
pub use lhwm::{eigen_decomposition, expected_energy_over, lhwm_expected_energy, uniform_initialization};
pub use terms::{HamiltonianInstance, LocalTerm, Variant};

/// Full matrix of H_ψ.
pub fn assemble(instance: &HamiltonianInstance, psi: &crate::qcore::PureState) -> crate::Result<crate::qcore::HermitianOperator> {
    instance.assemble(psi)
}
