//! Expected energies over eigen-decompositions of a mixed input.

use super::terms::{HamiltonianInstance, LocalTerm};
use crate::qcore::linalg::{self, CMat};
use crate::qcore::{DensityMatrix, PureState};
use crate::{QError, Result};

/// Ensemble {(p_i, ψ_i)} with Σ p_i ψ_iψ_i† = ρ.
pub type Decomposition = Vec<(f64, PureState)>;

/// Eigen-decomposition of ρ^{⊗copies}, descending with lexicographic
/// tie-break, dropping zero-weight vectors.
pub fn eigen_decomposition(rho: &DensityMatrix, copies: usize) -> Decomposition {
    rho.tensor_power(copies).support_decomposition()
}

/// Σ_i p_i ⟨η_i|H_{ψ_i}|η_i⟩ with η_i = witness(ψ_i).
pub fn expected_energy_over<F>(instance: &HamiltonianInstance, ensemble: &[(f64, PureState)], witness: F) -> Result<f64>
where
    F: Fn(&PureState) -> Result<PureState>,
{
    let mut e = 0.0;
    for (p, psi) in ensemble {
        let eta = witness(psi)?;
        e += p * instance.energy(psi, &eta)?;
    }
    Ok(e)
}

/// E_{ψ←D}[⟨η_ψ|H_ψ|η_ψ⟩] for D the eigen-decomposition of ρ^{⊗copies}.
pub fn lhwm_expected_energy<F>(instance: &HamiltonianInstance, rho: &DensityMatrix, copies: usize, witness: F) -> Result<f64>
where
    F: Fn(&PureState) -> Result<PureState>,
{
    if rho.n_qubits() * copies != instance.input_len() {
        return Err(QError::Dimension(format!(
            "ρ^⊗{copies} has {} qubits, input register {}",
            rho.n_qubits() * copies,
            instance.input_len()
        )));
    }
    expected_energy_over(instance, &eigen_decomposition(rho, copies), witness)
}

/// Projector onto the λ-eigenspace of a term (unweighted matrix).
pub fn sector_projector(term: &LocalTerm, lambda: f64) -> CMat {
    let (vals, vecs) = term.eigen();
    let d = vecs.nrows();
    let mut p = CMat::zeros(d, d);
    for (i, v) in vals.iter().enumerate() {
        if (v - lambda).abs() < 1e-9 {
            let col = vecs.column(i).into_owned();
            p += linalg::projector(&col);
        }
    }
    p
}

/// ‖Π_λ η‖ with Π_λ acting on the term's qubits.
pub fn sector_amplitude(eta: &PureState, term: &LocalTerm, lambda: f64) -> Result<f64> {
    linalg::check_qubits(&term.qubits, eta.n_qubits())?;
    let v = linalg::apply_op(eta.amplitudes(), &sector_projector(term, lambda), &term.qubits, eta.n_qubits());
    Ok(v.norm())
}

/// Uniform initialization: the sector amplitude is the same for every
/// ensemble member. Returns the common value (first member's).
pub fn uniform_initialization<F>(
    ensemble: &[(f64, PureState)],
    term: &LocalTerm,
    lambda: f64,
    witness: F,
    tol: f64,
) -> Result<Option<f64>>
where
    F: Fn(&PureState) -> Result<PureState>,
{
    let mut first = None;
    for (_, psi) in ensemble {
        let a = sector_amplitude(&witness(psi)?, term, lambda)?;
        match first {
            None => first = Some(a),
            Some(f) if (f - a).abs() > tol => return Ok(None),
            _ => {}
        }
    }
    Ok(first)
}
