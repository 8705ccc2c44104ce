use super::linalg::{self, CMat};
use super::state::{check_same_dim, DensityMatrix, PureState};
use super::EIG_CUTOFF;
use crate::{QError, Result};

/// ½‖a − b‖₁.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_same_dim(a.dim(), b.dim())?;
    let diff = a.matrix() - b.matrix();
    let (vals, _) = linalg::eigh(&diff);
    Ok((0.5 * vals.iter().map(|l| l.abs()).sum::<f64>()).min(1.0))
}

/// ‖√a √b‖₁.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_same_dim(a.dim(), b.dim())?;
    let sa = linalg::psd_sqrt(a.matrix());
    let sb = linalg::psd_sqrt(b.matrix());
    Ok(linalg::trace_norm(&(sa * sb)).min(1.0))
}

/// Pure-state fidelity |⟨φ|ψ⟩|.
pub fn fidelity_pure(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm().min(1.0))
}

/// Unitary on the listed `b_qubits` maximizing |⟨ψ|(I⊗U)|φ⟩|. The maximum
/// equals the fidelity of the reduced states on the remaining qubits.
/// Bit j of the returned operator's index corresponds to `b_qubits[j]`.
pub fn uhlmann_unitary_on(phi: &PureState, psi: &PureState, b_qubits: &[usize]) -> Result<CMat> {
    check_same_dim(phi.dim(), psi.dim())?;
    let n = phi.n_qubits();
    linalg::check_qubits(b_qubits, n)?;
    let cphi = linalg::coefficient_matrix(phi.amplitudes(), n, b_qubits);
    let cpsi = linalg::coefficient_matrix(psi.amplitudes(), n, b_qubits);
    // ⟨ψ|U|φ⟩ = Tr(U C_φ C_ψ†); with C_φ C_ψ† = W S V†, U = V W† attains Tr S.
    let m = &cphi * cpsi.adjoint();
    let svd = m.svd(true, true);
    let w = svd.u.ok_or_else(|| QError::Invalid("svd failed".into()))?;
    let vt = svd.v_t.ok_or_else(|| QError::Invalid("svd failed".into()))?;
    Ok(vt.adjoint() * w.adjoint())
}

/// Uhlmann unitary for states on 2n qubits, with A the first n Kronecker
/// factors and B the last n (the low qubit indices 0..n).
pub fn uhlmann_unitary(phi: &PureState, psi: &PureState) -> Result<CMat> {
    if phi.n_qubits() % 2 != 0 {
        return Err(QError::Dimension("Uhlmann unitary needs an even register".into()));
    }
    let half = phi.n_qubits() / 2;
    let b: Vec<usize> = (0..half).collect();
    uhlmann_unitary_on(phi, psi, &b)
}

/// Two-outcome POVM {E0, E1}.
#[derive(Debug, Clone)]
pub struct TwoOutcomePovm {
    pub e0: CMat,
    pub e1: CMat,
}

impl TwoOutcomePovm {
    pub fn prob(&self, rho: &DensityMatrix, outcome: usize) -> f64 {
        let e = if outcome == 0 { &self.e0 } else { &self.e1 };
        rho.expectation(e).clamp(0.0, 1.0)
    }

    /// Success probability for equal priors, guessing 0 on ρ0 and 1 on ρ1.
    pub fn success(&self, rho0: &DensityMatrix, rho1: &DensityMatrix) -> f64 {
        0.5 * self.prob(rho0, 0) + 0.5 * self.prob(rho1, 1)
    }

    /// Error probability for equal priors.
    pub fn error(&self, rho0: &DensityMatrix, rho1: &DensityMatrix) -> f64 {
        0.5 * self.prob(rho0, 1) + 0.5 * self.prob(rho1, 0)
    }
}

/// Projector onto the positive part of ρ0 − ρ1 and its complement.
pub fn helstrom_measurement(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<TwoOutcomePovm> {
    check_same_dim(rho0.dim(), rho1.dim())?;
    let diff = rho0.matrix() - rho1.matrix();
    let (vals, vecs) = linalg::eigh(&diff);
    let e0 = linalg::spectral_apply(&vals, &vecs, |l| if l > EIG_CUTOFF { 1.0 } else { 0.0 });
    let e1 = linalg::identity(rho0.dim()) - &e0;
    Ok(TwoOutcomePovm { e0, e1 })
}

/// Pretty good measurement {½S^{-½}ρS^{-½}, ½S^{-½}σS^{-½}} with S = (ρ+σ)/2.
pub fn pgm(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<TwoOutcomePovm> {
    check_same_dim(rho.dim(), sigma.dim())?;
    let s = (rho.matrix() + sigma.matrix()).scale(0.5);
    let r = linalg::psd_pinv_sqrt(&s, EIG_CUTOFF);
    let e0 = (&r * rho.matrix() * &r).scale(0.5);
    let e1 = (&r * sigma.matrix() * &r).scale(0.5);
    Ok(TwoOutcomePovm { e0: linalg::hermitize(&e0), e1: linalg::hermitize(&e1) })
}
