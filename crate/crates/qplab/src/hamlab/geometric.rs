//! Subspace angles and the two-projector eigenvalue bounds.

use super::cook_levin::ClockLayout;
use crate::qcore::linalg::{self, cr, CMat, ONE, ZERO};
use crate::qcore::{GateCircuit, PureState};
use crate::{QError, Result};

const NULL_TOL: f64 = 1e-9;

/// Orthonormal basis (columns) of the null space of a Hermitian matrix.
pub fn null_space(h: &CMat) -> CMat {
    let (vals, vecs) = linalg::eigh(h);
    let cols: Vec<usize> = vals.iter().enumerate().filter(|(_, &v)| v.abs() < NULL_TOL).map(|(i, _)| i).collect();
    CMat::from_fn(h.nrows(), cols.len(), |r, c| vecs[(r, cols[c])])
}

/// Smallest eigenvalue above the null threshold; `None` for H = 0.
pub fn min_nonzero_eigenvalue(h: &CMat) -> Option<f64> {
    linalg::eigh(h).0.into_iter().find(|&v| v >= NULL_TOL)
}

/// arccos of the largest |⟨x|y⟩| over unit x ∈ span X, y ∈ span Y, with X
/// and Y given by orthonormal columns.
pub fn subspace_angle(x: &CMat, y: &CMat) -> Result<f64> {
    if x.ncols() == 0 || y.ncols() == 0 {
        return Err(QError::Invalid("zero-dimensional subspace".into()));
    }
    if x.nrows() != y.nrows() {
        return Err(QError::Dimension(format!("{} vs {}", x.nrows(), y.nrows())));
    }
    let s = linalg::singular_values(&(x.adjoint() * y));
    let top = s.iter().cloned().fold(0.0, f64::max);
    Ok(top.clamp(0.0, 1.0).acos())
}

#[derive(Debug, Clone, Copy)]
pub struct GeometricBounds {
    pub angle: f64,
    /// v used in the lower bound.
    pub v: f64,
    /// 2v·sin²(θ/2) ≤ λ_min(H1 + H2).
    pub lower: f64,
    pub lambda_min: f64,
    /// 1 + cos θ ≥ λ_max(Π_X + Π_Y).
    pub upper: f64,
    pub lambda_max_proj: f64,
}

impl GeometricBounds {
    pub fn holds(&self, tol: f64) -> bool {
        self.lower <= self.lambda_min + tol && self.lambda_max_proj <= self.upper + tol
    }
}

/// Bounds for H1, H2 ⪰ 0 with X = Null(H1), Y = Null(H2). When `v` is not
/// supplied the smaller of the two minimum nonzero eigenvalues is used.
pub fn geometric_bounds(h1: &CMat, h2: &CMat, v: Option<f64>) -> Result<GeometricBounds> {
    if h1.shape() != h2.shape() {
        return Err(QError::Dimension("operators differ in size".into()));
    }
    let x = null_space(h1);
    let y = null_space(h2);
    let angle = subspace_angle(&x, &y)?;
    let v = match v {
        Some(v) => v,
        None => {
            let a = min_nonzero_eigenvalue(h1).unwrap_or(f64::INFINITY);
            let b = min_nonzero_eigenvalue(h2).unwrap_or(f64::INFINITY);
            a.min(b)
        }
    };
    let lambda_min = linalg::eigh(&(h1 + h2)).0[0];
    let px = &x * x.adjoint();
    let py = &y * y.adjoint();
    let lambda_max_proj = *linalg::eigh(&(px + py)).0.last().unwrap();
    let s = (angle / 2.0).sin();
    Ok(GeometricBounds {
        angle,
        v,
        lower: 2.0 * v * s * s,
        lambda_min,
        upper: 1.0 + angle.cos(),
        lambda_max_proj,
    })
}

/// Operators after the change of basis onto legal clock strings, on
/// IWA ⊗ C^{m+1} (clock as the most significant factor):
/// H'_in + H'_out and H'_prop.
#[derive(Debug, Clone)]
pub struct PrimedOperators {
    pub in_out: CMat,
    pub prop: CMat,
}

fn clock_proj(dim: usize, t: usize) -> CMat {
    let mut m = CMat::zeros(dim, dim);
    m[(t, t)] = ONE;
    m
}

pub fn primed_operators(verifier: &GateCircuit, layout: ClockLayout, psi_c: &PureState) -> Result<PrimedOperators> {
    if psi_c.n_qubits() != layout.n_input() || verifier.n_qubits != layout.nv() {
        return Err(QError::Dimension("primed operators: register mismatch".into()));
    }
    let nv = layout.nv();
    let dv = 1usize << nv;
    let dt = layout.m + 1;
    crate::qcore::check_cap(nv + 2)?;
    let id = linalg::identity(dv);
    // (I − |ψ⟩⟨ψ|^c) on I, identity on W and A.
    let pin = id.clone() - linalg::embed(psi_c.density().matrix(), &(0..layout.n_input()).collect::<Vec<_>>(), nv);
    // I − |0⟩⟨0|_A
    let anc = layout.anc_qubits();
    let zero_a = linalg::projector(PureState::zero(anc.len()).amplitudes());
    let pa = id.clone() - linalg::embed(&zero_a, &anc, nv);
    // V†(|0⟩⟨0|_{ans})V
    let ans0 = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
    let u = verifier.unitary();
    let pout = u.adjoint() * linalg::embed(&ans0, &[layout.answer()], nv) * &u;
    let in_out = linalg::kron(&clock_proj(dt, 0), &(pin + pa)) + linalg::kron(&clock_proj(dt, layout.m), &pout);
    let mut prop = CMat::zeros(dv * dt, dv * dt);
    for t in 0..layout.m {
        let mut c = CMat::zeros(dt, dt);
        c[(t, t)] = ONE;
        c[(t + 1, t + 1)] = ONE;
        c[(t + 1, t)] = cr(-1.0);
        c[(t, t + 1)] = cr(-1.0);
        prop += linalg::kron(&c, &id);
    }
    Ok(PrimedOperators { in_out, prop })
}

/// Smallest nonzero eigenvalue of the path-graph Laplacian on m+1 vertices.
pub fn prop_gap(m: usize) -> f64 {
    2.0 * (1.0 - (std::f64::consts::PI / (m + 1) as f64).cos())
}
