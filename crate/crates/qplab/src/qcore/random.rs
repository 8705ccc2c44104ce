use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::linalg::{self, c, cr, CMat, CVec};
use super::state::{fix_phase, DensityMatrix, HermitianOperator, PureState};
use super::check_cap;
use crate::Result;

/// Counter-based generator used for every stochastic operation.
pub type QRng = ChaCha8Rng;

/// Independent stream `stream` of the generator seeded by `seed`.
pub fn rng_for(seed: u64, stream: u64) -> QRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_c<R: Rng + ?Sized>(rng: &mut R) -> linalg::C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Haar-random pure state from a normalized complex Gaussian vector.
pub fn haar_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<PureState> {
    check_cap(n_qubits)?;
    let d = 1usize << n_qubits;
    let v = CVec::from_fn(d, |_, _| gaussian_c(rng));
    PureState::normalized(n_qubits, v)
}

/// Haar-random unitary on `n_qubits` via phase-corrected QR of a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<CMat> {
    check_cap(n_qubits)?;
    let d = 1usize << n_qubits;
    let g = CMat::from_fn(d, d, |_, _| gaussian_c(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 { rjj / cr(rjj.norm()) } else { cr(1.0) };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    Ok(q)
}

/// Random density matrix GG†/Tr(GG†) with G a d × rank Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(n_qubits: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    check_cap(n_qubits)?;
    let d = 1usize << n_qubits;
    let g = CMat::from_fn(d, rank.max(1), |_, _| gaussian_c(rng));
    let m = &g * g.adjoint();
    let t = m.trace().re;
    DensityMatrix::new(n_qubits, m / cr(t))
}

/// Ground energy and a (phase-fixed) ground state.
pub fn min_eigenpair(h: &HermitianOperator) -> Result<(f64, PureState)> {
    check_cap(h.n_qubits())?;
    let (vals, vecs) = h.eigen();
    let v = fix_phase(vecs.column(0).into_owned());
    Ok((vals[0], PureState::from_raw(h.n_qubits(), v)))
}
