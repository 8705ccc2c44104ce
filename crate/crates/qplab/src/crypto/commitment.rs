//! EPR-based semi-canonical commitment with auxiliary input
//! ψ = (I⊗T)|EPR_λ⟩. Committing to 0 prepares k copies of |EPR_λ⟩ on
//! C_iR_i, committing to 1 uses k copies of ψ. Opening to 0 projects every
//! pair onto |EPR_λ⟩; opening to 1 swap-tests every pair against a fresh ψ.
//!
//! Per pair, R is the low λ qubits and C the high λ qubits; copy i sits on
//! qubits 2λi..2λ(i+1). The adversary's advice register Z sits above the
//! pairs and the receiver's copies A_i above Z.

use rand::Rng;
use serde::Serialize;

use crate::qcore::linalg::{self, CMat, CVec};
use crate::qcore::{check_cap, haar_unitary, rng_for, trace_distance, DensityMatrix, PureState, TOL};
use crate::verify::Verdict;
use crate::{QError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "phase", content = "bit", rename_all = "lowercase")]
pub enum Phase {
    Setup,
    Committed(bool),
    Revealed(bool),
}

#[derive(Debug, Clone)]
pub struct CommitmentSession {
    pub lambda: usize,
    pub k: usize,
    pub t: CMat,
    phase: Phase,
}

/// Registers held by the committer after the commit phase.
#[derive(Debug, Clone)]
pub struct Commitment {
    pub b: bool,
    pub k: usize,
    pub lambda: usize,
    /// State of one pair C_iR_i; the k pairs are in product.
    pub pair: PureState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RevealOutcome {
    pub opened: bool,
    pub per_copy: f64,
    pub accept: f64,
}

impl RevealOutcome {
    pub fn sample(&self, seed: u64) -> Verdict {
        let mut rng = rng_for(seed, 0);
        Verdict::from_bool(rng.random::<f64>() < self.accept)
    }
}

fn r_qubits(lambda: usize) -> Vec<usize> {
    (0..lambda).collect()
}

fn c_qubits(lambda: usize) -> Vec<usize> {
    (lambda..2 * lambda).collect()
}

impl CommitmentSession {
    pub fn new(lambda: usize, k: usize, t: CMat) -> Result<Self> {
        if lambda == 0 || k == 0 {
            return Err(QError::Invalid("λ and k must be positive".into()));
        }
        check_cap(2 * lambda)?;
        let d = 1usize << lambda;
        if t.nrows() != d || t.ncols() != d {
            return Err(QError::Dimension(format!("T is {}x{}, expected {d}x{d}", t.nrows(), t.ncols())));
        }
        let dev = (t.adjoint() * &t - linalg::identity(d)).camax();
        if dev > TOL {
            return Err(QError::Invalid(format!("T is not unitary (deviation {dev:e})")));
        }
        Ok(Self { lambda, k, t, phase: Phase::Setup })
    }

    /// T drawn from the Haar measure with the given seed.
    pub fn haar(lambda: usize, k: usize, seed: u64) -> Result<Self> {
        let t = haar_unitary(lambda, &mut rng_for(seed, 0))?;
        Self::new(lambda, k, t)
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn epr(&self) -> PureState {
        PureState::epr(self.lambda)
    }

    /// Auxiliary input (I⊗T)|EPR_λ⟩ with T on R.
    pub fn aux(&self) -> PureState {
        self.epr().apply(&self.t, &r_qubits(self.lambda)).expect("T fits R")
    }

    /// Honest per-pair state committing to `b`.
    pub fn pair(&self, b: bool) -> PureState {
        if b {
            self.aux()
        } else {
            self.epr()
        }
    }

    pub fn commit(&mut self, b: bool) -> Result<Commitment> {
        if self.phase != Phase::Setup {
            return Err(QError::Phase(format!("commit called in phase {:?}", self.phase)));
        }
        self.phase = Phase::Committed(b);
        Ok(Commitment { b, k: self.k, lambda: self.lambda, pair: self.pair(b) })
    }

    /// Exact acceptance of opening `opened` on the registers handed over.
    pub fn reveal(&mut self, opened: bool, com: &Commitment) -> Result<RevealOutcome> {
        if !matches!(self.phase, Phase::Committed(_)) {
            return Err(QError::Phase(format!("reveal called in phase {:?}", self.phase)));
        }
        if com.lambda != self.lambda || com.k != self.k {
            return Err(QError::Dimension("registers do not belong to this session".into()));
        }
        let per_copy = if opened {
            0.5 + 0.5 * self.aux().overlap_sq(&com.pair)?
        } else {
            self.epr().overlap_sq(&com.pair)?
        };
        self.phase = Phase::Revealed(opened);
        Ok(RevealOutcome { opened, per_copy, accept: per_copy.powi(self.k as i32) })
    }

    /// Receiver's view of the commitment to `b`: Tr_R over all k pairs.
    pub fn receiver_view(&self, b: bool) -> Result<DensityMatrix> {
        check_cap(self.k * self.lambda)?;
        Ok(self.pair(b).reduced(&c_qubits(self.lambda))?.tensor_power(self.k))
    }
}

impl Commitment {
    /// The committer applies `u` to every R_i.
    pub fn apply_r(&self, u: &CMat) -> Result<Commitment> {
        Ok(Commitment { pair: self.pair.apply(u, &r_qubits(self.lambda))?, ..self.clone() })
    }
}

/// TD between the receiver's views of the two commitments.
pub fn hiding_check(session: &CommitmentSession) -> Result<f64> {
    trace_distance(&session.receiver_view(false)?, &session.receiver_view(true)?)
}

/// (T1 on C ⊗ T2 on R) applied to |HALF⟩ = Σ_i |i‖0⟩|i‖0⟩ / √2^{λ−1}, where
/// the fixed bit is qubit 0 of each register.
pub fn half_state(lambda: usize, t1: &CMat, t2: &CMat) -> Result<PureState> {
    if lambda == 0 {
        return Err(QError::Invalid("λ must be positive".into()));
    }
    check_cap(2 * lambda)?;
    let d = 1usize << lambda;
    let mut v = CVec::zeros(d * d);
    let a = linalg::cr(1.0 / ((d / 2) as f64).sqrt());
    for j in (0..d).step_by(2) {
        v[j * d + j] = a;
    }
    PureState::new(2 * lambda, v)?.apply(t1, &c_qubits(lambda))?.apply(t2, &r_qubits(lambda))
}

/// Qubits of all R_i followed by Z, in the order U acts on them.
fn rz_qubits(lambda: usize, k: usize, z: usize) -> Vec<usize> {
    let mut q: Vec<usize> = (0..k).flat_map(|i| (0..lambda).map(move |j| 2 * lambda * i + j)).collect();
    q.extend(2 * lambda * k..2 * lambda * k + z);
    q
}

fn check_adversary(lambda: usize, k: usize, u: &CMat, advice: &PureState) -> Result<()> {
    let want = 1usize << (k * lambda + advice.n_qubits());
    if u.nrows() != want || u.ncols() != want {
        return Err(QError::Dimension(format!("U is {}x{}, expected {want}x{want} on R⊗Z", u.nrows(), u.ncols())));
    }
    Ok(())
}

/// ‖(|target⟩⟨target|)^{⊗k}_{CR} · U_{RZ} · |committed⟩^{⊗k}_{CR} ⊗ |η⟩_Z‖.
pub fn flip_value(target: &PureState, committed: &PureState, k: usize, u: &CMat, advice: &PureState) -> Result<f64> {
    if target.n_qubits() != committed.n_qubits() || target.n_qubits() % 2 != 0 {
        return Err(QError::Dimension("pair states differ in size".into()));
    }
    let lambda = target.n_qubits() / 2;
    check_adversary(lambda, k, u, advice)?;
    let n_cr = 2 * lambda * k;
    check_cap(n_cr + advice.n_qubits())?;
    let v = advice.tensor(&committed.tensor_power(k)).apply(u, &rz_qubits(lambda, k, advice.n_qubits()))?;
    let cr: Vec<usize> = (0..n_cr).collect();
    let m = linalg::coefficient_matrix(v.amplitudes(), v.n_qubits(), &cr);
    let proj = m.adjoint() * target.tensor_power(k).amplitudes();
    Ok(proj.norm())
}

fn swap_registers(x: usize, xs: &[usize], ys: &[usize]) -> usize {
    let mut y = x;
    for (&a, &b) in xs.iter().zip(ys) {
        let (ba, bb) = ((x >> a) & 1, (x >> b) & 1);
        y &= !((1 << a) | (1 << b));
        y |= (bb << a) | (ba << b);
    }
    y
}

/// (v01, v10): opening an honest 0-commitment as 1 (swap-projector form)
/// and an honest 1-commitment as 0 (EPR-projector form).
pub fn binding_game_values(session: &CommitmentSession, u: &CMat, advice: &PureState) -> Result<(f64, f64)> {
    let (lambda, k) = (session.lambda, session.k);
    check_adversary(lambda, k, u, advice)?;
    let z = advice.n_qubits();
    let n_cr = 2 * lambda * k;
    check_cap(2 * n_cr + z)?;
    let aux = session.aux();
    let v = aux
        .tensor_power(k)
        .tensor(&advice.tensor(&session.epr().tensor_power(k)))
        .apply(u, &rz_qubits(lambda, k, z))?;
    let mut w = v.amplitudes().clone();
    for i in 0..k {
        let xs: Vec<usize> = (2 * lambda * i..2 * lambda * (i + 1)).collect();
        let ys: Vec<usize> = xs.iter().map(|q| q + n_cr + z).collect();
        let mut swapped = CVec::zeros(w.len());
        for x in 0..w.len() {
            swapped[swap_registers(x, &xs, &ys)] = w[x];
        }
        w = (w + swapped) * linalg::cr(0.5);
    }
    let v01 = w.norm();
    let v10 = flip_value(&session.epr(), &aux, k, u, advice)?;
    Ok((v01.min(1.0), v10.min(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::haar_unitary;

    #[test]
    fn honest_openings_accept() {
        for b in [false, true] {
            let mut s = CommitmentSession::haar(2, 3, 4).unwrap();
            let com = s.commit(b).unwrap();
            let out = s.reveal(b, &com).unwrap();
            assert!((out.accept - 1.0).abs() < 1e-12);
            assert_eq!(out.sample(0), Verdict::Accept);
            assert_eq!(s.phase(), Phase::Revealed(b));
        }
    }

    #[test]
    fn phase_order_enforced() {
        let mut s = CommitmentSession::haar(1, 1, 0).unwrap();
        let com = s.pair(false);
        let fake = Commitment { b: false, k: 1, lambda: 1, pair: com };
        assert!(matches!(s.reveal(false, &fake), Err(QError::Phase(_))));
        let c = s.commit(false).unwrap();
        assert!(matches!(s.commit(true), Err(QError::Phase(_))));
        s.reveal(false, &c).unwrap();
        assert!(matches!(s.reveal(false, &c), Err(QError::Phase(_))));
    }

    #[test]
    fn identity_adversary_flip_to_one() {
        let mut s = CommitmentSession::haar(2, 1, 8).unwrap();
        let c = s.commit(false).unwrap();
        let out = s.reveal(true, &c).unwrap();
        let ov = s.aux().overlap_sq(&s.epr()).unwrap();
        assert!((out.per_copy - (0.5 + 0.5 * ov)).abs() < 1e-12);
    }

    #[test]
    fn perfect_hiding() {
        for (lambda, k, seed) in [(1, 1, 1), (2, 2, 2), (1, 3, 3)] {
            let s = CommitmentSession::haar(lambda, k, seed).unwrap();
            assert!(hiding_check(&s).unwrap() < 1e-10);
        }
        let s = CommitmentSession::new(2, 1, linalg::identity(4)).unwrap();
        assert!(hiding_check(&s).unwrap() < 1e-12);
    }

    #[test]
    fn binding_values_reference_cases() {
        let s = CommitmentSession::haar(1, 1, 12).unwrap();
        let none = PureState::zero(0);
        let (v01, v10) = binding_game_values(&s, &linalg::identity(2), &none).unwrap();
        let ov = s.epr().inner(&s.aux()).unwrap().norm();
        assert!((v10 - ov).abs() < 1e-12);
        assert!((v01 - (0.5 + 0.5 * ov * ov).sqrt()).abs() < 1e-12);
        let (_, v10) = binding_game_values(&s, &s.t.adjoint(), &none).unwrap();
        assert!((v10 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_state_bound() {
        let mut rng = rng_for(5, 0);
        for lambda in 1..=3 {
            for _ in 0..10 {
                let t1 = haar_unitary(lambda, &mut rng).unwrap();
                let t2 = haar_unitary(lambda, &mut rng).unwrap();
                let half = half_state(lambda, &t1, &t2).unwrap();
                let u = haar_unitary(lambda, &mut rng).unwrap();
                let v = flip_value(&PureState::epr(lambda), &half, 1, &u, &PureState::zero(0)).unwrap();
                assert!(v * v <= 0.75 + 1e-8);
            }
        }
    }

    #[test]
    fn product_adversary_multiplies() {
        let mut rng = rng_for(6, 0);
        let s = CommitmentSession::haar(1, 2, 7).unwrap();
        let u = haar_unitary(1, &mut rng).unwrap();
        let none = PureState::zero(0);
        let (_, v2) = binding_game_values(&s, &linalg::kron(&u, &u), &none).unwrap();
        let one = flip_value(&s.epr(), &s.aux(), 1, &u, &none).unwrap();
        assert!((v2 - one * one).abs() < 1e-12);
    }
}
