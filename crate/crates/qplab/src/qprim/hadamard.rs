//! Hadamard test between two branch states.
//!
//! A control qubit in |+⟩ selects branch u0 (control 0) or u1 (control 1);
//! the control is then measured in the {|+⟩,|−⟩} basis and the register E in
//! the computational basis. Pr[±, e] = ¼‖P_e(u0 ± u1)‖².

use super::dist::{MeasurementOutcomeDist, Outcome};
use super::UNREACHABLE;
use crate::qcore::linalg::{self, cr, CVec, ZERO};
use crate::qcore::{DensityMatrix, PureState};
use crate::{QError, Result};

fn check_pair(u0: &PureState, u1: &PureState, e_qubits: &[usize]) -> Result<()> {
    if u0.n_qubits() != u1.n_qubits() {
        return Err(QError::Dimension(format!(
            "branches on {} and {} qubits",
            u0.n_qubits(),
            u1.n_qubits()
        )));
    }
    linalg::check_qubits(e_qubits, u0.n_qubits())
}

pub(crate) fn e_value(x: usize, e_qubits: &[usize]) -> usize {
    e_qubits.iter().enumerate().fold(0, |acc, (j, &q)| acc | (((x >> q) & 1) << j))
}

/// Joint (±, e) probabilities, indexed `[sign][e]` with sign 0 for |+⟩.
pub fn hadamard_probs(u0: &PureState, u1: &PureState, e_qubits: &[usize]) -> Result<[Vec<f64>; 2]> {
    check_pair(u0, u1, e_qubits)?;
    let de = 1usize << e_qubits.len();
    let mut p = [vec![0.0; de], vec![0.0; de]];
    let (a, b) = (u0.amplitudes(), u1.amplitudes());
    for x in 0..a.len() {
        let e = e_value(x, e_qubits);
        p[0][e] += 0.25 * (a[x] + b[x]).norm_sqr();
        p[1][e] += 0.25 * (a[x] - b[x]).norm_sqr();
    }
    Ok(p)
}

/// Full outcome distribution with labels "+e" / "-e" (e in decimal).
/// Post-states are the normalized branch combinations on the register.
pub fn hadamard_overlap_test(u0: &PureState, u1: &PureState, e_qubits: &[usize]) -> Result<MeasurementOutcomeDist> {
    let probs = hadamard_probs(u0, u1, e_qubits)?;
    let n = u0.n_qubits();
    let mut outcomes = Vec::new();
    for (s, sign) in [(0usize, 1.0), (1, -1.0)] {
        for (e, &prob) in probs[s].iter().enumerate() {
            let post = (prob > UNREACHABLE).then(|| {
                let mut v: CVec = (u0.amplitudes() + u1.amplitudes() * cr(sign)) * cr(0.5);
                for x in 0..v.len() {
                    if e_value(x, e_qubits) != e {
                        v[x] = ZERO;
                    }
                }
                DensityMatrix::from_raw(n, linalg::projector(&v) / cr(prob))
            });
            let label = format!("{}{}", if s == 0 { '+' } else { '-' }, e);
            outcomes.push(Outcome { label, prob, post });
        }
    }
    MeasurementOutcomeDist::new(outcomes)
}

/// E[X] for X = 2Z − Y with Y = [E = r], Z = [control + and E = r]:
/// Re⟨u0|P_r|u1⟩.
pub fn hadamard_x_expectation(u0: &PureState, u1: &PureState, e_qubits: &[usize], r: usize) -> Result<f64> {
    check_pair(u0, u1, e_qubits)?;
    let (a, b) = (u0.amplitudes(), u1.amplitudes());
    let mut acc = ZERO;
    for x in 0..a.len() {
        if e_value(x, e_qubits) == r {
            acc += a[x].conj() * b[x];
        }
    }
    Ok(acc.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{haar_state, rng_for, GateKind};
    use crate::qcore::linalg::kron_vec;

    /// Control-qubit circuit oracle: |0⟩|u0⟩ + |1⟩|u1⟩ built explicitly,
    /// Hadamard on the control, then computational-basis readout.
    fn circuit_probs(u0: &PureState, u1: &PureState, e_qubits: &[usize]) -> [Vec<f64>; 2] {
        let n = u0.n_qubits();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = kron_vec(&CVec::from_vec(vec![cr(h), ZERO]), u0.amplitudes())
            + kron_vec(&CVec::from_vec(vec![ZERO, cr(h)]), u1.amplitudes());
        let v = linalg::apply_op(&v, &GateKind::H.matrix(), &[n], n + 1);
        let de = 1 << e_qubits.len();
        let mut p = [vec![0.0; de], vec![0.0; de]];
        for x in 0..v.len() {
            let s = (x >> n) & 1;
            p[s][e_value(x, e_qubits)] += v[x].norm_sqr();
        }
        p
    }

    #[test]
    fn equal_and_orthogonal_branches() {
        let u = PureState::plus();
        assert!((hadamard_x_expectation(&u, &u, &[], 0).unwrap() - 1.0).abs() < 1e-14);
        let a = PureState::zero(1);
        let b = PureState::basis(1, 1);
        assert!(hadamard_x_expectation(&a, &b, &[], 0).unwrap().abs() < 1e-14);
        let d = hadamard_overlap_test(&a, &b, &[]).unwrap();
        assert!((d.prob("+0") - 0.5).abs() < 1e-14);
    }

    #[test]
    fn matches_control_circuit() {
        let mut rng = rng_for(21, 0);
        for _ in 0..10 {
            let u0 = haar_state(3, &mut rng).unwrap();
            let u1 = haar_state(3, &mut rng).unwrap();
            let e = [2, 0];
            let p = hadamard_probs(&u0, &u1, &e).unwrap();
            let q = circuit_probs(&u0, &u1, &e);
            for s in 0..2 {
                for r in 0..4 {
                    assert!((p[s][r] - q[s][r]).abs() < 1e-12);
                }
            }
            for r in 0..4 {
                let ex = hadamard_x_expectation(&u0, &u1, &e, r).unwrap();
                assert!((ex - (p[0][r] - p[1][r])).abs() < 1e-12);
            }
        }
    }
}
