//! Identify which of an ordered list of candidate states the input is, by
//! binary search over membership queries with measure-and-rewind.
//!
//! A query splits the live interval [start, end] at mid and asks whether
//! the input lies in (mid, end]. It is realized on the input register plus
//! one answer qubit: V_s rotates the answer qubit to |s_i⟩ with amplitude
//! √(1−ε) on the i-th (orthonormalized) candidate direction, the answer is
//! measured and V_s† is applied.

use crate::qcore::linalg::{self, cr, CMat};
use crate::qcore::{check_cap, rng_for, DensityMatrix, PureState};
use crate::qprim::{sequential_measure, SequentialReport, UNREACHABLE};
use crate::{QError, Result};
use rand::Rng;

/// Candidates with strictly increasing labels and their measurement data.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub labels: Vec<usize>,
    pub states: Vec<PureState>,
    /// Löwdin-orthonormalized candidate directions (columns).
    basis: CMat,
    pub eps: f64,
}

impl CandidateSet {
    pub fn new(cands: Vec<(usize, PureState)>, eps: f64) -> Result<Self> {
        if cands.is_empty() {
            return Err(QError::Invalid("empty candidate set".into()));
        }
        if cands.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(QError::Invalid("candidate labels are not sorted".into()));
        }
        if !(0.0..0.5).contains(&eps) {
            return Err(QError::Invalid(format!("per-test error {eps} outside [0, ½)")));
        }
        let n = cands[0].1.n_qubits();
        check_cap(n + 1)?;
        if cands.iter().any(|c| c.1.n_qubits() != n) {
            return Err(QError::Dimension("candidates differ in size".into()));
        }
        let k = cands.len();
        let c = CMat::from_fn(1 << n, k, |r, j| cands[j].1.amplitudes()[r]);
        let gram = c.adjoint() * &c;
        let (vals, _) = linalg::eigh(&gram);
        if vals[0] < 1e-9 {
            return Err(QError::Invalid("candidates are linearly dependent".into()));
        }
        let basis = &c * linalg::psd_pinv_sqrt(&gram, 0.0);
        let (labels, states) = cands.into_iter().unzip();
        Ok(Self { labels, states, basis, eps })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn n(&self) -> usize {
        self.states[0].n_qubits()
    }

    /// Projector onto answer 1 for the split: indices in (mid, end] answer 1.
    pub fn query_projector(&self, start: usize, mid: usize, end: usize) -> CMat {
        let n = self.n();
        let d = 1usize << n;
        let (c, s) = ((1.0 - self.eps).sqrt(), self.eps.sqrt());
        // R_b maps |0⟩ to √(1−ε)|b⟩ + √ε|1−b⟩.
        let r0 = CMat::from_row_slice(2, 2, &[cr(c), cr(-s), cr(s), cr(c)]);
        let r1 = CMat::from_row_slice(2, 2, &[cr(s), cr(c), cr(c), cr(-s)]);
        let mut v = CMat::zeros(2 * d, 2 * d);
        let mut rest = linalg::identity(d);
        for i in start..=end {
            let e = self.basis.column(i).into_owned();
            let p = linalg::projector(&e);
            rest -= &p;
            let r = if i > mid { &r1 } else { &r0 };
            v += linalg::kron(r, &p);
        }
        v += linalg::kron(&linalg::identity(2), &rest);
        let one = CMat::from_row_slice(2, 2, &[cr(0.0), cr(0.0), cr(0.0), cr(1.0)]);
        let p1 = linalg::kron(&one, &linalg::identity(d));
        linalg::hermitize(&(v.adjoint() * p1 * v))
    }

    /// Correct-answer projectors along the search path of index `truth`.
    pub fn path_tests(&self, truth: usize) -> Vec<CMat> {
        let d2 = 2usize << self.n();
        let mut tests = Vec::new();
        let (mut start, mut end) = (0, self.len() - 1);
        while start < end {
            let mid = (start + end) / 2;
            let e = self.query_projector(start, mid, end);
            if truth > mid {
                tests.push(e);
                start = mid + 1;
            } else {
                tests.push(linalg::identity(d2) - e);
                end = mid;
            }
        }
        tests
    }
}

fn with_answer_qubit(psi: &PureState) -> DensityMatrix {
    PureState::zero(1).tensor(psi).density()
}

#[derive(Debug, Clone)]
pub struct IdentifyExact {
    pub success: f64,
    pub report: SequentialReport,
}

impl IdentifyExact {
    /// 1 − 4Σε_i over the queries on the path.
    pub fn union_bound(&self) -> f64 {
        self.report.accept_lower_bound
    }
}

/// Exact probability that the search returns `truth` on input candidate `truth`.
pub fn identify_exact(set: &CandidateSet, truth: usize) -> Result<IdentifyExact> {
    if truth >= set.len() {
        return Err(QError::Invalid(format!("index {truth} out of range")));
    }
    let rho = with_answer_qubit(&set.states[truth]);
    let report = sequential_measure(&rho, &set.path_tests(truth))?;
    Ok(IdentifyExact { success: report.accept_prob, report })
}

/// One sampled run on input ψ: returns the label found.
pub fn identify_state(set: &CandidateSet, psi: &PureState, seed: u64) -> Result<usize> {
    if psi.n_qubits() != set.n() {
        return Err(QError::Dimension("input size differs from candidates".into()));
    }
    let mut rng = rng_for(seed, 0);
    let mut v = PureState::zero(1).tensor(psi).into_amplitudes();
    let (mut start, mut end) = (0, set.len() - 1);
    while start < end {
        let mid = (start + end) / 2;
        let e = set.query_projector(start, mid, end);
        let yes = &e * &v;
        let p1 = yes.norm_squared();
        if rng.random::<f64>() < p1 {
            v = yes / cr(p1.sqrt());
            start = mid + 1;
        } else {
            let no = &v - &e * &v;
            let p0 = no.norm_squared().max(UNREACHABLE);
            v = no / cr(p0.sqrt());
            end = mid;
        }
    }
    Ok(set.labels[start])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{haar_state, rng_for};

    #[test]
    fn single_candidate() {
        let set = CandidateSet::new(vec![(7, PureState::plus())], 0.01).unwrap();
        assert_eq!(identify_state(&set, &PureState::plus(), 0).unwrap(), 7);
        assert!((identify_exact(&set, 0).unwrap().success - 1.0).abs() < 1e-12);
    }

    #[test]
    fn basis_states_exact() {
        let cands: Vec<(usize, PureState)> = (0..4).map(|i| (i, PureState::basis(2, i))).collect();
        let set = CandidateSet::new(cands, 0.0).unwrap();
        for i in 0..4 {
            assert!((identify_exact(&set, i).unwrap().success - 1.0).abs() < 1e-12);
            assert_eq!(identify_state(&set, &PureState::basis(2, i), i as u64).unwrap(), i);
        }
    }

    #[test]
    fn unsorted_rejected() {
        let c = vec![(2, PureState::zero(1)), (1, PureState::basis(1, 1))];
        assert!(CandidateSet::new(c, 0.0).is_err());
    }

    #[test]
    fn near_orthogonal_union_bound() {
        let mut rng = rng_for(71, 0);
        let eps = 1e-3;
        let cands: Vec<(usize, PureState)> = (0..8)
            .map(|i| {
                let noise = haar_state(3, &mut rng).unwrap();
                let v = PureState::basis(3, i).amplitudes() + noise.amplitudes() * cr(1e-3);
                (i, PureState::normalized(3, v).unwrap())
            })
            .collect();
        let set = CandidateSet::new(cands, eps).unwrap();
        for i in 0..8 {
            let ex = identify_exact(&set, i).unwrap();
            assert!(ex.success >= 1.0 - 12.0 * eps, "{}", ex.success);
            assert!(ex.report.respects_bounds(1e-10));
        }
    }
}
