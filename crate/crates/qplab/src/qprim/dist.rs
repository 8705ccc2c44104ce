use rand::Rng;

use super::sampler::sample_index;
use super::UNREACHABLE;
use crate::qcore::DensityMatrix;
use crate::{QError, Result};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub label: String,
    pub prob: f64,
    /// Normalized post-measurement state; `None` when unreachable.
    pub post: Option<DensityMatrix>,
}

/// Finite distribution over labelled outcomes.
#[derive(Debug, Clone)]
pub struct MeasurementOutcomeDist {
    pub outcomes: Vec<Outcome>,
}

impl MeasurementOutcomeDist {
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        let mut total = 0.0;
        for o in &outcomes {
            if o.prob < -1e-10 {
                return Err(QError::Invalid(format!("negative probability {}", o.prob)));
            }
            total += o.prob;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(QError::Invalid(format!("probabilities sum to {total}")));
        }
        let outcomes = outcomes
            .into_iter()
            .map(|mut o| {
                o.prob = o.prob.max(0.0);
                if o.prob <= UNREACHABLE {
                    o.post = None;
                }
                o
            })
            .collect();
        Ok(Self { outcomes })
    }

    pub fn prob(&self, label: &str) -> f64 {
        self.outcomes.iter().filter(|o| o.label == label).map(|o| o.prob).sum()
    }

    pub fn get(&self, label: &str) -> Option<&Outcome> {
        self.outcomes.iter().find(|o| o.label == label)
    }

    pub fn probs(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.prob).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &str {
        &self.outcomes[sample_index(&self.probs(), rng)].label
    }
}

/// Computational-basis outcome probabilities of the listed qubits of a pure
/// vector (bit j of the outcome is `qubits[j]`).
pub fn register_probs(psi: &crate::qcore::PureState, qubits: &[usize]) -> Result<Vec<f64>> {
    crate::qcore::linalg::check_qubits(qubits, psi.n_qubits())?;
    let mut p = vec![0.0; 1 << qubits.len()];
    for (x, a) in psi.amplitudes().iter().enumerate() {
        p[super::hadamard::e_value(x, qubits)] += a.norm_sqr();
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{c, complete_unitary, CMat, CVec};
    use crate::qcore::{haar_unitary, rng_for, PureState};
    use rand::Rng;

    // An isometry sending |i⟩_A to Σ_x β_i^x |x⟩_B |i, x⟩_C has orthonormal
    // conditional post-states, so label statistics of a superposition mix
    // without interference.
    #[test]
    fn non_interference() {
        let mut rng = rng_for(31, 0);
        let (na, nb) = (2usize, 1usize);
        let (da, db) = (1usize << na, 1usize << nb);
        let nc = na + nb;
        let n = nb + nc;
        for _ in 0..10 {
            let basis = haar_unitary(na, &mut rng).unwrap();
            let betas: Vec<Vec<f64>> = (0..da)
                .map(|_| {
                    let w: Vec<f64> = (0..db).map(|_| rng.random::<f64>() + 0.05).collect();
                    let s: f64 = w.iter().sum();
                    w.into_iter().map(|x| (x / s).sqrt()).collect()
                })
                .collect();
            // Image of ψ_i = basis column i; B is the top qubit, C = (i, x) below.
            let image = |i: usize| -> CVec {
                let mut v = CVec::zeros(1 << n);
                for x in 0..db {
                    let cidx = i | (x << na);
                    v[(x << nc) | cidx] = c(betas[i][x], 0.0);
                }
                v
            };
            let mut cols = CMat::zeros(1 << n, da);
            for i in 0..da {
                cols.set_column(i, &image(i));
            }
            // Map the ψ basis onto those images (as a unitary on the full space).
            let iso = complete_unitary(&cols);
            let alphas = PureState::normalized(na, CVec::from_fn(da, |_, _| c(rng.random::<f64>(), rng.random::<f64>()))).unwrap();
            let input = &basis * alphas.amplitudes();
            // Express input in the ψ basis and push through.
            let coeffs = basis.adjoint() * &input;
            let mut out = CVec::zeros(1 << n);
            for i in 0..da {
                out += iso.column(i) * coeffs[i];
            }
            let out = PureState::new(n, out).unwrap();
            let bq: Vec<usize> = (nc..n).collect();
            let p = register_probs(&out, &bq).unwrap();
            for x in 0..db {
                let want: f64 = (0..da).map(|i| coeffs[i].norm_sqr() * betas[i][x] * betas[i][x]).sum();
                assert!((p[x] - want).abs() < 1e-8);
            }
        }
    }
}
