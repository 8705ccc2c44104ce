use super::UNREACHABLE;
use crate::qcore::linalg::{cr, CMat};
use crate::qcore::{trace_distance, DensityMatrix};
use crate::{QError, Result};

/// Outcome of measuring a state with a sequence of projective tests.
#[derive(Debug, Clone)]
pub struct SequentialReport {
    /// ε_i = 1 − Tr(E_i ρ) for each test on the original state.
    pub eps: Vec<f64>,
    pub accept_prob: f64,
    /// State conditioned on every test accepting.
    pub post: Option<DensityMatrix>,
    pub td_to_input: Option<f64>,
    /// 1 − 4Σε_i.
    pub accept_lower_bound: f64,
    /// √(Σε_i).
    pub td_upper_bound: f64,
}

impl SequentialReport {
    pub fn respects_bounds(&self, tol: f64) -> bool {
        self.accept_prob >= self.accept_lower_bound - tol
            && self.td_to_input.is_none_or(|td| td <= self.td_upper_bound + tol)
    }
}

/// Apply the accepting projectors E_1, …, E_M in order.
pub fn sequential_measure(rho: &DensityMatrix, tests: &[CMat]) -> Result<SequentialReport> {
    let mut eps = Vec::with_capacity(tests.len());
    for e in tests {
        if e.nrows() != rho.dim() || e.ncols() != rho.dim() {
            return Err(QError::Dimension(format!("test of size {} on dim {}", e.nrows(), rho.dim())));
        }
        let dev = (e * e - e).camax().max((e - e.adjoint()).camax());
        if dev > 1e-8 {
            return Err(QError::NotProjector(dev));
        }
        eps.push((1.0 - rho.expectation(e)).max(0.0));
    }
    let mut sigma = rho.matrix().clone();
    for e in tests {
        sigma = e * sigma * e;
    }
    let accept_prob = sigma.trace().re.clamp(0.0, 1.0);
    let post = (accept_prob > UNREACHABLE)
        .then(|| DensityMatrix::from_raw(rho.n_qubits(), sigma / cr(accept_prob)));
    let td_to_input = match &post {
        Some(p) => Some(trace_distance(p, rho)?),
        None => None,
    };
    let s: f64 = eps.iter().sum();
    Ok(SequentialReport {
        eps,
        accept_prob,
        post,
        td_to_input,
        accept_lower_bound: 1.0 - 4.0 * s,
        td_upper_bound: s.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{identity, projector};
    use crate::qcore::{haar_state, random_density, rng_for, PureState};

    #[test]
    fn identity_tests_leave_state() {
        let mut rng = rng_for(2, 0);
        let rho = random_density(2, 3, &mut rng).unwrap();
        let r = sequential_measure(&rho, &[identity(4), identity(4)]).unwrap();
        assert!((r.accept_prob - 1.0).abs() < 1e-12);
        assert!(r.td_to_input.unwrap() < 1e-10);
    }

    #[test]
    fn single_test_probability() {
        let psi = PureState::plus();
        let e = projector(PureState::zero(1).amplitudes());
        let r = sequential_measure(&psi.density(), &[e]).unwrap();
        assert!((r.accept_prob - 0.5).abs() < 1e-14);
        assert!((r.eps[0] - 0.5).abs() < 1e-14);
        assert!(r.accept_prob >= r.accept_lower_bound);
    }

    #[test]
    fn rejects_non_projector() {
        let rho = DensityMatrix::maximally_mixed(1);
        let half = identity(2).scale(0.5);
        assert!(matches!(sequential_measure(&rho, &[half]), Err(QError::NotProjector(_))));
    }

    #[test]
    fn near_certain_sequences() {
        let mut rng = rng_for(13, 0);
        for _ in 0..10 {
            let psi = haar_state(2, &mut rng).unwrap();
            let tests: Vec<CMat> = (0..5)
                .map(|_| {
                    // Projector onto the span of a state close to ψ.
                    let noise = haar_state(2, &mut rng).unwrap();
                    let v = psi.amplitudes() + noise.amplitudes().scale(0.1);
                    projector(&(v.clone() / cr(v.norm())))
                })
                .collect();
            let r = sequential_measure(&psi.density(), &tests).unwrap();
            assert!(r.respects_bounds(1e-10));
        }
    }
}
