//! Distinguishing an input from the maximally mixed state. In round i the
//! verifier sends ρ_in (b_i = 0) or I/2^λ (b_i = 1); the prover guesses b_i
//! and the verifier accepts when at least 5/8 of the guesses are right.

use rand::Rng;

use super::transcript::{Party, Payload, ProtocolTranscript, ProverStrategy, Strategy};
use crate::qcore::linalg;
use crate::qcore::{helstrom_measurement, rng_for, DensityMatrix, TwoOutcomePovm};
use crate::verify::amplify::binomial_tail;
use crate::verify::Verdict;
use crate::{QError, Result};

pub const NAME: &str = "mixedness";
pub const SCHEDULE: [Party; 2] = [Party::Verifier, Party::Prover];

/// Smallest number of correct guesses that accepts: ⌈5t/8⌉.
pub fn threshold(t: usize) -> usize {
    (5 * t).div_ceil(8)
}

/// The prover's per-register measurement; outcome 0 means "ρ_in".
pub(crate) fn guess_povm(prover: &ProverStrategy, rho_in: &DensityMatrix) -> Result<TwoOutcomePovm> {
    let d = rho_in.dim();
    match &prover.strategy {
        Strategy::Honest | Strategy::BestResponse => {
            let rho = prover.knowledge(rho_in)?;
            helstrom_measurement(rho, &DensityMatrix::maximally_mixed(rho.n_qubits()))
        }
        Strategy::Constant(bit) => {
            let (one, zero) = (linalg::identity(d), linalg::CMat::zeros(d, d));
            Ok(if *bit { TwoOutcomePovm { e0: zero, e1: one } } else { TwoOutcomePovm { e0: one, e1: zero } })
        }
        Strategy::Measure(p) if p.e0.nrows() == d => Ok(p.clone()),
        Strategy::Measure(_) => Err(QError::Dimension("measurement does not fit the register".into())),
        _ => Err(prover.unsupported(NAME)),
    }
}

/// Per-round probability that the guess matches the coin.
pub fn round_agreement(rho_in: &DensityMatrix, prover: &ProverStrategy) -> Result<f64> {
    let povm = guess_povm(prover, rho_in)?;
    let mixed = DensityMatrix::maximally_mixed(rho_in.n_qubits());
    Ok(0.5 * povm.prob(rho_in, 0) + 0.5 * povm.prob(&mixed, 1))
}

/// Exact acceptance Pr[Bin(t, q) ≥ ⌈5t/8⌉].
pub fn mixedness_accept_exact(rho_in: &DensityMatrix, t: usize, prover: &ProverStrategy) -> Result<f64> {
    let q = round_agreement(rho_in, prover)?;
    Ok(binomial_tail(t, q, threshold(t)))
}

pub fn mixedness_protocol(rho_in: &DensityMatrix, t: usize, prover: &ProverStrategy, seed: u64) -> Result<ProtocolTranscript> {
    if t == 0 {
        return Err(QError::Invalid("t must be positive".into()));
    }
    let povm = guess_povm(prover, rho_in)?;
    let mixed = DensityMatrix::maximally_mixed(rho_in.n_qubits());
    let mut rng = rng_for(seed, 0);
    let coins: Vec<bool> = (0..t).map(|_| rng.random::<bool>()).collect();
    let mut tr = ProtocolTranscript::new(NAME, &prover.label, seed);
    let regs: Vec<&DensityMatrix> = coins.iter().map(|&b| if b { &mixed } else { rho_in }).collect();
    tr.send(Party::Verifier, regs.iter().map(|r| Payload::state("A", r)).collect());
    // The prover sees only the registers.
    let guesses: Vec<bool> = regs.iter().map(|r| rng.random::<f64>() >= povm.prob(r, 0)).collect();
    tr.send(Party::Prover, vec![Payload::bits(&guesses)]);
    let agree = coins.iter().zip(&guesses).filter(|(b, g)| b == g).count();
    let q = 0.5 * povm.prob(rho_in, 0) + 0.5 * povm.prob(&mixed, 1);
    tr.finish(Verdict::from_bool(agree >= threshold(t)), binomial_tail(t, q, threshold(t)));
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::PureState;

    /// TD(|0⟩⟨0|, I/2) = ½.
    fn yes_input() -> DensityMatrix {
        PureState::zero(1).density()
    }

    #[test]
    fn no_case_is_binomial_tail() {
        let p = mixedness_accept_exact(&DensityMatrix::maximally_mixed(2), 16, &ProverStrategy::honest()).unwrap();
        assert!((p - 0.2272491455078125).abs() < 1e-12);
    }

    #[test]
    fn yes_case_three_quarters() {
        let q = round_agreement(&yes_input(), &ProverStrategy::honest()).unwrap();
        assert!((q - 0.75).abs() < 1e-12);
        let p = mixedness_accept_exact(&yes_input(), 64, &ProverStrategy::honest()).unwrap();
        assert!(p >= 0.95, "{p}");
    }

    #[test]
    fn constant_prover_is_coin_flip() {
        for bit in [false, true] {
            let p = mixedness_accept_exact(&yes_input(), 16, &ProverStrategy::constant(bit)).unwrap();
            assert!((p - 0.2272491455078125).abs() < 1e-12);
        }
    }

    #[test]
    fn transcript_shape_and_determinism() {
        let a = mixedness_protocol(&yes_input(), 8, &ProverStrategy::honest(), 4).unwrap();
        let b = mixedness_protocol(&yes_input(), 8, &ProverStrategy::honest(), 4).unwrap();
        assert_eq!(a, b);
        assert!(a.follows(&SCHEDULE) && a.is_complete());
        assert!(mixedness_protocol(&yes_input(), 8, &ProverStrategy::identity(), 4).is_err());
    }
}
