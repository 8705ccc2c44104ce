//! Testing whether φ_in on 2λ qubits is maximally entangled. The verifier
//! keeps the A halves of t EPR pairs and sends the B halves; the prover
//! returns them, and each pair AB is swap-tested against a copy of φ_in.
//! B is the low λ qubits in both φ_in and the EPR pairs.

use rand::Rng;

use super::transcript::{Party, Payload, ProtocolTranscript, ProverStrategy, Strategy};
use crate::qcore::linalg::{self, CMat};
use crate::qcore::{fidelity, rng_for, uhlmann_unitary, DensityMatrix, PureState};
use crate::verify::Verdict;
use crate::{QError, Result};

pub const NAME: &str = "maxent";
pub const SCHEDULE: [Party; 2] = [Party::Verifier, Party::Prover];

fn half(phi_in: &PureState) -> Result<usize> {
    if phi_in.n_qubits() % 2 != 0 || phi_in.n_qubits() == 0 {
        return Err(QError::Dimension("input must have 2λ qubits".into()));
    }
    Ok(phi_in.n_qubits() / 2)
}

fn a_qubits(lambda: usize) -> Vec<usize> {
    (lambda..2 * lambda).collect()
}

/// F(Tr_B φ_in, I/2^λ).
pub fn fidelity_to_mixed(phi_in: &PureState) -> Result<f64> {
    let lambda = half(phi_in)?;
    fidelity(&phi_in.reduced(&a_qubits(lambda))?, &DensityMatrix::maximally_mixed(lambda))
}

/// Trace distance from φ_in to the nearest maximally entangled state.
pub fn distance_to_max_entangled(phi_in: &PureState) -> Result<f64> {
    let f = fidelity_to_mixed(phi_in)?;
    Ok((1.0 - f * f).max(0.0).sqrt())
}

/// Per-round pass bound 1 − ε²/2 for inputs at distance ≥ ε.
pub fn soundness_bound(eps: f64) -> f64 {
    1.0 - 0.5 * eps * eps
}

/// Unitary the prover applies to each B half.
fn reply(prover: &ProverStrategy, phi_in: &PureState, lambda: usize) -> Result<CMat> {
    let d = 1usize << lambda;
    match &prover.strategy {
        // Any channel on B leaves Tr_B = I/d, so the Uhlmann unitary is optimal.
        Strategy::Honest | Strategy::BestResponse => uhlmann_unitary(&PureState::epr(lambda), prover.knowledge(phi_in)?),
        Strategy::Identity => Ok(linalg::identity(d)),
        Strategy::Unitary(u) if u.nrows() == d => Ok(u.clone()),
        Strategy::Unitary(_) => Err(QError::Dimension("unitary does not fit register B".into())),
        _ => Err(prover.unsupported(NAME)),
    }
}

fn returned_pair(u: &CMat, lambda: usize) -> Result<PureState> {
    let b: Vec<usize> = (0..lambda).collect();
    PureState::epr(lambda).apply(u, &b)
}

/// Exact single-round swap-test pass probability ½ + ½|⟨φ_in|ω⟩|².
pub fn maxent_round_pass(phi_in: &PureState, prover: &ProverStrategy) -> Result<f64> {
    let lambda = half(phi_in)?;
    let omega = returned_pair(&reply(prover, phi_in, lambda)?, lambda)?;
    Ok(0.5 + 0.5 * omega.overlap_sq(phi_in)?)
}

pub fn max_entangled_protocol(phi_in: &PureState, t: usize, prover: &ProverStrategy, seed: u64) -> Result<ProtocolTranscript> {
    if t == 0 {
        return Err(QError::Invalid("t must be positive".into()));
    }
    let lambda = half(phi_in)?;
    let b: Vec<usize> = (0..lambda).collect();
    let mut tr = ProtocolTranscript::new(NAME, &prover.label, seed);
    let sent = PureState::epr(lambda).reduced(&b)?;
    tr.send(Party::Verifier, vec![Payload::state("B", &sent); t]);
    let u = reply(prover, phi_in, lambda)?;
    let omega = returned_pair(&u, lambda)?;
    tr.send(Party::Prover, vec![Payload::state("B", &omega.reduced(&b)?); t]);
    let pass = 0.5 + 0.5 * omega.overlap_sq(phi_in)?;
    let mut rng = rng_for(seed, 0);
    let all = (0..t).map(|_| rng.random::<f64>() < pass).fold(true, |acc, x| acc & x);
    tr.finish(Verdict::from_bool(all), pass.powi(t as i32));
    Ok(tr)
}
