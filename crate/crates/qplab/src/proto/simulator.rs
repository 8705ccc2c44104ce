//! Honest-verifier simulators. The view after message i holds the
//! verifier's private data and the registers in its hands; classical bits
//! are written as diagonal qubits. Each simulator is compared with the real
//! view of the honest interaction by exact trace distance.

use super::efi::{efi_joint, EfiPair};
use super::mixedness::guess_povm;
use super::qsd::Purified;
use super::transcript::ProverStrategy;
use crate::qcore::linalg::{self, cr, CMat, CVec};
use crate::qcore::{check_cap, trace_distance, uhlmann_unitary, uhlmann_unitary_on, DensityMatrix, PureState};
use crate::{QError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolId {
    Mixedness,
    MaxEnt,
    Coqsdwp,
    PublicCoin,
    Efi,
}

impl ProtocolId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mixedness" => Ok(ProtocolId::Mixedness),
            "maxent" => Ok(ProtocolId::MaxEnt),
            "coqsdwp" => Ok(ProtocolId::Coqsdwp),
            "publiccoin" => Ok(ProtocolId::PublicCoin),
            "efi" => Ok(ProtocolId::Efi),
            other => Err(QError::Invalid(format!("unknown protocol {other}"))),
        }
    }

    pub fn messages(self) -> usize {
        match self {
            ProtocolId::PublicCoin => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub enum SimInput {
    Mixedness { rho_in: DensityMatrix, t: usize },
    MaxEnt { phi_in: PureState, t: usize },
    Qsd { pair: Purified },
    Efi { pair: EfiPair, rho_a: DensityMatrix, rho_b: DensityMatrix, t: usize },
}

#[derive(Debug, Clone)]
pub struct SimulatedView {
    pub protocol: ProtocolId,
    pub message: usize,
    pub xi: DensityMatrix,
    pub real: DensityMatrix,
    pub td: f64,
}

fn classical(n_bits: usize, probs: &[f64]) -> Result<DensityMatrix> {
    let d = CVec::from_iterator(probs.len(), probs.iter().map(|&p| cr(p)));
    DensityMatrix::new(n_bits, CMat::from_diagonal(&d))
}

/// Σ_b p_b |b⟩⟨b| ⊗ ρ_b with the bit above the quantum part.
fn cq(parts: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
    let n = parts[0].1.n_qubits();
    let mut m = CMat::zeros(0, 0);
    for (b, (p, r)) in parts.iter().enumerate() {
        let mut e = CMat::zeros(parts.len(), parts.len());
        e[(b, b)] = cr(*p);
        let term = linalg::kron(&e, r.matrix());
        m = if b == 0 { term } else { m + term };
    }
    DensityMatrix::new(n + parts.len().trailing_zeros() as usize, m)
}

fn rounds(view: &DensityMatrix, t: usize) -> Result<DensityMatrix> {
    check_cap(view.n_qubits() * t)?;
    Ok(view.tensor_power(t))
}

fn input_mismatch(id: ProtocolId) -> QError {
    QError::Invalid(format!("inputs do not belong to protocol {id:?}"))
}

/// Simulated and real view after message `i` (1-based).
pub fn hv_simulator(id: &str, input: &SimInput, i: usize) -> Result<SimulatedView> {
    let protocol = ProtocolId::parse(id)?;
    if i == 0 || i > protocol.messages() {
        return Err(QError::Invalid(format!("{id} has {} messages, asked for {i}", protocol.messages())));
    }
    let honest = ProverStrategy::honest();
    let (xi, real) = match (protocol, input) {
        (ProtocolId::Mixedness, SimInput::Mixedness { rho_in, t }) => {
            let mixed = DensityMatrix::maximally_mixed(rho_in.n_qubits());
            if i == 1 {
                // The simulator runs the verifier's first step.
                let v = rounds(&cq(&[(0.5, rho_in), (0.5, &mixed)])?, *t)?;
                (v.clone(), v)
            } else {
                // Bits (b, b') with index b + 2b'; the simulator copies b w.p. ¾.
                let povm = guess_povm(&honest, rho_in)?;
                let (p00, p11) = (povm.prob(rho_in, 0), povm.prob(&mixed, 1));
                let real = classical(2, &[0.5 * p00, 0.5 * (1.0 - p11), 0.5 * (1.0 - p00), 0.5 * p11])?;
                let sim = classical(2, &[0.375, 0.125, 0.125, 0.375])?;
                (rounds(&sim, *t)?, rounds(&real, *t)?)
            }
        }
        (ProtocolId::MaxEnt, SimInput::MaxEnt { phi_in, t }) => {
            let lambda = phi_in.n_qubits() / 2;
            let epr = PureState::epr(lambda);
            if i == 1 {
                let a: Vec<usize> = (lambda..2 * lambda).collect();
                let v = rounds(&epr.reduced(&a)?, *t)?;
                (v.clone(), v)
            } else {
                let u = uhlmann_unitary(&epr, phi_in)?;
                let b: Vec<usize> = (0..lambda).collect();
                let omega = epr.apply(&u, &b)?;
                (rounds(&phi_in.density(), *t)?, rounds(&omega.density(), *t)?)
            }
        }
        (ProtocolId::Coqsdwp, SimInput::Qsd { pair }) => {
            if i == 1 {
                let v = pair.sigma(0)?;
                (v.clone(), v)
            } else {
                let u = uhlmann_unitary_on(&pair.psi[0], &pair.psi[1], &pair.b_qubits())?;
                let omega = pair.psi[0].apply(&u, &pair.b_qubits())?;
                (pair.psi[1].density(), omega.density())
            }
        }
        (ProtocolId::PublicCoin, SimInput::Qsd { pair }) => {
            let s0 = pair.sigma(0)?;
            match i {
                1 => (s0.clone(), s0),
                2 => {
                    let v = cq(&[(0.5, &s0), (0.5, &s0)])?;
                    (v.clone(), v)
                }
                _ => {
                    let u = uhlmann_unitary_on(&pair.psi[0], &pair.psi[1], &pair.b_qubits())?;
                    let omega = pair.psi[0].apply(&u, &pair.b_qubits())?.density();
                    let p0 = pair.psi[0].density();
                    let real = cq(&[(0.5, &p0), (0.5, &omega)])?;
                    let sim = cq(&[(0.5, &p0), (0.5, &pair.psi[1].density())])?;
                    (sim, real)
                }
            }
        }
        (ProtocolId::Efi, SimInput::Efi { pair, rho_a, rho_b, t }) => {
            if i == 1 {
                // Coin n_i above the pair (A_i, B_i), B_i on the low qubits.
                let straight = rho_a.tensor(rho_b);
                let swapped = rho_b.tensor(rho_a);
                let v = rounds(&cq(&[(0.5, &straight), (0.5, &swapped)])?, *t)?;
                (v.clone(), v)
            } else {
                let nt = 1usize << t;
                check_cap(2 * t)?;
                let joint = efi_joint(pair, rho_a, rho_b, *t, &honest)?;
                let mut sim = vec![0.0; nt * nt];
                for n in 0..nt {
                    sim[n + nt * n] = 1.0 / nt as f64;
                }
                (classical(2 * t, &sim)?, classical(2 * t, &joint)?)
            }
        }
        _ => return Err(input_mismatch(protocol)),
    };
    let td = trace_distance(&xi, &real)?;
    Ok(SimulatedView { protocol, message: i, xi, real, td })
}
