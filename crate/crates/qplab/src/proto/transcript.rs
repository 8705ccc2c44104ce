use serde::{Deserialize, Serialize};

use crate::io::{mat_to_json, MatrixJson};
use crate::qcore::linalg::CMat;
use crate::qcore::{DensityMatrix, TwoOutcomePovm};
use crate::verify::Verdict;
use crate::{QError, Result};

/// Register states above this many qubits are recorded without matrices.
pub const ELIDE_QUBITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Verifier,
    Prover,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Payload {
    Bits {
        bits: Vec<u8>,
    },
    State {
        label: String,
        n_qubits: usize,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        matrix: Option<MatrixJson>,
    },
}

impl Payload {
    pub fn bits(bits: &[bool]) -> Self {
        Payload::Bits { bits: bits.iter().map(|&b| b as u8).collect() }
    }

    pub fn state(label: &str, rho: &DensityMatrix) -> Self {
        let matrix = (rho.n_qubits() <= ELIDE_QUBITS).then(|| mat_to_json(rho.matrix()));
        Payload::State { label: label.to_string(), n_qubits: rho.n_qubits(), matrix }
    }

    /// A register whose contents are not written out.
    pub fn opaque(label: &str, n_qubits: usize) -> Self {
        Payload::State { label: label.to_string(), n_qubits, matrix: None }
    }
}

/// One protocol message: all registers sent in a single move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub sender: Party,
    pub registers: Vec<Payload>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub protocol: String,
    pub prover: String,
    pub messages: Vec<Message>,
    /// Seeds driving the verifier's coins and all measurement outcomes.
    pub coins: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<Verdict>,
    /// Exact acceptance probability of this prover on this input.
    pub p_accept: f64,
}

impl ProtocolTranscript {
    pub fn new(protocol: &str, prover: &str, seed: u64) -> Self {
        Self {
            protocol: protocol.to_string(),
            prover: prover.to_string(),
            messages: Vec::new(),
            coins: vec![seed],
            verdict: None,
            p_accept: 0.0,
        }
    }

    pub fn send(&mut self, sender: Party, registers: Vec<Payload>) {
        self.messages.push(Message { sender, registers });
    }

    pub fn finish(&mut self, verdict: Verdict, p_accept: f64) {
        self.verdict = Some(verdict);
        self.p_accept = p_accept.clamp(0.0, 1.0);
    }

    pub fn is_complete(&self) -> bool {
        self.verdict.is_some()
    }

    /// Senders appear exactly in the given order.
    pub fn follows(&self, schedule: &[Party]) -> bool {
        self.messages.len() == schedule.len() && self.messages.iter().zip(schedule).all(|(m, s)| m.sender == *s)
    }
}

#[derive(Debug, Clone)]
pub enum Strategy {
    /// The prover of the protocol description.
    Honest,
    /// Reply maximizing acceptance.
    BestResponse,
    /// Return received registers untouched.
    Identity,
    /// Same answer bit in every round.
    Constant(bool),
    /// Fixed unitary on the received register.
    Unitary(CMat),
    /// Fixed two-outcome measurement on each received register.
    Measure(TwoOutcomePovm),
    /// Fixed first message (public-coin protocol).
    Commit(DensityMatrix),
}

/// Prover behaviour. Replies are computed from the message registers only,
/// plus the classical input description when `knows_input` is set.
#[derive(Debug, Clone)]
pub struct ProverStrategy {
    pub label: String,
    pub strategy: Strategy,
    pub knows_input: bool,
}

impl ProverStrategy {
    pub fn new(label: &str, strategy: Strategy, knows_input: bool) -> Self {
        Self { label: label.to_string(), strategy, knows_input }
    }

    pub fn honest() -> Self {
        Self::new("honest", Strategy::Honest, true)
    }

    pub fn best_response() -> Self {
        Self::new("best-response", Strategy::BestResponse, true)
    }

    pub fn identity() -> Self {
        Self::new("identity", Strategy::Identity, false)
    }

    pub fn constant(bit: bool) -> Self {
        Self::new(if bit { "constant-1" } else { "constant-0" }, Strategy::Constant(bit), false)
    }

    pub fn unitary(u: CMat) -> Self {
        Self::new("unitary", Strategy::Unitary(u), false)
    }

    pub fn measure(povm: TwoOutcomePovm) -> Self {
        Self::new("measure", Strategy::Measure(povm), false)
    }

    pub fn commit(a: DensityMatrix) -> Self {
        Self::new("commit", Strategy::Commit(a), false)
    }

    /// The input description, available only to strategies entitled to it.
    pub(crate) fn knowledge<'a, T>(&self, input: &'a T) -> Result<&'a T> {
        if self.knows_input {
            Ok(input)
        } else {
            Err(QError::Invalid(format!("strategy {} has no input description", self.label)))
        }
    }

    pub(crate) fn unsupported(&self, protocol: &str) -> QError {
        QError::Invalid(format!("strategy {} is not available in the {protocol} protocol", self.label))
    }
}
