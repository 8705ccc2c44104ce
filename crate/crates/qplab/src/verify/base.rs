//! Generic verifier circuit: input copies on one qubit list, the witness on
//! another, every other qubit an ancilla starting in |0⟩.

use crate::qcore::linalg::{self, CMat, CVec, QubitSplit, ZERO};
use crate::qcore::{DensityMatrix, GateCircuit, PureState};
use crate::{QError, Result};

/// Product state with `parts[i].1` on qubit list `parts[i].0` (bit j of the
/// part's index on its j-th qubit); unlisted qubits in |0⟩.
pub fn place(n: usize, parts: &[(&[usize], &CVec)]) -> Result<CVec> {
    let mut qs = Vec::new();
    let mut v = CVec::from_element(1, linalg::ONE);
    for (q, amps) in parts {
        if amps.len() != 1 << q.len() {
            return Err(QError::Dimension(format!("{} amplitudes for {} qubits", amps.len(), q.len())));
        }
        v = linalg::kron_vec(amps, &v);
        qs.extend_from_slice(q);
    }
    linalg::check_qubits(&qs, n)?;
    let split = QubitSplit::new(&qs, n);
    let mut out = CVec::from_element(1 << n, ZERO);
    for y in 0..v.len() {
        out[split.join(y, 0)] = v[y];
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QmaVerifier {
    pub circuit: GateCircuit,
    pub input: Vec<usize>,
    pub witness: Vec<usize>,
    pub answer: usize,
}

impl QmaVerifier {
    pub fn new(circuit: GateCircuit, input: Vec<usize>, witness: Vec<usize>, answer: usize) -> Result<Self> {
        let n = circuit.n_qubits;
        let mut all = input.clone();
        all.extend_from_slice(&witness);
        linalg::check_qubits(&all, n)?;
        if answer >= n || all.contains(&answer) {
            return Err(QError::Invalid("answer qubit must be an ancilla".into()));
        }
        Ok(Self { circuit, input, witness, answer })
    }

    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits
    }

    pub fn ancillas(&self) -> Vec<usize> {
        (0..self.n_qubits()).filter(|q| !self.input.contains(q) && !self.witness.contains(q)).collect()
    }

    fn start(&self, input: &PureState, witness: &CVec) -> Result<CVec> {
        if input.n_qubits() != self.input.len() {
            return Err(QError::Dimension("input does not match the verifier".into()));
        }
        place(self.n_qubits(), &[(&self.input, input.amplitudes()), (&self.witness, witness)])
    }

    /// V applied to |input⟩|witness⟩|0⟩.
    pub fn run(&self, input: &PureState, witness: &PureState) -> Result<CVec> {
        Ok(self.circuit.apply_vec(&self.start(input, witness.amplitudes())?))
    }

    fn answer_one(&self, v: &CVec) -> CVec {
        let mut out = v.clone();
        for x in 0..v.len() {
            if (x >> self.answer) & 1 == 0 {
                out[x] = ZERO;
            }
        }
        out
    }

    /// Acceptance operator M on the witness register:
    /// Tr(M σ) = Pr[accept | input, σ].
    pub fn accept_operator(&self, input: &PureState) -> Result<CMat> {
        let dw = 1usize << self.witness.len();
        let mut g = CMat::zeros(1 << self.n_qubits(), dw);
        for j in 0..dw {
            let mut e = CVec::zeros(dw);
            e[j] = linalg::ONE;
            let out = self.circuit.apply_vec(&self.start(input, &e)?);
            g.set_column(j, &self.answer_one(&out));
        }
        Ok(linalg::hermitize(&(g.adjoint() * g)))
    }

    pub fn accept_prob(&self, input: &PureState, witness: &DensityMatrix) -> Result<f64> {
        Ok(witness.expectation(&self.accept_operator(input)?).clamp(0.0, 1.0))
    }

    pub fn accept_prob_pure(&self, input: &PureState, witness: &PureState) -> Result<f64> {
        Ok(self.answer_one(&self.run(input, witness)?).norm_squared().clamp(0.0, 1.0))
    }

    /// Largest acceptance over all witnesses (‖M‖).
    pub fn max_accept(&self, input: &PureState) -> Result<f64> {
        let (vals, _) = linalg::eigh(&self.accept_operator(input)?);
        Ok(vals.last().copied().unwrap_or(0.0).clamp(0.0, 1.0))
    }

    /// Acceptance of the classical witness `w` (bit j on witness qubit j).
    pub fn accept_classical(&self, input: &PureState, w: usize) -> Result<f64> {
        self.accept_prob_pure(input, &PureState::basis(self.witness.len(), w))
    }
}
