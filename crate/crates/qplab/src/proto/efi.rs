//! Telling (ρ_0, ρ_1) apart from (ρ_0, ρ_0). The verifier swaps pair i of
//! (ρ_a, ρ_b) when n_i = 1 and asks the prover for n. The honest prover
//! labels its own copies of ρ_a, ρ_b and every received register with the
//! Helstrom measurement of (ρ_0, ρ_1) and reports m_i = 1 on a mismatch.

use rand::Rng;

use super::transcript::{Party, Payload, ProtocolTranscript, ProverStrategy, Strategy};
use crate::qcore::{helstrom_measurement, rng_for, trace_distance, DensityMatrix, GateCircuit, PureState, TwoOutcomePovm};
use crate::verify::Verdict;
use crate::{QError, Result};

pub const NAME: &str = "efi";
pub const SCHEDULE: [Party; 2] = [Party::Verifier, Party::Prover];

/// Reference states ρ_0, ρ_1 known to the prover.
#[derive(Debug, Clone)]
pub struct EfiPair {
    pub rho0: DensityMatrix,
    pub rho1: DensityMatrix,
}

impl EfiPair {
    pub fn new(rho0: DensityMatrix, rho1: DensityMatrix) -> Result<Self> {
        if rho0.dim() != rho1.dim() {
            return Err(QError::Dimension("ρ_0 and ρ_1 differ in size".into()));
        }
        Ok(Self { rho0, rho1 })
    }

    /// ρ_b = Tr_{non-output}(Q_b|0…0⟩).
    pub fn from_circuits(q0: &GateCircuit, q1: &GateCircuit, output: &[usize]) -> Result<Self> {
        if q0.n_qubits != q1.n_qubits {
            return Err(QError::Dimension("circuit registers differ".into()));
        }
        let z = PureState::zero(q0.n_qubits);
        Self::new(q0.apply(&z)?.reduced(output)?, q1.apply(&z)?.reduced(output)?)
    }

    pub fn trace_distance(&self) -> Result<f64> {
        trace_distance(&self.rho0, &self.rho1)
    }

    /// Larger of the two Helstrom error probabilities Tr(Π_1ρ_0), Tr(Π_0ρ_1).
    pub fn helstrom_error(&self) -> Result<f64> {
        let h = helstrom_measurement(&self.rho0, &self.rho1)?;
        Ok(h.prob(&self.rho0, 1).max(h.prob(&self.rho1, 0)))
    }

    /// 1 − (2t+1)·ε for the honest prover on a yes-instance.
    pub fn completeness_bound(&self, t: usize) -> Result<f64> {
        Ok(1.0 - (2 * t + 1) as f64 * self.helstrom_error()?)
    }
}

enum Labeler {
    Povm(TwoOutcomePovm),
    Constant(bool),
}

fn labeler(prover: &ProverStrategy, pair: &EfiPair) -> Result<Labeler> {
    match &prover.strategy {
        Strategy::Honest | Strategy::BestResponse => {
            let pair = prover.knowledge(pair)?;
            Ok(Labeler::Povm(helstrom_measurement(&pair.rho0, &pair.rho1)?))
        }
        Strategy::Measure(p) if p.e0.nrows() == pair.rho0.dim() => Ok(Labeler::Povm(p.clone())),
        Strategy::Measure(_) => Err(QError::Dimension("measurement does not fit the register".into())),
        Strategy::Constant(b) => Ok(Labeler::Constant(*b)),
        _ => Err(prover.unsupported(NAME)),
    }
}

/// Per-label probabilities [Pr(0), Pr(1)] for ρ_a and ρ_b.
fn label_probs(povm: &TwoOutcomePovm, rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> ([f64; 2], [f64; 2]) {
    let pa = povm.prob(rho_a, 0);
    let pb = povm.prob(rho_b, 0);
    ([pa, 1.0 - pa], [pb, 1.0 - pb])
}

/// Pr[m_i = 1 | n_i, reference labels (x, y)].
fn mismatch_prob(pa: [f64; 2], pb: [f64; 2], x: usize, y: usize, swapped: bool) -> f64 {
    let (first, second) = if swapped { (pb, pa) } else { (pa, pb) };
    1.0 - first[x] * second[y]
}

fn check(pair: &EfiPair, rho_a: &DensityMatrix, rho_b: &DensityMatrix, t: usize) -> Result<()> {
    if t == 0 {
        return Err(QError::Invalid("t must be positive".into()));
    }
    if rho_a.dim() != pair.rho0.dim() || rho_b.dim() != pair.rho0.dim() {
        return Err(QError::Dimension("inputs do not match the reference states".into()));
    }
    Ok(())
}

/// Exact Pr[m = n].
pub fn efi_accept_exact(pair: &EfiPair, rho_a: &DensityMatrix, rho_b: &DensityMatrix, t: usize, prover: &ProverStrategy) -> Result<f64> {
    check(pair, rho_a, rho_b, t)?;
    let povm = match labeler(prover, pair)? {
        Labeler::Constant(_) => return Ok(0.5f64.powi(t as i32)),
        Labeler::Povm(p) => p,
    };
    let (pa, pb) = label_probs(&povm, rho_a, rho_b);
    let mut total = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let round = 0.5 * (1.0 - mismatch_prob(pa, pb, x, y, false)) + 0.5 * mismatch_prob(pa, pb, x, y, true);
            total += pa[x] * pb[y] * round.powi(t as i32);
        }
    }
    Ok(total)
}

/// Joint distribution P(n, m) indexed by n + 2^t·m.
pub fn efi_joint(pair: &EfiPair, rho_a: &DensityMatrix, rho_b: &DensityMatrix, t: usize, prover: &ProverStrategy) -> Result<Vec<f64>> {
    check(pair, rho_a, rho_b, t)?;
    let nt = 1usize << t;
    let mut out = vec![0.0; nt * nt];
    match labeler(prover, pair)? {
        Labeler::Constant(b) => {
            let m = if b { nt - 1 } else { 0 };
            for n in 0..nt {
                out[n + nt * m] = 1.0 / nt as f64;
            }
        }
        Labeler::Povm(povm) => {
            let (pa, pb) = label_probs(&povm, rho_a, rho_b);
            for x in 0..2 {
                for y in 0..2 {
                    let w = pa[x] * pb[y] / nt as f64;
                    for n in 0..nt {
                        for m in 0..nt {
                            let mut p = w;
                            for i in 0..t {
                                let q = mismatch_prob(pa, pb, x, y, (n >> i) & 1 == 1);
                                p *= if (m >> i) & 1 == 1 { q } else { 1.0 - q };
                            }
                            out[n + nt * m] += p;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn efi_protocol(
    pair: &EfiPair,
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    t: usize,
    prover: &ProverStrategy,
    seed: u64,
) -> Result<ProtocolTranscript> {
    check(pair, rho_a, rho_b, t)?;
    let lab = labeler(prover, pair)?;
    let mut rng = rng_for(seed, 0);
    let n: Vec<bool> = (0..t).map(|_| rng.random::<bool>()).collect();
    let mut tr = ProtocolTranscript::new(NAME, &prover.label, seed);
    let regs: Vec<(&DensityMatrix, &DensityMatrix)> = n.iter().map(|&s| if s { (rho_b, rho_a) } else { (rho_a, rho_b) }).collect();
    tr.send(
        Party::Verifier,
        regs.iter().flat_map(|(a, b)| [Payload::state("A", a), Payload::state("B", b)]).collect(),
    );
    let m: Vec<bool> = match &lab {
        Labeler::Constant(b) => vec![*b; t],
        Labeler::Povm(povm) => {
            let mut label = |r: &DensityMatrix| rng.random::<f64>() >= povm.prob(r, 0);
            let (ans_a, ans_b) = (label(rho_a), label(rho_b));
            regs.iter().map(|(a, b)| label(a) != ans_a || label(b) != ans_b).collect()
        }
    };
    tr.send(Party::Prover, vec![Payload::bits(&m)]);
    tr.finish(Verdict::from_bool(m == n), efi_accept_exact(pair, rho_a, rho_b, t, prover)?);
    Ok(tr)
}
