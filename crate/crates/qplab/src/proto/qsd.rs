//! State distinguishability with an unknown pure input: circuits Q_0, Q_1
//! act on |φ⟩|0…0⟩ and σ_b is the reduced state on the output qubits.
//! Both protocols below work with purifications |Ψ_b⟩, so the register B
//! is everything outside the output qubits.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rand::Rng;

use super::transcript::{Party, Payload, ProtocolTranscript, ProverStrategy, Strategy};
use crate::qcore::linalg::{self, c, cr, CMat, CVec};
use crate::qcore::{check_cap, fidelity, rng_for, trace_distance, uhlmann_unitary_on, DensityMatrix, GateCircuit, PureState};
use crate::verify::Verdict;
use crate::{QError, Result};

pub const COQSDWP: &str = "coqsdwp";
pub const PUBLIC_COIN: &str = "publiccoin";
pub const COQSDWP_SCHEDULE: [Party; 2] = [Party::Verifier, Party::Prover];
pub const PUBLIC_COIN_SCHEDULE: [Party; 3] = [Party::Prover, Party::Verifier, Party::Prover];

/// (φ, Q_0, Q_1) with φ on the low qubits of the circuit register.
#[derive(Debug, Clone)]
pub struct QsdInstance {
    pub phi: PureState,
    pub q0: GateCircuit,
    pub q1: GateCircuit,
    pub output: Vec<usize>,
}

impl QsdInstance {
    pub fn new(phi: PureState, q0: GateCircuit, q1: GateCircuit, output: Vec<usize>) -> Result<Self> {
        if q0.n_qubits != q1.n_qubits {
            return Err(QError::Dimension(format!(
                "circuit registers differ: {} vs {}",
                q0.n_qubits, q1.n_qubits
            )));
        }
        if phi.n_qubits() > q0.n_qubits {
            return Err(QError::Dimension("input larger than circuit register".into()));
        }
        linalg::check_qubits(&output, q0.n_qubits)?;
        if output.is_empty() {
            return Err(QError::Invalid("no output qubits".into()));
        }
        Ok(Self { phi, q0, q1, output })
    }
}

/// Purifications |Ψ_0⟩, |Ψ_1⟩ and the output register A.
#[derive(Debug, Clone)]
pub struct Purified {
    pub psi: [PureState; 2],
    pub output: Vec<usize>,
}

impl Purified {
    pub fn new(psi0: PureState, psi1: PureState, output: Vec<usize>) -> Result<Self> {
        if psi0.n_qubits() != psi1.n_qubits() {
            return Err(QError::Dimension("purifications differ in size".into()));
        }
        linalg::check_qubits(&output, psi0.n_qubits())?;
        Ok(Self { psi: [psi0, psi1], output })
    }

    pub fn from_instance(inst: &QsdInstance) -> Result<Self> {
        let n = inst.q0.n_qubits;
        let start = PureState::zero(n - inst.phi.n_qubits()).tensor(&inst.phi);
        Self::new(inst.q0.apply(&start)?, inst.q1.apply(&start)?, inst.output.clone())
    }

    pub fn n_qubits(&self) -> usize {
        self.psi[0].n_qubits()
    }

    /// Qubits outside the output register.
    pub fn b_qubits(&self) -> Vec<usize> {
        (0..self.n_qubits()).filter(|q| !self.output.contains(q)).collect()
    }

    pub fn sigma(&self, b: usize) -> Result<DensityMatrix> {
        self.psi[b].reduced(&self.output)
    }

    pub fn fidelity(&self) -> Result<f64> {
        fidelity(&self.sigma(0)?, &self.sigma(1)?)
    }

    pub fn trace_distance(&self) -> Result<f64> {
        trace_distance(&self.sigma(0)?, &self.sigma(1)?)
    }

    /// σ_b ↦ σ_b^{⊗l}.
    pub fn product(&self, l: usize) -> Result<Self> {
        let n = self.n_qubits();
        check_cap(n * l)?;
        let output = (0..l).flat_map(|k| self.output.iter().map(move |&q| q + k * n)).collect();
        Self::new(self.psi[0].tensor_power(l), self.psi[1].tensor_power(l), output)
    }

    /// σ_b ↦ 2^{1−l} Σ_{x: ⊕x = b} σ_{x_1} ⊗ … ⊗ σ_{x_l}. The string x sits
    /// on l control qubits above the copies and is traced out.
    pub fn xor(&self, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(QError::Invalid("xor needs l ≥ 1".into()));
        }
        let n = self.n_qubits();
        check_cap(n * l + l)?;
        let block = 1usize << (n * l);
        let amp = cr((2f64).powi(1 - l as i32).sqrt());
        let build = |parity: u32| {
            let mut v = CVec::zeros(block << l);
            for x in (0usize..1 << l).filter(|x| x.count_ones() % 2 == parity) {
                let mut part = CVec::from_element(1, linalg::ONE);
                for k in (0..l).rev() {
                    part = linalg::kron_vec(&part, self.psi[(x >> k) & 1].amplitudes());
                }
                v.rows_mut(x * block, block).copy_from(&(part * amp));
            }
            PureState::new(n * l + l, v)
        };
        let output = (0..l).flat_map(|k| self.output.iter().map(move |&q| q + k * n)).collect();
        Self::new(build(0)?, build(1)?, output)
    }

    pub fn polarize(&self, pol: &Polarization) -> Result<Self> {
        let mut cur = self.clone();
        for step in &pol.steps {
            cur = match *step {
                PolarStep::Xor(l) => cur.xor(l)?,
                PolarStep::Product(l) => cur.product(l)?,
            };
        }
        Ok(cur)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarStep {
    Xor(usize),
    Product(usize),
}

/// Sequence of XOR and direct-product gadgets, each with l ≤ 6.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polarization {
    pub steps: Vec<PolarStep>,
}

impl Polarization {
    pub fn new(steps: Vec<PolarStep>) -> Result<Self> {
        if steps.iter().any(|s| matches!(s, PolarStep::Xor(l) | PolarStep::Product(l) if *l == 0 || *l > 6)) {
            return Err(QError::Invalid("gadget size must be in 1..=6".into()));
        }
        Ok(Self { steps })
    }

    /// Trace distance after the XOR steps, with lower and upper bounds for the
    /// product steps: TD^l for XOR and [1 − e^{−l·TD²}, l·TD] for products.
    pub fn td_range(&self, td: f64) -> (f64, f64) {
        let (mut lo, mut hi) = (td, td);
        for s in &self.steps {
            match *s {
                PolarStep::Xor(l) => {
                    lo = lo.powi(l as i32);
                    hi = hi.powi(l as i32);
                }
                PolarStep::Product(l) => {
                    lo = 1.0 - (-(l as f64) * lo * lo).exp();
                    hi = (l as f64 * hi).min(1.0);
                }
            }
        }
        (lo, hi)
    }
}

fn prepare(inst: &QsdInstance, polarize: Option<&Polarization>) -> Result<Purified> {
    let pair = Purified::from_instance(inst)?;
    match polarize {
        Some(p) => pair.polarize(p),
        None => Ok(pair),
    }
}

/// Unitary on B returned by the prover in the private-coin protocol.
fn qsd_reply(prover: &ProverStrategy, pair: &Purified) -> Result<CMat> {
    let b = pair.b_qubits();
    let db = 1usize << b.len();
    match &prover.strategy {
        // A channel on B keeps Tr_B = σ_0, so ⟨Ψ_1|ω|Ψ_1⟩ ≤ F(σ_0, σ_1)² with
        // equality at the Uhlmann unitary.
        Strategy::Honest | Strategy::BestResponse => {
            let pair = prover.knowledge(pair)?;
            uhlmann_unitary_on(&pair.psi[0], &pair.psi[1], &b)
        }
        Strategy::Identity => Ok(linalg::identity(db)),
        Strategy::Unitary(u) if u.nrows() == db => Ok(u.clone()),
        Strategy::Unitary(_) => Err(QError::Dimension("unitary does not fit register B".into())),
        _ => Err(prover.unsupported(COQSDWP)),
    }
}

fn returned(pair: &Purified, u: &CMat) -> Result<PureState> {
    pair.psi[0].apply(u, &pair.b_qubits())
}

/// Exact acceptance ½ + ½|⟨Ψ_1|(I⊗U)|Ψ_0⟩|² of the private-coin protocol.
pub fn coqsdwp_accept_exact(inst: &QsdInstance, prover: &ProverStrategy, polarize: Option<&Polarization>) -> Result<f64> {
    let pair = prepare(inst, polarize)?;
    let omega = returned(&pair, &qsd_reply(prover, &pair)?)?;
    Ok(0.5 + 0.5 * omega.overlap_sq(&pair.psi[1])?)
}

pub fn coqsdwp_protocol(
    inst: &QsdInstance,
    prover: &ProverStrategy,
    polarize: Option<&Polarization>,
    seed: u64,
) -> Result<ProtocolTranscript> {
    let pair = prepare(inst, polarize)?;
    let b = pair.b_qubits();
    let mut tr = ProtocolTranscript::new(COQSDWP, &prover.label, seed);
    tr.send(Party::Verifier, vec![Payload::state("B", &pair.psi[0].reduced(&b)?)]);
    let omega = returned(&pair, &qsd_reply(prover, &pair)?)?;
    tr.send(Party::Prover, vec![Payload::state("B", &omega.reduced(&b)?)]);
    let p = 0.5 + 0.5 * omega.overlap_sq(&pair.psi[1])?;
    let mut rng = rng_for(seed, 0);
    tr.finish(Verdict::from_bool(rng.random::<f64>() < p), p);
    Ok(tr)
}

/// Independent sessions with AND acceptance.
pub fn coqsdwp_repeated(
    inst: &QsdInstance,
    prover: &ProverStrategy,
    polarize: Option<&Polarization>,
    sessions: usize,
    seed: u64,
) -> Result<(Verdict, f64, Vec<ProtocolTranscript>)> {
    let runs = (0..sessions as u64)
        .map(|k| coqsdwp_protocol(inst, prover, polarize, seed.wrapping_mul(1_000_003).wrapping_add(k)))
        .collect::<Result<Vec<_>>>()?;
    let all = runs.iter().all(|r| r.verdict == Some(Verdict::Accept));
    let p = runs.first().map_or(1.0, |r| r.p_accept).powi(sessions as i32);
    Ok((Verdict::from_bool(all), p, runs))
}

/// Best first message of a cheating public-coin prover.
#[derive(Debug, Clone)]
pub struct CheatSearch {
    /// ½ + ¼ max_τ (F(τ, σ_0)² + F(τ, σ_1)²).
    pub value: f64,
    pub tau: DensityMatrix,
    /// ¾ + ¼ F(σ_0, σ_1).
    pub analytic_bound: f64,
}

/// Acceptance of the public-coin protocol when the prover sends τ first
/// and then completes it optimally toward Ψ_b.
pub fn public_coin_value(tau: &DensityMatrix, s0: &DensityMatrix, s1: &DensityMatrix) -> Result<f64> {
    let f0 = fidelity(tau, s0)?;
    let f1 = fidelity(tau, s1)?;
    Ok(0.5 + 0.25 * (f0 * f0 + f1 * f1))
}

struct CheatCost {
    s0: DensityMatrix,
    s1: DensityMatrix,
    d: usize,
}

impl CheatCost {
    /// τ = AA†/Tr(AA†) with A given by 2d² reals.
    fn tau(&self, p: &[f64]) -> Option<DensityMatrix> {
        let d = self.d;
        let a = CMat::from_fn(d, d, |r, k| c(p[2 * (r * d + k)], p[2 * (r * d + k) + 1]));
        let m = &a * a.adjoint();
        let tr = m.trace().re;
        if tr <= 1e-300 {
            return None;
        }
        DensityMatrix::new(self.s0.n_qubits(), m / cr(tr)).ok()
    }
}

impl CostFunction for CheatCost {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(match self.tau(p) {
            Some(t) => -public_coin_value(&t, &self.s0, &self.s1).unwrap_or(0.0),
            None => 0.0,
        })
    }
}

/// Maximize the cheating value. The search starts from the top eigenvector
/// of σ_0 + σ_1 (optimal when both are pure) and refines over mixed τ with
/// Nelder–Mead.
pub fn optimal_cheat(s0: &DensityMatrix, s1: &DensityMatrix, seed: u64) -> Result<CheatSearch> {
    if s0.dim() != s1.dim() {
        return Err(QError::Dimension("σ_0 and σ_1 differ in size".into()));
    }
    let d = s0.dim();
    let (_, vecs) = linalg::eigh(&(s0.matrix() + s1.matrix()));
    let top = vecs.column(d - 1).into_owned();
    let start_tau = PureState::normalized(s0.n_qubits(), top.clone())?.density();
    let mut best = (public_coin_value(&start_tau, s0, s1)?, start_tau);

    let cost = CheatCost { s0: s0.clone(), s1: s1.clone(), d };
    let mut x0 = vec![0.0; 2 * d * d];
    for r in 0..d {
        x0[2 * (r * d)] = top[r].re;
        x0[2 * (r * d) + 1] = top[r].im;
    }
    let mut rng = rng_for(seed, 0);
    let mut simplex = vec![x0.clone()];
    for i in 0..x0.len() {
        let mut v = x0.clone();
        v[i] += 0.05 + 0.05 * rng.random::<f64>();
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-13)
        .map_err(|e| QError::Invalid(e.to_string()))?;
    let res = Executor::new(cost, solver)
        .configure(|s| s.max_iters(4000))
        .run()
        .map_err(|e| QError::Invalid(e.to_string()))?;
    let cost = CheatCost { s0: s0.clone(), s1: s1.clone(), d };
    if let Some(tau) = res.state().get_best_param().and_then(|p| cost.tau(p)) {
        let v = public_coin_value(&tau, s0, s1)?;
        if v > best.0 {
            best = (v, tau);
        }
    }
    let f = fidelity(s0, s1)?;
    Ok(CheatSearch { value: best.0, tau: best.1, analytic_bound: 0.75 + 0.25 * f })
}

/// First message of the public-coin prover.
fn first_message(prover: &ProverStrategy, pair: &Purified, seed: u64) -> Result<DensityMatrix> {
    match &prover.strategy {
        Strategy::Honest => Ok(prover.knowledge(pair)?.sigma(0)?),
        Strategy::BestResponse => {
            let pair = prover.knowledge(pair)?;
            Ok(optimal_cheat(&pair.sigma(0)?, &pair.sigma(1)?, seed)?.tau)
        }
        Strategy::Commit(tau) if tau.dim() == 1 << pair.output.len() => Ok(tau.clone()),
        Strategy::Commit(_) => Err(QError::Dimension("first message does not fit register A".into())),
        _ => Err(prover.unsupported(PUBLIC_COIN)),
    }
}

/// Exact acceptance ½ + ¼(F(τ, σ_0)² + F(τ, σ_1)²); every supported
/// strategy completes its first message optimally.
pub fn public_coin_accept_exact(inst: &QsdInstance, prover: &ProverStrategy, polarize: Option<&Polarization>) -> Result<f64> {
    let pair = prepare(inst, polarize)?;
    let tau = first_message(prover, &pair, 0)?;
    public_coin_value(&tau, &pair.sigma(0)?, &pair.sigma(1)?)
}

pub fn public_coin_qsd(inst: &QsdInstance, prover: &ProverStrategy, polarize: Option<&Polarization>, seed: u64) -> Result<ProtocolTranscript> {
    let pair = prepare(inst, polarize)?;
    let (s0, s1) = (pair.sigma(0)?, pair.sigma(1)?);
    let mut tr = ProtocolTranscript::new(PUBLIC_COIN, &prover.label, seed);
    let tau = first_message(prover, &pair, seed)?;
    tr.send(Party::Prover, vec![Payload::state("A", &tau)]);
    let mut rng = rng_for(seed, 0);
    let coin = rng.random::<bool>();
    tr.send(Party::Verifier, vec![Payload::bits(&[coin])]);
    let b = pair.b_qubits();
    let sb = if coin { &s1 } else { &s0 };
    let f = fidelity(&tau, sb)?;
    let reply = match prover.strategy {
        Strategy::Honest => {
            let omega = if coin { returned(&pair, &uhlmann_unitary_on(&pair.psi[0], &pair.psi[1], &b)?)? } else { pair.psi[0].clone() };
            Payload::state("B", &omega.reduced(&b)?)
        }
        _ => Payload::opaque("B", b.len()),
    };
    tr.send(Party::Prover, vec![reply]);
    let pass = 0.5 + 0.5 * f * f;
    tr.finish(Verdict::from_bool(rng.random::<f64>() < pass), public_coin_value(&tau, &s0, &s1)?);
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{haar_unitary, GateKind};

    fn random_instance(seed: u64) -> QsdInstance {
        let mut rng = rng_for(seed, 0);
        let u0 = haar_unitary(2, &mut rng).unwrap();
        let u1 = haar_unitary(2, &mut rng).unwrap();
        let q0 = GateCircuit::new(2).with(GateKind::Unitary(u0), &[0, 1]);
        let q1 = GateCircuit::new(2).with(GateKind::Unitary(u1), &[0, 1]);
        let phi = crate::qcore::haar_state(1, &mut rng).unwrap();
        QsdInstance::new(phi, q0, q1, vec![0]).unwrap()
    }

    #[test]
    fn equal_circuits_accept() {
        let q = GateCircuit::new(2).with(GateKind::H, &[0]).with(GateKind::Cnot, &[0, 1]);
        let inst = QsdInstance::new(PureState::zero(1), q.clone(), q, vec![0]).unwrap();
        assert!((coqsdwp_accept_exact(&inst, &ProverStrategy::honest(), None).unwrap() - 1.0).abs() < 1e-12);
        assert!((public_coin_accept_exact(&inst, &ProverStrategy::honest(), None).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_outputs_give_half() {
        let q0 = GateCircuit::new(1);
        let q1 = GateCircuit::new(1).with(GateKind::X, &[0]);
        let inst = QsdInstance::new(PureState::zero(1), q0, q1, vec![0]).unwrap();
        assert!((coqsdwp_accept_exact(&inst, &ProverStrategy::honest(), None).unwrap() - 0.5).abs() < 1e-12);
        let pair = Purified::from_instance(&inst).unwrap();
        let cheat = optimal_cheat(&pair.sigma(0).unwrap(), &pair.sigma(1).unwrap(), 1).unwrap();
        assert!((cheat.value - 0.75).abs() < 1e-8, "{}", cheat.value);
        assert!((cheat.analytic_bound - 0.75).abs() < 1e-12);
    }

    #[test]
    fn honest_matches_fidelity_formula() {
        for seed in 0..10 {
            let inst = random_instance(seed);
            let pair = Purified::from_instance(&inst).unwrap();
            let f = pair.fidelity().unwrap();
            let p = coqsdwp_accept_exact(&inst, &ProverStrategy::honest(), None).unwrap();
            assert!((p - (0.5 + 0.5 * f * f)).abs() < 1e-8);
            // Other provers do no better.
            let mut rng = rng_for(100 + seed, 0);
            let u = haar_unitary(1, &mut rng).unwrap();
            assert!(coqsdwp_accept_exact(&inst, &ProverStrategy::unitary(u), None).unwrap() <= p + 1e-10);
            assert!(coqsdwp_accept_exact(&inst, &ProverStrategy::identity(), None).unwrap() <= p + 1e-10);
        }
    }

    #[test]
    fn cheat_within_analytic_bound() {
        for seed in 0..10 {
            let pair = Purified::from_instance(&random_instance(seed)).unwrap();
            let (s0, s1) = (pair.sigma(0).unwrap(), pair.sigma(1).unwrap());
            let cheat = optimal_cheat(&s0, &s1, seed).unwrap();
            assert!(cheat.value <= cheat.analytic_bound + 1e-6);
            let honest = public_coin_value(&s0, &s0, &s1).unwrap();
            assert!(cheat.value >= honest - 1e-9);
        }
    }

    #[test]
    fn half_fidelity_cheat_at_most_seven_eighths() {
        // |0⟩ vs cos θ|0⟩ + sin θ|1⟩ with cos θ = ½.
        let theta = (0.5f64).acos();
        let q1 = GateCircuit::new(1).with(GateKind::Ry(2.0 * theta), &[0]);
        let inst = QsdInstance::new(PureState::zero(1), GateCircuit::new(1), q1, vec![0]).unwrap();
        let pair = Purified::from_instance(&inst).unwrap();
        assert!((pair.fidelity().unwrap() - 0.5).abs() < 1e-12);
        let cheat = optimal_cheat(&pair.sigma(0).unwrap(), &pair.sigma(1).unwrap(), 2).unwrap();
        assert!((cheat.analytic_bound - 0.875).abs() < 1e-12);
        assert!(cheat.value <= 0.875 + 1e-8);
    }

    #[test]
    fn xor_powers_trace_distance() {
        let pair = Purified::from_instance(&random_instance(7)).unwrap();
        let td = pair.trace_distance().unwrap();
        for l in 1..=3 {
            let x = pair.xor(l).unwrap();
            assert!((x.trace_distance().unwrap() - td.powi(l as i32)).abs() < 1e-10);
        }
        let pol = Polarization::new(vec![PolarStep::Product(2)]).unwrap();
        let p = pair.polarize(&pol).unwrap();
        let (lo, hi) = pol.td_range(td);
        let got = p.trace_distance().unwrap();
        assert!(got > lo - 1e-12 && got <= hi + 1e-12);
        assert!(Polarization::new(vec![PolarStep::Xor(7)]).is_err());
    }

    #[test]
    fn polarized_protocol_matches_fidelity() {
        let inst = random_instance(8);
        let pol = Polarization::new(vec![PolarStep::Xor(2), PolarStep::Product(2)]).unwrap();
        let pair = Purified::from_instance(&inst).unwrap().polarize(&pol).unwrap();
        let f = pair.fidelity().unwrap();
        let p = coqsdwp_accept_exact(&inst, &ProverStrategy::honest(), Some(&pol)).unwrap();
        assert!((p - (0.5 + 0.5 * f * f)).abs() < 1e-8);
    }

    #[test]
    fn mismatched_registers_rejected() {
        assert!(QsdInstance::new(PureState::zero(1), GateCircuit::new(1), GateCircuit::new(2), vec![0]).is_err());
    }

    #[test]
    fn transcripts_are_deterministic() {
        let inst = random_instance(9);
        for p in [ProverStrategy::honest(), ProverStrategy::best_response()] {
            let a = public_coin_qsd(&inst, &p, None, 5).unwrap();
            assert_eq!(a, public_coin_qsd(&inst, &p, None, 5).unwrap());
            assert!(a.follows(&PUBLIC_COIN_SCHEDULE));
        }
        let a = coqsdwp_protocol(&inst, &ProverStrategy::honest(), None, 5).unwrap();
        assert_eq!(a, coqsdwp_protocol(&inst, &ProverStrategy::honest(), None, 5).unwrap());
        assert!(a.follows(&COQSDWP_SCHEDULE));
    }
}
