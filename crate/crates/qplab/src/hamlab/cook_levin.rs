//! Clock Hamiltonian of a verifier circuit.
//!
//! Register layout (little-endian): verifier qubits first, I = [0, c·n),
//! then W, then A, with the answer qubit the last verifier qubit. Clock
//! qubit T_j (j = 1..m+1) sits at index nv + (m+1−j), so T_1 is the most
//! significant bit and the legal string 1^t 0^{m+1−t} reads left to right.

use std::f64::consts::PI;

use rand::Rng;

use super::terms::{HamiltonianInstance, LocalTerm, Variant};
use crate::qcore::linalg::{self, cr, CMat, CVec, ONE, ZERO};
use crate::qcore::{check_cap, Gate, GateCircuit, GateKind, PureState};
use crate::{QError, Result};

/// Default weight of the clock-legality penalty before halving.
pub const DEFAULT_PENALTY: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClockLayout {
    /// Qubits per input copy.
    pub n: usize,
    pub copies: usize,
    pub n_witness: usize,
    pub n_anc: usize,
    /// Number of gates.
    pub m: usize,
}

impl ClockLayout {
    pub fn n_input(&self) -> usize {
        self.n * self.copies
    }

    pub fn nv(&self) -> usize {
        self.n_input() + self.n_witness + self.n_anc
    }

    pub fn total(&self) -> usize {
        self.nv() + self.m + 1
    }

    pub fn answer(&self) -> usize {
        self.nv() - 1
    }

    pub fn witness_qubits(&self) -> Vec<usize> {
        (self.n_input()..self.n_input() + self.n_witness).collect()
    }

    pub fn anc_qubits(&self) -> Vec<usize> {
        (self.n_input() + self.n_witness..self.nv()).collect()
    }

    /// Index of clock qubit T_j, 1 ≤ j ≤ m+1.
    pub fn clock(&self, j: usize) -> usize {
        debug_assert!(j >= 1 && j <= self.m + 1);
        self.nv() + (self.m + 1 - j)
    }

    pub fn clock_qubits(&self) -> Vec<usize> {
        (self.nv()..self.total()).collect()
    }

    /// Clock register value (bits of the clock qubits) for 1^t 0^{m+1−t}.
    pub fn clock_value(&self, t: usize) -> usize {
        (1..=t).fold(0, |acc, j| acc | (1 << (self.m + 1 - j)))
    }

    /// Full basis index of |x⟩_{IWA} ⊗ |clock(t)⟩.
    pub fn index(&self, x: usize, t: usize) -> usize {
        x | (self.clock_value(t) << self.nv())
    }

    pub fn is_legal_clock(&self, value: usize) -> bool {
        (0..=self.m).any(|t| self.clock_value(t) == value)
    }

    pub fn a_threshold(&self) -> f64 {
        1.0 / ((1u64 << (self.n + 1)) as f64 * (self.m + 1) as f64)
    }

    /// Lower-bound shape π²(1−√(2^{−n}))/(2(m+1)³), halved with the terms.
    pub fn shape_bound(&self) -> f64 {
        let m1 = (self.m + 1) as f64;
        0.5 * PI * PI * (1.0 - (0.5f64).powi(self.n as i32).sqrt()) / (2.0 * m1 * m1 * m1)
    }

    fn check(&self) -> Result<()> {
        if self.n == 0 || self.copies == 0 {
            return Err(QError::Invalid("input register must be nonempty".into()));
        }
        if self.n_anc == 0 {
            return Err(QError::Invalid("verifier needs an ancilla register holding the answer qubit".into()));
        }
        check_cap(self.total())
    }
}

/// How b is fixed for a generated instance.
#[derive(Debug, Clone)]
pub enum BSource {
    /// λ_min of the identity (always rejecting) verifier with the same layout.
    Reference,
    /// λ_min of this instance for the given input ψ^{⊗c}.
    Exact(PureState),
    Value(f64),
}

/// Gate list (U_i) of a circuit witness; every gate acts on ≤ 2 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitWitnessSpec {
    pub circuit: GateCircuit,
}

impl CircuitWitnessSpec {
    pub fn new(circuit: GateCircuit, p: usize) -> Result<Self> {
        if circuit.len() > p {
            return Err(QError::Invalid(format!("{} gates exceed p = {p}", circuit.len())));
        }
        if let Some(g) = circuit.gates.iter().find(|g| g.qubits.len() > 2) {
            return Err(QError::Invalid(format!("gate {} acts on more than 2 qubits", g.kind.name())));
        }
        Ok(Self { circuit })
    }

    /// U_m ⋯ U_1 |0^n⟩.
    pub fn prepare(&self) -> PureState {
        self.circuit.apply(&PureState::zero(self.circuit.n_qubits)).expect("matching register")
    }
}

/// Cook–Levin instance together with the data it was built from.
#[derive(Debug, Clone)]
pub struct ClockInstance {
    pub instance: HamiltonianInstance,
    pub layout: ClockLayout,
    pub verifier: GateCircuit,
    pub penalty: f64,
}

fn p0() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO])
}

fn p1() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE])
}

fn basis_op(dim: usize, row: usize, col: usize) -> CMat {
    let mut m = CMat::zeros(dim, dim);
    m[(row, col)] = ONE;
    m
}

/// Propagation term for gate j (1-based) on gate qubits ++ clock window.
fn prop_term(layout: &ClockLayout, j: usize, gate: &Gate) -> Result<LocalTerm> {
    let (window, before, after) = if j == 1 {
        // (T1, T2): |00⟩ → |10⟩
        (vec![layout.clock(1), layout.clock(2)], 0usize, 1usize)
    } else {
        // (T_{j−1}, T_j, T_{j+1}): |100⟩ → |110⟩
        (vec![layout.clock(j - 1), layout.clock(j), layout.clock(j + 1)], 1, 3)
    };
    let dc = 1usize << window.len();
    let v = gate.matrix();
    let dv = v.nrows();
    let id = linalg::identity(dv);
    let diag = basis_op(dc, before, before) + basis_op(dc, after, after);
    let op = (linalg::kron(&diag, &id)
        - linalg::kron(&basis_op(dc, after, before), &v)
        - linalg::kron(&basis_op(dc, before, after), &v.adjoint()))
        * cr(0.5);
    let mut qs = gate.qubits.clone();
    qs.extend(window);
    LocalTerm::from_unsorted(&qs, op, 1.0)
}

/// Build H_in + H_out + H_prop + H_stab (each term halved) for `verifier`
/// acting on I ⊗ W ⊗ A. Thresholds: a = 1/(2^{n+1}(m+1)); b per `b_source`;
/// p the smallest value meeting the promise.
pub fn cook_levin(verifier: &GateCircuit, layout: ClockLayout, penalty: f64, b_source: BSource) -> Result<ClockInstance> {
    cook_levin_variant(verifier, layout, penalty, b_source, Variant::Pure)
}

pub fn cook_levin_variant(
    verifier: &GateCircuit,
    layout: ClockLayout,
    penalty: f64,
    b_source: BSource,
    variant: Variant,
) -> Result<ClockInstance> {
    layout.check()?;
    if verifier.n_qubits != layout.nv() {
        return Err(QError::Dimension(format!(
            "verifier on {} qubits, layout expects {}",
            verifier.n_qubits,
            layout.nv()
        )));
    }
    if verifier.len() != layout.m || layout.m == 0 {
        return Err(QError::Invalid(format!("layout has m = {}, verifier {} gates (need ≥ 1)", layout.m, verifier.len())));
    }
    for g in &verifier.gates {
        if g.qubits.len() > 2 {
            return Err(QError::Invalid(format!("gate {} acts on more than 2 qubits", g.kind.name())));
        }
        if g.qubits.iter().any(|&q| q >= layout.nv()) {
            return Err(QError::Invalid("gate touches the clock register".into()));
        }
    }
    let t1 = layout.clock(1);
    let half = |m: CMat| m * cr(0.5);
    let mut plain = Vec::new();
    // H_in: ½(I − |ψ⟩⟨ψ|^c) ⊗ |0⟩⟨0|_{T1}, split into plain and coupled parts.
    plain.push(LocalTerm::new(vec![t1], half(p0()))?);
    let coupled = vec![LocalTerm::new(vec![t1], half(p0()))?];
    for a in layout.anc_qubits() {
        plain.push(LocalTerm::from_unsorted(&[a, t1], half(linalg::kron(&p0(), &p1())), 1.0)?);
    }
    // H_out: ½|0⟩⟨0|_{ans} ⊗ |1⟩⟨1|_{T_m}
    let tm = layout.clock(layout.m);
    plain.push(LocalTerm::from_unsorted(&[layout.answer(), tm], half(linalg::kron(&p1(), &p0())), 1.0)?);
    for (i, g) in verifier.gates.iter().enumerate() {
        plain.push(prop_term(&layout, i + 1, g)?);
    }
    // H_stab: penalty · ½|0⟩⟨0|_{T_i} ⊗ |1⟩⟨1|_{T_{i+1}}, plus T_{m+1} kept at 0.
    for i in 1..=layout.m {
        let op = linalg::kron(&p1(), &p0());
        plain.push(LocalTerm::from_unsorted(&[layout.clock(i), layout.clock(i + 1)], op, 0.5 * penalty)?);
    }
    plain.push(LocalTerm::weighted(vec![layout.clock(layout.m + 1)], p1(), 0.5 * penalty)?);

    let mut instance = HamiltonianInstance {
        n_total_qubits: layout.total(),
        plain_terms: plain,
        coupled_terms: coupled,
        input_register: (0, layout.n_input()),
        p: 1,
        a: layout.a_threshold(),
        b: 0.0,
        variant,
    };
    instance.b = match b_source {
        BSource::Value(b) => b,
        BSource::Exact(psi) => instance.lambda_min(&psi)?,
        BSource::Reference => reference_b(layout, penalty)?,
    };
    if instance.b <= instance.a {
        return Err(QError::Promise(format!("b = {} does not exceed a = {}", instance.b, instance.a)));
    }
    instance.p = instance.minimal_p();
    Ok(ClockInstance { instance, layout, verifier: verifier.clone(), penalty })
}

/// Verifier of m identity gates on the given layout (always rejects).
pub fn identity_verifier(layout: ClockLayout) -> GateCircuit {
    let mut c = GateCircuit::new(layout.nv());
    for _ in 0..layout.m {
        c = c.with(GateKind::Unitary(linalg::identity(2)), &[0]);
    }
    c
}

/// Random Clifford+T verifier with m gates. An accepting verifier flips the
/// answer qubit first and never touches it again; a rejecting one never
/// touches it at all, so its clock Hamiltonian is unitarily equivalent to
/// that of [`identity_verifier`].
pub fn random_verifier<R: Rng + ?Sized>(layout: ClockLayout, accepting: bool, rng: &mut R) -> Result<GateCircuit> {
    let work = layout.answer();
    if work == 0 {
        return Err(QError::Invalid("verifier needs a qubit besides the answer".into()));
    }
    let mut c = GateCircuit::new(layout.nv());
    if accepting {
        c = c.with(GateKind::X, &[layout.answer()]);
    }
    while c.len() < layout.m {
        let q = rng.random_range(0..work);
        c = match rng.random_range(0..5) {
            0 => c.with(GateKind::H, &[q]),
            1 => c.with(GateKind::T, &[q]),
            2 => c.with(GateKind::S, &[q]),
            3 => c.with(GateKind::Z, &[q]),
            _ if work > 1 => {
                let r = (q + rng.random_range(1..work)) % work;
                c.with(GateKind::Cnot, &[q, r])
            }
            _ => c.with(GateKind::X, &[q]),
        };
    }
    Ok(c)
}

/// λ_min of the identity verifier's clock Hamiltonian (independent of ψ).
pub fn reference_b(layout: ClockLayout, penalty: f64) -> Result<f64> {
    let v = identity_verifier(layout);
    let ci = cook_levin(&v, layout, penalty, BSource::Value(f64::INFINITY))?;
    ci.instance.lambda_min(&PureState::zero(layout.n_input()))
}

/// η = (m+1)^{-½} Σ_t V_t⋯V_1(|ψ^c⟩|φ⟩|0⟩) ⊗ |1^t 0^{m+1−t}⟩.
pub fn history_state(verifier: &GateCircuit, layout: ClockLayout, psi_c: &PureState, phi: &PureState) -> Result<PureState> {
    if psi_c.n_qubits() != layout.n_input() || phi.n_qubits() != layout.n_witness || verifier.len() != layout.m {
        return Err(QError::Dimension("history state registers do not match the layout".into()));
    }
    check_cap(layout.total())?;
    let start = PureState::zero(layout.n_anc).tensor(phi).tensor(psi_c);
    let nv = layout.nv();
    let mut v = start.into_amplitudes();
    let mut out = CVec::zeros(1 << layout.total());
    let w = cr(1.0 / ((layout.m + 1) as f64).sqrt());
    for t in 0..=layout.m {
        if t > 0 {
            let g = &verifier.gates[t - 1];
            v = linalg::apply_op(&v, &g.matrix(), &g.qubits, nv);
        }
        for x in 0..v.len() {
            out[layout.index(x, t)] += v[x] * w;
        }
    }
    PureState::new(layout.total(), out)
}

/// Unitary C with C(|ψ⟩|φ⟩|0⟩|0…0⟩_T) = η: prepare the uniform unary clock,
/// then apply V_t controlled on T_t for t = 1..m.
pub fn honest_history_circuit(verifier: &GateCircuit, layout: ClockLayout) -> Result<GateCircuit> {
    let total = layout.total();
    let mut c = GateCircuit::new(total);
    let dc = 1usize << (layout.m + 1);
    let mut col = CMat::zeros(dc, 1);
    let w = cr(1.0 / ((layout.m + 1) as f64).sqrt());
    for t in 0..=layout.m {
        col[(layout.clock_value(t), 0)] = w;
    }
    c.push(Gate::new(GateKind::Unitary(linalg::complete_unitary(&col)), layout.clock_qubits())?)?;
    for (i, g) in verifier.gates.iter().enumerate() {
        let v = g.matrix();
        let id = linalg::identity(v.nrows());
        let cv = linalg::kron(&p0(), &id) + linalg::kron(&p1(), &v);
        let mut qs = g.qubits.clone();
        qs.push(layout.clock(i + 1));
        c.push(Gate::new(GateKind::Unitary(cv), qs)?)?;
    }
    Ok(c)
}

/// Expectation of the H_prop terms alone.
pub fn prop_energy(ci: &ClockInstance, eta: &PureState) -> Result<f64> {
    let n = ci.layout.total();
    let m = ci.layout.m;
    // The propagation terms follow: plain[0] (H_in), n_anc ancilla terms, H_out.
    let start = 1 + ci.layout.n_anc + 1;
    let mut e = 0.0;
    for t in &ci.instance.plain_terms[start..start + m] {
        let hv = linalg::apply_op(eta.amplitudes(), &t.scaled_matrix(), &t.qubits, n);
        e += eta.amplitudes().dotc(&hv).re;
    }
    Ok(e)
}

/// ⟨η|H_out|η⟩.
pub fn out_energy(ci: &ClockInstance, eta: &PureState) -> Result<f64> {
    let t = &ci.instance.plain_terms[1 + ci.layout.n_anc];
    let hv = linalg::apply_op(eta.amplitudes(), &t.scaled_matrix(), &t.qubits, ci.layout.total());
    Ok(eta.amplitudes().dotc(&hv).re)
}

/// Acceptance probability of the verifier on |ψ^c⟩|φ⟩|0⟩.
pub fn verifier_accept(verifier: &GateCircuit, layout: ClockLayout, psi_c: &PureState, phi: &PureState) -> Result<f64> {
    let start = PureState::zero(layout.n_anc).tensor(phi).tensor(psi_c);
    let out = verifier.apply(&start)?;
    let ans = layout.answer();
    Ok(out
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(x, _)| (x >> ans) & 1 == 1)
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{haar_state, rng_for};

    fn layout(n: usize, m: usize) -> ClockLayout {
        ClockLayout { n, copies: 1, n_witness: 1, n_anc: 1, m }
    }

    fn accepting(l: ClockLayout) -> GateCircuit {
        let mut c = GateCircuit::new(l.nv()).with(GateKind::X, &[l.answer()]);
        for _ in 1..l.m {
            c = c.with(GateKind::H, &[0]);
        }
        c
    }

    #[test]
    fn clock_values_are_unary() {
        let l = layout(1, 3);
        assert_eq!(l.clock_value(0), 0);
        assert_eq!(l.clock_value(1), 0b1000);
        assert_eq!(l.clock_value(3), 0b1110);
        assert_eq!(l.clock(1), l.nv() + 3);
        assert!(l.is_legal_clock(0b1100));
        assert!(!l.is_legal_clock(0b0100));
    }

    #[test]
    fn history_state_small_cases() {
        let l = ClockLayout { m: 0, ..layout(1, 0) };
        let psi = PureState::plus();
        let phi = PureState::basis(1, 1);
        let eta = history_state(&GateCircuit::new(l.nv()), l, &psi, &phi).unwrap();
        let want = PureState::zero(1).tensor(&PureState::zero(1)).tensor(&phi).tensor(&psi);
        assert!((eta.overlap_sq(&want).unwrap() - 1.0).abs() < 1e-12);

        let l = layout(1, 1);
        let v = GateCircuit::new(l.nv()).with(GateKind::Unitary(linalg::identity(2)), &[0]);
        let eta = history_state(&v, l, &psi, &phi).unwrap();
        let work = PureState::zero(1).tensor(&phi).tensor(&psi);
        let branch = |t: usize| {
            let mut amps = CVec::zeros(eta.dim());
            for x in 0..work.dim() {
                amps[l.index(x, t)] = work.amplitudes()[x];
            }
            PureState::new(l.total(), amps).unwrap()
        };
        assert!((eta.overlap_sq(&branch(0)).unwrap() - 0.5).abs() < 1e-12);
        assert!((eta.overlap_sq(&branch(1)).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn accepting_verifier_history_energy() {
        let mut rng = rng_for(5, 0);
        for m in 1..=3 {
            let n = if m == 3 { 2 } else { 1 };
            let l = ClockLayout { n, ..layout(n, m) };
            let v = accepting(l);
            let ci = cook_levin(&v, l, DEFAULT_PENALTY, BSource::Reference).unwrap();
            let psi = haar_state(n, &mut rng).unwrap();
            let phi = haar_state(1, &mut rng).unwrap();
            let eta = history_state(&v, l, &psi, &phi).unwrap();
            let e = ci.instance.energy(&psi, &eta).unwrap();
            assert!(e.abs() < 1e-10, "m={m}: {e}");
            assert!(e <= ci.instance.a);
            assert!(prop_energy(&ci, &eta).unwrap().abs() < 1e-12);
            ci.instance.validate().unwrap();
        }
    }

    #[test]
    fn identity_verifier_gap_and_shape() {
        for (n, m) in [(1, 1), (1, 2), (2, 3)] {
            let l = layout(n, m);
            let b = reference_b(l, DEFAULT_PENALTY).unwrap();
            assert!(b > l.a_threshold(), "n={n} m={m}: b={b}");
            assert!(b >= l.shape_bound(), "n={n} m={m}: b={b} < {}", l.shape_bound());
        }
    }

    #[test]
    fn honest_circuit_prepares_history_state() {
        let mut rng = rng_for(6, 0);
        let l = layout(1, 2);
        let v = GateCircuit::new(l.nv()).with(GateKind::H, &[1]).with(GateKind::Cnot, &[1, 2]);
        let c = honest_history_circuit(&v, l).unwrap();
        let psi = haar_state(1, &mut rng).unwrap();
        let phi = haar_state(1, &mut rng).unwrap();
        let start = PureState::zero(l.m + 1).tensor(&PureState::zero(1)).tensor(&phi).tensor(&psi);
        let got = c.apply(&start).unwrap();
        let want = history_state(&v, l, &psi, &phi).unwrap();
        assert!((got.overlap_sq(&want).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_gates() {
        let l = ClockLayout { n_witness: 0, ..layout(1, 1) };
        let v = GateCircuit::new(3).with(GateKind::Toffoli, &[0, 1, 2]);
        let l3 = ClockLayout { n_anc: 2, ..l };
        assert!(cook_levin(&v, l3, DEFAULT_PENALTY, BSource::Value(1.0)).is_err());
    }
}
