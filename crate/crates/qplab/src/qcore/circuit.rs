use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use super::linalg::{self, c, cr, CMat, CVec, ONE, ZERO};
use super::state::PureState;
use crate::{QError, Result};

/// Elementary gates. The serialized set is H, T, CNOT, X, SWAP, TOFFOLI;
/// the remaining kinds are used by internal constructions.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    H,
    T,
    Tdg,
    S,
    X,
    Z,
    Cnot,
    Swap,
    Toffoli,
    Ry(f64),
    Rz(f64),
    /// Arbitrary unitary on its qubits (bit j of the index is `qubits[j]`).
    Unitary(CMat),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Swap => 2,
            GateKind::Toffoli => 3,
            GateKind::Unitary(m) => m.nrows().trailing_zeros() as usize,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::T => "T",
            GateKind::Tdg => "TDG",
            GateKind::S => "S",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::Cnot => "CNOT",
            GateKind::Swap => "SWAP",
            GateKind::Toffoli => "TOFFOLI",
            GateKind::Ry(_) => "RY",
            GateKind::Rz(_) => "RZ",
            GateKind::Unitary(_) => "U",
        }
    }

    /// Local matrix; bit j of the index corresponds to the gate's j-th qubit.
    /// For CNOT the first qubit is the control, for TOFFOLI the first two.
    pub fn matrix(&self) -> CMat {
        let h = FRAC_1_SQRT_2;
        match self {
            GateKind::H => CMat::from_row_slice(2, 2, &[cr(h), cr(h), cr(h), cr(-h)]),
            GateKind::T => diag(&[ONE, C64Ext::phase(FRAC_PI_4)]),
            GateKind::Tdg => diag(&[ONE, C64Ext::phase(-FRAC_PI_4)]),
            GateKind::S => diag(&[ONE, c(0.0, 1.0)]),
            GateKind::X => permutation(2, &[(0, 1)]),
            GateKind::Z => diag(&[ONE, cr(-1.0)]),
            GateKind::Cnot => permutation(4, &[(1, 3)]),
            GateKind::Swap => permutation(4, &[(1, 2)]),
            GateKind::Toffoli => permutation(8, &[(3, 7)]),
            GateKind::Ry(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                CMat::from_row_slice(2, 2, &[cr(co), cr(-s), cr(s), cr(co)])
            }
            GateKind::Rz(t) => diag(&[C64Ext::phase(-t / 2.0), C64Ext::phase(t / 2.0)]),
            GateKind::Unitary(m) => m.clone(),
        }
    }

    pub fn inverse(&self) -> GateKind {
        match self {
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::S => GateKind::Unitary(diag(&[ONE, c(0.0, -1.0)])),
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::Rz(t) => GateKind::Rz(-t),
            GateKind::Unitary(m) => GateKind::Unitary(m.adjoint()),
            other => other.clone(),
        }
    }
}

struct C64Ext;

impl C64Ext {
    fn phase(t: f64) -> linalg::C64 {
        c(t.cos(), t.sin())
    }
}

fn diag(d: &[linalg::C64]) -> CMat {
    CMat::from_diagonal(&CVec::from_column_slice(d))
}

fn permutation(dim: usize, swaps: &[(usize, usize)]) -> CMat {
    let mut m = linalg::identity(dim);
    for &(a, b) in swaps {
        m[(a, a)] = ZERO;
        m[(b, b)] = ZERO;
        m[(a, b)] = ONE;
        m[(b, a)] = ONE;
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Result<Self> {
        if kind.arity() != qubits.len() {
            return Err(QError::Invalid(format!(
                "gate {} expects {} qubits, got {}",
                kind.name(),
                kind.arity(),
                qubits.len()
            )));
        }
        if let GateKind::Unitary(m) = &kind {
            if m.nrows() != m.ncols() || !m.nrows().is_power_of_two() {
                return Err(QError::Dimension("unitary gate must be 2^k square".into()));
            }
            let dev = (m.adjoint() * m - linalg::identity(m.nrows())).camax();
            if dev > 1e-8 {
                return Err(QError::Invalid(format!("gate matrix not unitary ({dev:e})")));
            }
        }
        Ok(Self { kind, qubits })
    }

    pub fn matrix(&self) -> CMat {
        self.kind.matrix()
    }

    pub fn inverse(&self) -> Gate {
        Gate { kind: self.kind.inverse(), qubits: self.qubits.clone() }
    }
}

/// Ordered gate list V = V_m ⋯ V_1 (gates[0] is applied first).
#[derive(Debug, Clone, PartialEq)]
pub struct GateCircuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl GateCircuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new() }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        linalg::check_qubits(&g.qubits, self.n_qubits)?;
        self.gates.push(g);
        Ok(())
    }

    /// Append a gate; panics on invalid qubits (for internal builders).
    pub fn with(mut self, kind: GateKind, qubits: &[usize]) -> Self {
        let g = Gate::new(kind, qubits.to_vec()).expect("gate arity");
        self.push(g).expect("gate qubits");
        self
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn apply_vec(&self, v: &CVec) -> CVec {
        let mut out = v.clone();
        for g in &self.gates {
            out = linalg::apply_op(&out, &g.matrix(), &g.qubits, self.n_qubits);
        }
        out
    }

    /// Apply the first `t` gates.
    pub fn apply_prefix(&self, v: &CVec, t: usize) -> CVec {
        let mut out = v.clone();
        for g in &self.gates[..t] {
            out = linalg::apply_op(&out, &g.matrix(), &g.qubits, self.n_qubits);
        }
        out
    }

    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        if psi.n_qubits() != self.n_qubits {
            return Err(QError::Dimension(format!(
                "circuit on {} qubits, state on {}",
                self.n_qubits,
                psi.n_qubits()
            )));
        }
        Ok(PureState::from_raw(self.n_qubits, self.apply_vec(psi.amplitudes())))
    }

    pub fn unitary(&self) -> CMat {
        let d = 1usize << self.n_qubits;
        let mut u = linalg::identity(d);
        for g in &self.gates {
            u = linalg::embed(&g.matrix(), &g.qubits, self.n_qubits) * u;
        }
        u
    }

    pub fn inverse(&self) -> GateCircuit {
        GateCircuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Same gates on a larger register with qubit q mapped to `map[q]`.
    pub fn relabeled(&self, n_qubits: usize, map: &[usize]) -> Result<GateCircuit> {
        let mut out = GateCircuit::new(n_qubits);
        for g in &self.gates {
            let qs = g.qubits.iter().map(|&q| map[q]).collect();
            out.push(Gate { kind: g.kind.clone(), qubits: qs })?;
        }
        Ok(out)
    }
}
