//! JSON file formats. Complex entries are `[re, im]` pairs, matrices are
//! row-major, and every document carries `version: "qplab-1"`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::crypto::PrsScheme;
use crate::hamlab::{HamiltonianInstance, LocalTerm, Variant};
use crate::qcore::linalg::{c, CMat, CVec};
use crate::qcore::{DensityMatrix, Gate, GateCircuit, GateKind, PureState};
use crate::verify::qor::QorInstance;
use crate::{QError, Result};

pub const SCHEMA: &str = "qplab-1";

pub type VectorJson = Vec<[f64; 2]>;
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

fn schema() -> String {
    SCHEMA.to_string()
}

pub fn vec_to_json(v: &CVec) -> VectorJson {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vec_from_json(v: &VectorJson) -> CVec {
    CVec::from_iterator(v.len(), v.iter().map(|p| c(p[0], p[1])))
}

pub fn mat_to_json(m: &CMat) -> MatrixJson {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|k| [m[(r, k)].re, m[(r, k)].im]).collect()).collect()
}

pub fn mat_from_json(m: &MatrixJson) -> Result<CMat> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if m.iter().any(|r| r.len() != cols) {
        return Err(QError::Dimension("ragged matrix rows".into()));
    }
    Ok(CMat::from_fn(rows, cols, |r, k| c(m[r][k][0], m[r][k][1])))
}

/// Deserialize with a line/column diagnostic on failure.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| QError::Parse { line: e.line(), column: e.column(), msg: e.to_string() })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable value")
}

fn check_version(v: &str) -> Result<()> {
    if v == SCHEMA {
        Ok(())
    } else {
        Err(QError::Schema { found: v.to_string(), expected: SCHEMA.to_string() })
    }
}

/// Either a state vector or a density matrix.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StateFile {
    pub version: String,
    pub n_qubits: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub amplitudes: Option<VectorJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrix: Option<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl LoadedState {
    pub fn density(&self) -> DensityMatrix {
        match self {
            LoadedState::Pure(p) => p.density(),
            LoadedState::Mixed(r) => r.clone(),
        }
    }
}

impl StateFile {
    pub fn from_pure(s: &PureState) -> Self {
        Self { version: schema(), n_qubits: s.n_qubits(), amplitudes: Some(vec_to_json(s.amplitudes())), matrix: None }
    }

    pub fn from_mixed(r: &DensityMatrix) -> Self {
        Self { version: schema(), n_qubits: r.n_qubits(), amplitudes: None, matrix: Some(mat_to_json(r.matrix())) }
    }

    pub fn load(&self) -> Result<LoadedState> {
        check_version(&self.version)?;
        match (&self.amplitudes, &self.matrix) {
            (Some(a), None) => Ok(LoadedState::Pure(PureState::new(self.n_qubits, vec_from_json(a))?)),
            (None, Some(m)) => Ok(LoadedState::Mixed(DensityMatrix::new(self.n_qubits, mat_from_json(m)?)?)),
            _ => Err(QError::Invalid("state file needs exactly one of amplitudes, matrix".into())),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub qubits: Vec<usize>,
    pub matrix: MatrixJson,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

impl TermJson {
    fn from_term(t: &LocalTerm) -> Self {
        Self { qubits: t.qubits.clone(), matrix: mat_to_json(t.matrix.matrix()), weight: t.weight }
    }

    fn to_term(&self) -> Result<LocalTerm> {
        LocalTerm::weighted(self.qubits.clone(), mat_from_json(&self.matrix)?, self.weight)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InstanceFile {
    pub version: String,
    pub n_qubits: usize,
    pub input_register: [usize; 2],
    pub plain_terms: Vec<TermJson>,
    pub coupled_terms: Vec<TermJson>,
    pub p: usize,
    pub a: f64,
    pub b: f64,
    pub variant: String,
}

impl InstanceFile {
    pub fn from_instance(inst: &HamiltonianInstance) -> Self {
        Self {
            version: schema(),
            n_qubits: inst.n_total_qubits,
            input_register: [inst.input_register.0, inst.input_register.1],
            plain_terms: inst.plain_terms.iter().map(TermJson::from_term).collect(),
            coupled_terms: inst.coupled_terms.iter().map(TermJson::from_term).collect(),
            p: inst.p,
            a: inst.a,
            b: inst.b,
            variant: inst.variant.name().to_string(),
        }
    }

    pub fn to_instance(&self) -> Result<HamiltonianInstance> {
        check_version(&self.version)?;
        let inst = HamiltonianInstance {
            n_total_qubits: self.n_qubits,
            plain_terms: self.plain_terms.iter().map(TermJson::to_term).collect::<Result<_>>()?,
            coupled_terms: self.coupled_terms.iter().map(TermJson::to_term).collect::<Result<_>>()?,
            input_register: (self.input_register[0], self.input_register[1]),
            p: self.p,
            a: self.a,
            b: self.b,
            variant: Variant::parse(&self.variant)?,
        };
        inst.validate()?;
        Ok(inst)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GateJson {
    pub name: String,
    pub qubits: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub params: Option<Vec<f64>>,
    /// Only for name "U".
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrix: Option<MatrixJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CircuitFile {
    #[serde(default = "schema")]
    pub version: String,
    pub n_qubits: usize,
    pub gates: Vec<GateJson>,
}

fn param(g: &GateJson) -> Result<f64> {
    g.params
        .as_ref()
        .and_then(|p| p.first().copied())
        .ok_or_else(|| QError::Invalid(format!("gate {} needs a parameter", g.name)))
}

impl CircuitFile {
    pub fn from_circuit(c: &GateCircuit) -> Self {
        let gates = c
            .gates
            .iter()
            .map(|g| {
                let (params, matrix) = match &g.kind {
                    GateKind::Ry(t) | GateKind::Rz(t) => (Some(vec![*t]), None),
                    GateKind::Unitary(m) => (None, Some(mat_to_json(m))),
                    _ => (None, None),
                };
                GateJson { name: g.kind.name().to_string(), qubits: g.qubits.clone(), params, matrix }
            })
            .collect();
        Self { version: schema(), n_qubits: c.n_qubits, gates }
    }

    pub fn to_circuit(&self) -> Result<GateCircuit> {
        check_version(&self.version)?;
        let mut out = GateCircuit::new(self.n_qubits);
        for g in &self.gates {
            let kind = match g.name.to_ascii_uppercase().as_str() {
                "H" => GateKind::H,
                "T" => GateKind::T,
                "TDG" => GateKind::Tdg,
                "S" => GateKind::S,
                "X" => GateKind::X,
                "Z" => GateKind::Z,
                "CNOT" => GateKind::Cnot,
                "SWAP" => GateKind::Swap,
                "TOFFOLI" => GateKind::Toffoli,
                "RY" => GateKind::Ry(param(g)?),
                "RZ" => GateKind::Rz(param(g)?),
                "U" => {
                    let m = g.matrix.as_ref().ok_or_else(|| QError::Invalid("gate U needs a matrix".into()))?;
                    GateKind::Unitary(mat_from_json(m)?)
                }
                other => return Err(QError::Invalid(format!("unknown gate {other}"))),
            };
            out.push(Gate::new(kind, g.qubits.clone())?)?;
        }
        Ok(out)
    }
}

/// Quantum-OR instance together with its input state.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct QorFile {
    pub version: String,
    pub n_a: usize,
    pub m: usize,
    pub lambda: MatrixJson,
    pub rho: MatrixJson,
    /// "yes" or "no" when generated.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub case: Option<String>,
}

impl QorFile {
    pub fn new(inst: &QorInstance, rho: &DensityMatrix, case: Option<&str>) -> Self {
        Self {
            version: schema(),
            n_a: inst.n_a,
            m: inst.m,
            lambda: mat_to_json(&inst.lambda),
            rho: mat_to_json(rho.matrix()),
            case: case.map(str::to_string),
        }
    }

    pub fn load(&self) -> Result<(QorInstance, DensityMatrix)> {
        check_version(&self.version)?;
        let inst = QorInstance::new(mat_from_json(&self.lambda)?, self.n_a, self.m)?;
        let rho = DensityMatrix::new(self.n_a, mat_from_json(&self.rho)?)?;
        Ok((inst, rho))
    }
}

/// Keyed state generator: one preparation circuit per key.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PrsFile {
    pub version: String,
    pub key_bits: usize,
    pub m: usize,
    pub circuits: Vec<CircuitFile>,
}

impl PrsFile {
    pub fn from_scheme(s: &PrsScheme) -> Self {
        Self {
            version: schema(),
            key_bits: s.key_bits,
            m: s.m,
            circuits: s.circuits.iter().map(CircuitFile::from_circuit).collect(),
        }
    }

    pub fn load(&self) -> Result<PrsScheme> {
        check_version(&self.version)?;
        let circuits = self.circuits.iter().map(CircuitFile::to_circuit).collect::<Result<Vec<_>>>()?;
        let s = PrsScheme::from_circuits(self.key_bits, circuits)?;
        if s.m != self.m {
            return Err(QError::Dimension(format!("circuits act on {} qubits, file says {}", s.m, self.m)));
        }
        Ok(s)
    }
}
