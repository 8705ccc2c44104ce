use crate::qcore::linalg::{self, cr, CMat, CVec};
use crate::qcore::{check_cap, HermitianOperator, PureState};
use crate::{QError, Result};

/// Local Hamiltonian term `weight · M` on a sorted list of qubits, with
/// 0 ⪯ M ⪯ I. Bit j of the matrix index corresponds to `qubits[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTerm {
    pub qubits: Vec<usize>,
    pub matrix: HermitianOperator,
    /// Nonnegative multiplier; 1 for every term except clock penalties.
    pub weight: f64,
}

impl LocalTerm {
    pub fn new(qubits: Vec<usize>, matrix: CMat) -> Result<Self> {
        Self::weighted(qubits, matrix, 1.0)
    }

    pub fn weighted(qubits: Vec<usize>, matrix: CMat, weight: f64) -> Result<Self> {
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(QError::Invalid(format!("term weight {weight}")));
        }
        if qubits.windows(2).any(|w| w[0] >= w[1]) {
            return Err(QError::Invalid("term qubits must be sorted and distinct".into()));
        }
        let op = HermitianOperator::new(qubits.len(), matrix)?;
        if !op.is_between_zero_and_identity(1e-10) {
            return Err(QError::Invalid("term matrix must satisfy 0 ⪯ M ⪯ I".into()));
        }
        Ok(Self { qubits, matrix: op, weight })
    }

    /// Build from an operator on an unsorted qubit list; the matrix is
    /// reindexed so that the stored list is ascending.
    pub fn from_unsorted(qubits: &[usize], matrix: CMat, weight: f64) -> Result<Self> {
        let mut order: Vec<usize> = (0..qubits.len()).collect();
        order.sort_by_key(|&j| qubits[j]);
        let sorted: Vec<usize> = order.iter().map(|&j| qubits[j]).collect();
        let k = qubits.len();
        let d = 1usize << k;
        // new bit i ↔ old bit order[i]
        let map = |x: usize| -> usize {
            let mut y = 0;
            for (i, &o) in order.iter().enumerate() {
                y |= ((x >> o) & 1) << i;
            }
            y
        };
        let mut m = CMat::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                m[(map(r), map(c))] = matrix[(r, c)];
            }
        }
        Self::weighted(sorted, m, weight)
    }

    pub fn scaled_matrix(&self) -> CMat {
        self.matrix.matrix() * cr(self.weight)
    }

    pub fn locality(&self) -> usize {
        self.qubits.len()
    }

    /// (eigenvalues, eigenvectors) of the unweighted matrix.
    pub fn eigen(&self) -> (Vec<f64>, CMat) {
        self.matrix.eigen()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Pure,
    Mixed,
    LowComplexity,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Pure => "pure",
            Variant::Mixed => "mixed",
            Variant::LowComplexity => "low-complexity",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pure" => Ok(Variant::Pure),
            "mixed" => Ok(Variant::Mixed),
            "low-complexity" => Ok(Variant::LowComplexity),
            other => Err(QError::Invalid(format!("unknown variant {other}"))),
        }
    }
}

/// H_ψ = Σ_s H_s − Σ_ℓ |ψ⟩⟨ψ|_I ⊗ H_ℓ with thresholds (p, a, b).
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianInstance {
    pub n_total_qubits: usize,
    pub plain_terms: Vec<LocalTerm>,
    pub coupled_terms: Vec<LocalTerm>,
    /// Half-open qubit range [lo, hi) holding the unknown state.
    pub input_register: (usize, usize),
    pub p: usize,
    pub a: f64,
    pub b: f64,
    pub variant: Variant,
}

impl HamiltonianInstance {
    pub fn input_qubits(&self) -> Vec<usize> {
        (self.input_register.0..self.input_register.1).collect()
    }

    pub fn input_len(&self) -> usize {
        self.input_register.1 - self.input_register.0
    }

    /// Largest coupled-term locality k.
    pub fn coupled_locality(&self) -> usize {
        self.coupled_terms.iter().map(|t| t.locality()).max().unwrap_or(0)
    }

    /// |S| + |L| (pure) or |S| + 2^k|L| (mixed).
    pub fn term_budget(&self) -> usize {
        match self.variant {
            Variant::Mixed => self.plain_terms.len() + (1 << self.coupled_locality()) * self.coupled_terms.len(),
            _ => self.plain_terms.len() + self.coupled_terms.len(),
        }
    }

    /// Required gap: 2/p (pure) or 4/p (mixed).
    pub fn required_gap(&self) -> f64 {
        match self.variant {
            Variant::Mixed => 4.0 / self.p as f64,
            _ => 2.0 / self.p as f64,
        }
    }

    /// Smallest p for which the promise holds given the term budget and gap.
    pub fn minimal_p(&self) -> usize {
        let num = if self.variant == Variant::Mixed { 4.0 } else { 2.0 };
        let from_gap = if self.b > self.a { (num / (self.b - self.a)).floor() as usize + 1 } else { usize::MAX };
        self.term_budget().max(from_gap).max(1)
    }

    /// Structural checks plus the promise conditions on (p, a, b).
    pub fn validate(&self) -> Result<()> {
        check_cap(self.n_total_qubits)?;
        let (lo, hi) = self.input_register;
        if lo >= hi || hi > self.n_total_qubits {
            return Err(QError::Invalid(format!("input register [{lo},{hi}) invalid")));
        }
        for t in self.plain_terms.iter().chain(&self.coupled_terms) {
            linalg::check_qubits(&t.qubits, self.n_total_qubits)?;
        }
        for t in &self.coupled_terms {
            if t.qubits.iter().any(|&q| q >= lo && q < hi) {
                return Err(QError::Invalid("coupled term overlaps the input register".into()));
            }
        }
        self.check_promise()
    }

    pub fn check_promise(&self) -> Result<()> {
        if self.term_budget() > self.p {
            return Err(QError::Promise(format!("term budget {} exceeds p = {}", self.term_budget(), self.p)));
        }
        if !(self.b - self.a > self.required_gap()) {
            return Err(QError::Promise(format!(
                "b − a = {} not above {}",
                self.b - self.a,
                self.required_gap()
            )));
        }
        Ok(())
    }

    fn check_input(&self, psi: &PureState) -> Result<()> {
        if psi.n_qubits() != self.input_len() {
            return Err(QError::Dimension(format!(
                "input register has {} qubits, state has {}",
                self.input_len(),
                psi.n_qubits()
            )));
        }
        Ok(())
    }

    /// Local operator |ψ⟩⟨ψ|_I ⊗ H_ℓ on the qubit list I ++ ℓ.
    pub fn coupled_local(&self, term: &LocalTerm, psi: &PureState) -> (Vec<usize>, CMat) {
        let mut qs = self.input_qubits();
        qs.extend_from_slice(&term.qubits);
        let op = linalg::kron(&term.scaled_matrix(), &psi.density().matrix().clone());
        (qs, op)
    }

    /// Full 2^n matrix of H_ψ.
    pub fn assemble(&self, psi: &PureState) -> Result<HermitianOperator> {
        check_cap(self.n_total_qubits)?;
        self.check_input(psi)?;
        let n = self.n_total_qubits;
        let d = 1usize << n;
        let mut h = CMat::zeros(d, d);
        for t in &self.plain_terms {
            h += linalg::embed(&t.scaled_matrix(), &t.qubits, n);
        }
        for t in &self.coupled_terms {
            let (qs, op) = self.coupled_local(t, psi);
            h -= linalg::embed(&op, &qs, n);
        }
        HermitianOperator::new(n, h)
    }

    /// H_ψ |v⟩ without forming the full matrix.
    pub fn apply(&self, psi: &PureState, v: &CVec) -> Result<CVec> {
        self.check_input(psi)?;
        let n = self.n_total_qubits;
        let mut out = CVec::zeros(v.len());
        for t in &self.plain_terms {
            out += linalg::apply_op(v, &t.scaled_matrix(), &t.qubits, n);
        }
        for t in &self.coupled_terms {
            let (qs, op) = self.coupled_local(t, psi);
            out -= linalg::apply_op(v, &op, &qs, n);
        }
        Ok(out)
    }

    /// ⟨η|H_ψ|η⟩.
    pub fn energy(&self, psi: &PureState, eta: &PureState) -> Result<f64> {
        if eta.n_qubits() != self.n_total_qubits {
            return Err(QError::Dimension("witness does not match the instance".into()));
        }
        let hv = self.apply(psi, eta.amplitudes())?;
        Ok(eta.amplitudes().dotc(&hv).re)
    }

    /// Exact ground energy of H_ψ.
    pub fn lambda_min(&self, psi: &PureState) -> Result<f64> {
        Ok(crate::qcore::min_eigenpair(&self.assemble(psi)?)?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{identity, ONE, ZERO};

    fn proj1() -> CMat {
        CMat::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE])
    }

    #[test]
    fn plain_only_ground_energy() {
        let p1 = proj1();
        let inst = HamiltonianInstance {
            n_total_qubits: 2,
            plain_terms: vec![LocalTerm::new(vec![0], p1).unwrap()],
            coupled_terms: vec![],
            input_register: (1, 2),
            p: 10,
            a: 0.0,
            b: 0.5,
            variant: Variant::Pure,
        };
        assert!(inst.lambda_min(&PureState::zero(1)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn coupled_identity_gives_minus_one() {
        let inst = HamiltonianInstance {
            n_total_qubits: 2,
            plain_terms: vec![],
            coupled_terms: vec![LocalTerm::new(vec![1], identity(2)).unwrap()],
            input_register: (0, 1),
            p: 10,
            a: 0.0,
            b: 0.5,
            variant: Variant::Pure,
        };
        let h = inst.assemble(&PureState::zero(1)).unwrap();
        let (l, _) = crate::qcore::min_eigenpair(&h).unwrap();
        assert!((l + 1.0).abs() < 1e-12);
        // −|0⟩⟨0| ⊗ I in this layout: qubit 0 holds ψ.
        let want = -linalg::embed(&CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]), &[0], 2);
        assert!((h.matrix() - want).camax() < 1e-14);
    }

    #[test]
    fn term_validation() {
        assert!(LocalTerm::new(vec![1, 0], identity(4)).is_err());
        assert!(LocalTerm::new(vec![0], identity(2).scale(2.0)).is_err());
        // Unsorted construction reorders bits: projector on qubit 3 being 1
        // and qubit 1 being 0, given as [3, 1].
        let mut m = CMat::zeros(4, 4);
        m[(1, 1)] = ONE; // bit0 (qubit 3) = 1, bit1 (qubit 1) = 0
        let t = LocalTerm::from_unsorted(&[3, 1], m, 1.0).unwrap();
        assert_eq!(t.qubits, vec![1, 3]);
        assert_eq!(t.matrix.matrix()[(2, 2)], ONE);
    }

    #[test]
    fn apply_matches_assemble() {
        let inst = HamiltonianInstance {
            n_total_qubits: 3,
            plain_terms: vec![LocalTerm::new(vec![0, 2], identity(4).scale(0.5)).unwrap()],
            coupled_terms: vec![LocalTerm::new(vec![2], proj1()).unwrap()],
            input_register: (0, 2),
            p: 10,
            a: 0.0,
            b: 0.5,
            variant: Variant::Pure,
        };
        let mut rng = crate::qcore::rng_for(1, 0);
        let psi = crate::qcore::haar_state(2, &mut rng).unwrap();
        let v = crate::qcore::haar_state(3, &mut rng).unwrap();
        let a = inst.assemble(&psi).unwrap().matrix() * v.amplitudes();
        let b = inst.apply(&psi, v.amplitudes()).unwrap();
        assert!((a - b).camax() < 1e-12);
    }
}
