use super::linalg::{self, cr, CMat, CVec, C64, ONE};
use super::{EIG_CUTOFF, TOL};
use crate::{QError, Result};

/// Normalized ket on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: CVec,
}

impl PureState {
    pub fn new(n_qubits: usize, amps: CVec) -> Result<Self> {
        if amps.len() != 1usize << n_qubits {
            return Err(QError::Dimension(format!(
                "{} amplitudes for {} qubits",
                amps.len(),
                n_qubits
            )));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > TOL {
            return Err(QError::NotNormalized(norm));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Normalizes the given vector; fails on a (numerically) zero vector.
    pub fn normalized(n_qubits: usize, amps: CVec) -> Result<Self> {
        let norm = amps.norm();
        if norm < 1e-300 {
            return Err(QError::NotNormalized(norm));
        }
        Self::new(n_qubits, amps / cr(norm))
    }

    pub(crate) fn from_raw(n_qubits: usize, amps: CVec) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = CVec::zeros(1 << n_qubits);
        amps[index] = ONE;
        Self { n_qubits, amps }
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_raw(1, CVec::from_vec(vec![cr(h), cr(h)]))
    }

    /// `(|00…0⟩|00…0⟩ + … + |11…1⟩|11…1⟩)/√(2^k)` on 2k qubits, pairing
    /// qubit j with qubit j + k.
    pub fn epr(k: usize) -> Self {
        let d = 1usize << k;
        let mut amps = CVec::zeros(d * d);
        let a = cr(1.0 / (d as f64).sqrt());
        for j in 0..d {
            amps[j * d + j] = a;
        }
        Self::from_raw(2 * k, amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVec {
        self.amps
    }

    /// `self ⊗ other`; the qubits of `other` occupy the low indices.
    pub fn tensor(&self, other: &PureState) -> PureState {
        Self::from_raw(self.n_qubits + other.n_qubits, linalg::kron_vec(&self.amps, &other.amps))
    }

    pub fn tensor_power(&self, k: usize) -> PureState {
        let mut out = PureState::from_raw(0, CVec::from_element(1, ONE));
        for _ in 0..k {
            out = out.tensor(self);
        }
        out
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(QError::Dimension(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn overlap_sq(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_raw(self.n_qubits, linalg::projector(&self.amps))
    }

    /// Apply a local unitary on the listed qubits.
    pub fn apply(&self, op: &CMat, qubits: &[usize]) -> Result<PureState> {
        linalg::check_qubits(qubits, self.n_qubits)?;
        if op.nrows() != 1 << qubits.len() || op.ncols() != op.nrows() {
            return Err(QError::Dimension(format!(
                "operator {}x{} on {} qubits",
                op.nrows(),
                op.ncols(),
                qubits.len()
            )));
        }
        Ok(Self::from_raw(
            self.n_qubits,
            linalg::apply_op(&self.amps, op, qubits, self.n_qubits),
        ))
    }

    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        linalg::check_qubits(keep, self.n_qubits)?;
        Ok(DensityMatrix::from_raw(
            keep.len(),
            linalg::reduced_from_vec(&self.amps, self.n_qubits, keep),
        ))
    }

    /// Reorder qubits so that qubit j of the result is `order[j]` here.
    pub fn permuted(&self, order: &[usize]) -> Result<PureState> {
        linalg::check_qubits(order, self.n_qubits)?;
        if order.len() != self.n_qubits {
            return Err(QError::Invalid("permutation must list every qubit".into()));
        }
        Ok(Self::from_raw(self.n_qubits, linalg::permute_vec(&self.amps, order)))
    }
}

/// Unit-trace positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    mat: CMat,
}

impl DensityMatrix {
    /// Validating constructor: symmetrizes, rejects non-Hermitian input and
    /// eigenvalues below −1e-10, clamps tiny negative eigenvalues.
    pub fn new(n_qubits: usize, mat: CMat) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(QError::Dimension(format!(
                "{}x{} matrix for {} qubits",
                mat.nrows(),
                mat.ncols(),
                n_qubits
            )));
        }
        let dev = linalg::hermitian_deviation(&mat);
        if dev > TOL {
            return Err(QError::NotHermitian(dev));
        }
        let h = linalg::hermitize(&mat);
        let tr = h.trace().re;
        if (tr - 1.0).abs() > TOL {
            return Err(QError::Trace(tr));
        }
        let (vals, vecs) = linalg::eigh(&h);
        let min = vals.first().copied().unwrap_or(0.0);
        if min < -TOL {
            return Err(QError::NotPsd(min));
        }
        // Round-off below 1e-14 is left alone so that stored matrices reload
        // bit for bit.
        let mat = if min < -1e-14 {
            let clamped = linalg::spectral_apply(&vals, &vecs, |l| l.max(0.0));
            let t = clamped.trace().re;
            clamped / cr(t)
        } else {
            h
        };
        Ok(Self { n_qubits, mat })
    }

    /// Trusted constructor for matrices produced by exact operations.
    pub(crate) fn from_raw(n_qubits: usize, mat: CMat) -> Self {
        debug_assert_eq!(mat.nrows(), 1 << n_qubits);
        Self { n_qubits, mat: linalg::hermitize(&mat) }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Self::from_raw(n_qubits, linalg::identity(d) / cr(d as f64))
    }

    /// Maximally mixed state on the span of the given orthonormal columns.
    pub fn uniform_on(n_qubits: usize, basis: &CMat) -> Self {
        let k = basis.ncols() as f64;
        Self::from_raw(n_qubits, (basis * basis.adjoint()) / cr(k))
    }

    /// Convex mixture Σ w_i ρ_i (weights must sum to one).
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| QError::Invalid("empty mixture".into()))?;
        let n = first.1.n_qubits;
        let mut acc = CMat::zeros(first.1.dim(), first.1.dim());
        for (w, r) in parts {
            if r.n_qubits != n {
                return Err(QError::Dimension("mixture parts differ in size".into()));
            }
            acc += r.mat.clone() * cr(*w);
        }
        Self::new(n, acc)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_raw(self.n_qubits + other.n_qubits, linalg::kron(&self.mat, &other.mat))
    }

    pub fn tensor_power(&self, k: usize) -> DensityMatrix {
        let mut out = DensityMatrix::from_raw(0, CMat::from_element(1, 1, ONE));
        for _ in 0..k {
            out = out.tensor(self);
        }
        out
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        linalg::check_qubits(keep, self.n_qubits)?;
        Ok(Self::from_raw(
            keep.len(),
            linalg::partial_trace_mat(&self.mat, self.n_qubits, keep),
        ))
    }

    /// Eigenpairs with descending eigenvalues; ties broken lexicographically
    /// on the (phase-fixed) eigenvector entries so the order is reproducible.
    pub fn spectral_descending(&self) -> Vec<(f64, PureState)> {
        let (vals, vecs) = linalg::eigh(&self.mat);
        let mut pairs: Vec<(f64, CVec)> = vals
            .iter()
            .enumerate()
            .map(|(j, &l)| (l, fix_phase(vecs.column(j).into_owned())))
            .collect();
        pairs.sort_by(|a, b| {
            if (a.0 - b.0).abs() > 1e-10 {
                b.0.total_cmp(&a.0)
            } else {
                lex_cmp(&a.1, &b.1)
            }
        });
        pairs
            .into_iter()
            .map(|(l, v)| (l.max(0.0), PureState::from_raw(self.n_qubits, v)))
            .collect()
    }

    /// Eigenpairs with weight above the support cutoff.
    pub fn support_decomposition(&self) -> Vec<(f64, PureState)> {
        self.spectral_descending().into_iter().filter(|(l, _)| *l > EIG_CUTOFF).collect()
    }

    pub fn expectation(&self, op: &CMat) -> f64 {
        (&self.mat * op).trace().re
    }

    /// U ρ U† for a local unitary.
    pub fn conjugate(&self, op: &CMat, qubits: &[usize]) -> Result<DensityMatrix> {
        linalg::check_qubits(qubits, self.n_qubits)?;
        let u = linalg::embed(op, qubits, self.n_qubits);
        Ok(Self::from_raw(self.n_qubits, &u * &self.mat * u.adjoint()))
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }
}

/// Multiply by a phase so the first entry of largest modulus is real positive.
pub(crate) fn fix_phase(mut v: CVec) -> CVec {
    let mut best = 0usize;
    let mut bm = -1.0;
    for (i, a) in v.iter().enumerate() {
        let m = a.norm();
        if m > bm + 1e-9 {
            bm = m;
            best = i;
        }
    }
    if bm > 0.0 {
        let ph = v[best] / cr(v[best].norm());
        v /= ph;
    }
    v
}

fn lex_cmp(a: &CVec, b: &CVec) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let o = y.re.total_cmp(&x.re);
        if (x.re - y.re).abs() > 1e-9 {
            return o;
        }
        if (x.im - y.im).abs() > 1e-9 {
            return y.im.total_cmp(&x.im);
        }
    }
    std::cmp::Ordering::Equal
}

/// Hermitian matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    n_qubits: usize,
    mat: CMat,
}

impl HermitianOperator {
    pub fn new(n_qubits: usize, mat: CMat) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(QError::Dimension(format!(
                "{}x{} matrix for {} qubits",
                mat.nrows(),
                mat.ncols(),
                n_qubits
            )));
        }
        let dev = linalg::hermitian_deviation(&mat);
        if dev > TOL {
            return Err(QError::NotHermitian(dev));
        }
        Ok(Self { n_qubits, mat: linalg::hermitize(&mat) })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn eigen(&self) -> (Vec<f64>, CMat) {
        linalg::eigh(&self.mat)
    }

    /// ‖A² − A‖_max.
    pub fn projector_deviation(&self) -> f64 {
        (&self.mat * &self.mat - &self.mat).camax()
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.projector_deviation() <= tol
    }

    /// 0 ⪯ A ⪯ I within `tol`.
    pub fn is_between_zero_and_identity(&self, tol: f64) -> bool {
        let (vals, _) = self.eigen();
        vals.iter().all(|&l| l >= -tol && l <= 1.0 + tol)
    }

    pub fn expectation(&self, psi: &PureState) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(QError::Dimension("operator and state differ".into()));
        }
        Ok(psi.amplitudes().dotc(&(&self.mat * psi.amplitudes())).re)
    }
}

pub(crate) fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        Err(QError::Dimension(format!("{a} vs {b}")))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::c;

    #[test]
    fn tensor_basic_cases() {
        let z = PureState::zero(1);
        let zz = z.tensor(&z);
        assert_eq!(zz.amplitudes()[0], ONE);
        assert!(zz.amplitudes().iter().skip(1).all(|a| a.norm() == 0.0));
        let pz = PureState::plus().tensor(&z);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [h, 0.0, h, 0.0];
        for (a, w) in pz.amplitudes().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn partial_trace_of_bell_pair_is_maximally_mixed() {
        let bell = PureState::epr(1).density();
        let red = bell.partial_trace(&[1]).unwrap();
        assert!((red.matrix() - DensityMatrix::maximally_mixed(1).matrix()).camax() < 1e-15);
    }

    #[test]
    fn partial_trace_of_product() {
        let rho = DensityMatrix::new(
            1,
            CMat::from_row_slice(2, 2, &[cr(0.7), c(0.1, 0.2), c(0.1, -0.2), cr(0.3)]),
        )
        .unwrap();
        let sigma = DensityMatrix::maximally_mixed(1);
        // rho ⊗ sigma: rho sits on qubit 1.
        let joint = rho.tensor(&sigma);
        let back = joint.partial_trace(&[1]).unwrap();
        assert!((back.matrix() - rho.matrix()).camax() < 1e-15);
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        assert!(matches!(
            PureState::new(1, CVec::from_vec(vec![ONE, ONE])),
            Err(QError::NotNormalized(_))
        ));
        assert!(matches!(
            DensityMatrix::new(1, CMat::from_row_slice(2, 2, &[cr(1.5), cr(0.0), cr(0.0), cr(-0.5)])),
            Err(QError::NotPsd(_))
        ));
        assert!(matches!(
            DensityMatrix::new(1, CMat::from_row_slice(2, 2, &[cr(0.5), cr(1.0), cr(0.0), cr(0.5)])),
            Err(QError::NotHermitian(_))
        ));
        assert!(matches!(
            PureState::zero(2).reduced(&[3]),
            Err(QError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn tiny_negative_eigenvalue_is_clamped() {
        let m = CMat::from_row_slice(2, 2, &[cr(1.0 + 5e-11), cr(0.0), cr(0.0), cr(-5e-11)]);
        let r = DensityMatrix::new(1, m).unwrap();
        let (vals, _) = linalg::eigh(r.matrix());
        assert!(vals[0] >= 0.0);
        assert!((r.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_order_is_descending() {
        let r = DensityMatrix::new(
            1,
            CMat::from_row_slice(2, 2, &[cr(0.25), cr(0.0), cr(0.0), cr(0.75)]),
        )
        .unwrap();
        let sp = r.spectral_descending();
        assert!((sp[0].0 - 0.75).abs() < 1e-14);
        assert!((sp[0].1.amplitudes()[1].re - 1.0).abs() < 1e-14);
    }
}
