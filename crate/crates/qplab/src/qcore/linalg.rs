//! Dense complex helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{QError, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    a.kronecker(b)
}

pub fn outer(a: &CVec, b: &CVec) -> CMat {
    a * b.adjoint()
}

pub fn projector(v: &CVec) -> CMat {
    outer(v, v)
}

pub fn trace(m: &CMat) -> C64 {
    m.trace()
}

pub fn hermitian_deviation(m: &CMat) -> f64 {
    (m - m.adjoint()).camax()
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
/// Columns of the returned matrix are the eigenvectors.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let h = hermitize(m);
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Rebuild `V diag(f(λ)) V†` from a decomposition.
pub fn spectral_apply(vals: &[f64], vecs: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let n = vecs.nrows();
    let mut scaled = vecs.clone();
    for (j, &l) in vals.iter().enumerate() {
        let s = f(l);
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    scaled * vecs.adjoint()
}

pub fn psd_sqrt(m: &CMat) -> CMat {
    let (vals, vecs) = eigh(m);
    spectral_apply(&vals, &vecs, |l| l.max(0.0).sqrt())
}

/// Inverse square root on the support (eigenvalues above `cutoff`).
pub fn psd_pinv_sqrt(m: &CMat, cutoff: f64) -> CMat {
    let (vals, vecs) = eigh(m);
    spectral_apply(&vals, &vecs, |l| if l > cutoff { 1.0 / l.sqrt() } else { 0.0 })
}

pub fn support_projector(m: &CMat, cutoff: f64) -> CMat {
    let (vals, vecs) = eigh(m);
    spectral_apply(&vals, &vecs, |l| if l > cutoff { 1.0 } else { 0.0 })
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

pub fn trace_norm(m: &CMat) -> f64 {
    singular_values(m).iter().sum()
}

pub fn operator_norm(m: &CMat) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

pub fn check_qubits(qubits: &[usize], n: usize) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n {
            return Err(QError::IndexOutOfRange { index: q, n });
        }
        if qubits[..i].contains(&q) {
            return Err(QError::DuplicateIndex(q));
        }
    }
    Ok(())
}

/// Index helper splitting an `n`-qubit basis index into the bits listed in
/// `sel` (bit j of the sub-index comes from qubit `sel[j]`) and the rest.
pub struct QubitSplit {
    pub sel: Vec<usize>,
    pub rest: Vec<usize>,
}

impl QubitSplit {
    pub fn new(sel: &[usize], n: usize) -> Self {
        let rest = (0..n).filter(|q| !sel.contains(q)).collect();
        Self { sel: sel.to_vec(), rest }
    }

    pub fn join(&self, s: usize, r: usize) -> usize {
        let mut x = 0usize;
        for (j, &q) in self.sel.iter().enumerate() {
            x |= ((s >> j) & 1) << q;
        }
        for (j, &q) in self.rest.iter().enumerate() {
            x |= ((r >> j) & 1) << q;
        }
        x
    }

    pub fn dims(&self) -> (usize, usize) {
        (1 << self.sel.len(), 1 << self.rest.len())
    }
}

/// Apply a `2^k × 2^k` operator to the listed qubits of a state vector.
/// Bit j of the operator's index corresponds to `qubits[j]`.
pub fn apply_op(v: &CVec, op: &CMat, qubits: &[usize], n: usize) -> CVec {
    let k = qubits.len();
    let dk = 1usize << k;
    debug_assert_eq!(op.nrows(), dk);
    let split = QubitSplit::new(qubits, n);
    let (_, dr) = split.dims();
    let mut out = CVec::zeros(v.len());
    let mut buf = vec![ZERO; dk];
    let mut idx = vec![0usize; dk];
    for r in 0..dr {
        for s in 0..dk {
            idx[s] = split.join(s, r);
            buf[s] = v[idx[s]];
        }
        for s in 0..dk {
            let mut acc = ZERO;
            for t in 0..dk {
                let m = op[(s, t)];
                if m != ZERO {
                    acc += m * buf[t];
                }
            }
            out[idx[s]] = acc;
        }
    }
    out
}

/// Full `2^n` matrix of a local operator padded with identities.
pub fn embed(op: &CMat, qubits: &[usize], n: usize) -> CMat {
    let dim = 1usize << n;
    let k = qubits.len();
    let dk = 1usize << k;
    let split = QubitSplit::new(qubits, n);
    let (_, dr) = split.dims();
    let mut out = CMat::zeros(dim, dim);
    for r in 0..dr {
        for s in 0..dk {
            for t in 0..dk {
                let m = op[(s, t)];
                if m != ZERO {
                    out[(split.join(s, r), split.join(t, r))] = m;
                }
            }
        }
    }
    out
}

/// Reduced density matrix of a pure vector on `keep` (output qubit j is `keep[j]`).
pub fn reduced_from_vec(v: &CVec, n: usize, keep: &[usize]) -> CMat {
    let split = QubitSplit::new(keep, n);
    let (dk, dr) = split.dims();
    let mut m = CMat::zeros(dk, dr);
    for s in 0..dk {
        for r in 0..dr {
            m[(s, r)] = v[split.join(s, r)];
        }
    }
    &m * m.adjoint()
}

/// Partial trace of a `2^n` matrix keeping `keep` (output qubit j is `keep[j]`).
pub fn partial_trace_mat(m: &CMat, n: usize, keep: &[usize]) -> CMat {
    let split = QubitSplit::new(keep, n);
    let (dk, dr) = split.dims();
    let mut out = CMat::zeros(dk, dk);
    for s in 0..dk {
        for t in 0..dk {
            let mut acc = ZERO;
            for r in 0..dr {
                acc += m[(split.join(s, r), split.join(t, r))];
            }
            out[(s, t)] = acc;
        }
    }
    out
}

/// Reorder qubits: qubit j of the result is qubit `order[j]` of the input.
pub fn permute_vec(v: &CVec, order: &[usize]) -> CVec {
    let mut out = CVec::zeros(v.len());
    for x in 0..v.len() {
        let mut y = 0usize;
        for (j, &q) in order.iter().enumerate() {
            y |= ((x >> q) & 1) << j;
        }
        out[y] = v[x];
    }
    out
}

/// Column-major `2^|sel| × 2^|rest|` coefficient matrix of a pure vector.
pub fn coefficient_matrix(v: &CVec, n: usize, sel: &[usize]) -> CMat {
    let split = QubitSplit::new(sel, n);
    let (ds, dr) = split.dims();
    let mut m = CMat::zeros(ds, dr);
    for s in 0..ds {
        for r in 0..dr {
            m[(s, r)] = v[split.join(s, r)];
        }
    }
    m
}

/// Extend the given orthonormal columns to a full unitary (Gram-Schmidt on
/// the standard basis).
pub fn complete_unitary(cols: &CMat) -> CMat {
    let dim = cols.nrows();
    let mut basis: Vec<CVec> = (0..cols.ncols()).map(|j| cols.column(j).into_owned()).collect();
    for e in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = CVec::zeros(dim);
        v[e] = ONE;
        for b in &basis {
            let p = b.dotc(&v);
            v -= b * p;
        }
        for b in &basis {
            let p = b.dotc(&v);
            v -= b * p;
        }
        let nv = v.norm();
        if nv > 1e-8 {
            basis.push(v / cr(nv));
        }
    }
    let mut u = CMat::zeros(dim, dim);
    for (j, b) in basis.iter().enumerate() {
        u.set_column(j, b);
    }
    u
}
