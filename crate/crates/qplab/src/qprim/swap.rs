use super::dist::{MeasurementOutcomeDist, Outcome};
use super::UNREACHABLE;
use crate::qcore::linalg::{self, cr, CMat, CVec, ONE};
use crate::qcore::{check_cap, DensityMatrix, PureState};
use crate::{QError, Result};

/// Index map of a SWAP between qubit lists `xs` and `ys`, applied only when
/// qubit `ctrl` is set.
pub(crate) fn controlled_swap_index(x: usize, ctrl: usize, xs: &[usize], ys: &[usize]) -> usize {
    if (x >> ctrl) & 1 == 0 {
        return x;
    }
    let mut y = x;
    for (&a, &b) in xs.iter().zip(ys) {
        let ba = (x >> a) & 1;
        let bb = (x >> b) & 1;
        y &= !((1 << a) | (1 << b));
        y |= (bb << a) | (ba << b);
    }
    y
}

pub(crate) fn permute_by(v: &CVec, f: impl Fn(usize) -> usize) -> CVec {
    let mut out = CVec::zeros(v.len());
    for x in 0..v.len() {
        out[f(x)] = v[x];
    }
    out
}

fn hadamard_on(v: &CVec, q: usize, n: usize) -> CVec {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let m = CMat::from_row_slice(2, 2, &[cr(h), cr(h), cr(h), cr(-h)]);
    linalg::apply_op(v, &m, &[q], n)
}

/// H·cSWAP·H on a pure register; returns the two branches (control 0 and
/// control 1) as vectors on the full register.
fn swap_circuit_branches(v: &CVec, n: usize, ctrl: usize, xs: &[usize], ys: &[usize]) -> (CVec, CVec) {
    let v = hadamard_on(v, ctrl, n);
    let v = permute_by(&v, |x| controlled_swap_index(x, ctrl, xs, ys));
    let v = hadamard_on(&v, ctrl, n);
    let mut b0 = v.clone();
    let mut b1 = v;
    for x in 0..b0.len() {
        if (x >> ctrl) & 1 == 1 {
            b0[x] = linalg::ZERO;
        } else {
            b1[x] = linalg::ZERO;
        }
    }
    (b0, b1)
}

/// Pr[outcome 0] = ½ + ½Tr(ab).
pub fn swap_accept(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(QError::Dimension(format!("{} vs {}", a.dim(), b.dim())));
    }
    Ok((0.5 + 0.5 * (a.matrix() * b.matrix()).trace().re).clamp(0.0, 1.0))
}

/// Swap test on a (register B) and b (register C), simulated by the full
/// controlled-SWAP circuit. Post-states live on B ⊗ C.
pub fn swap_test(a: &DensityMatrix, b: &DensityMatrix) -> Result<MeasurementOutcomeDist> {
    if a.dim() != b.dim() {
        return Err(QError::Dimension(format!("{} vs {}", a.dim(), b.dim())));
    }
    let n = a.n_qubits();
    let total = 2 * n + 1;
    check_cap(total)?;
    // Layout: C = 0..n, B = n..2n, A = 2n.
    let ctrl = 2 * n;
    let xs: Vec<usize> = (n..2 * n).collect();
    let ys: Vec<usize> = (0..n).collect();
    let dim = 1usize << total;
    // Circuit unitary as the image of each basis vector.
    let mut w = CMat::zeros(dim, dim);
    for x in 0..dim {
        let mut e = CVec::zeros(dim);
        e[x] = ONE;
        let (b0, b1) = swap_circuit_branches(&e, total, ctrl, &xs, &ys);
        w.set_column(x, &(b0 + b1));
    }
    let zero = DensityMatrix::from_raw(1, CMat::from_row_slice(2, 2, &[ONE, linalg::ZERO, linalg::ZERO, linalg::ZERO]));
    let rho = zero.tensor(a).tensor(b);
    let out = &w * rho.matrix() * w.adjoint();
    let bc: Vec<usize> = (0..2 * n).collect();
    let mut outcomes = Vec::new();
    for bit in 0..2usize {
        let mut p = CMat::zeros(dim, dim);
        for x in 0..dim {
            if (x >> ctrl) & 1 == bit {
                p[(x, x)] = ONE;
            }
        }
        let proj = &p * &out * &p;
        let prob = proj.trace().re;
        let post = (prob > UNREACHABLE).then(|| {
            DensityMatrix::from_raw(2 * n, linalg::partial_trace_mat(&proj, total, &bc) / cr(prob))
        });
        outcomes.push(Outcome { label: bit.to_string(), prob, post });
    }
    MeasurementOutcomeDist::new(outcomes)
}

/// Partial swap test: SWAP the listed `b_qubits` of φ with ψ under a
/// Hadamard-conjugated control. Outcome "0" is accept. Post-states live on
/// the register φ ⊗ ψ (ψ on the low qubits).
pub fn partial_swap_test_on(phi: &PureState, b_qubits: &[usize], psi: &PureState) -> Result<MeasurementOutcomeDist> {
    linalg::check_qubits(b_qubits, phi.n_qubits())?;
    if b_qubits.len() != psi.n_qubits() {
        return Err(QError::Dimension(format!(
            "swap register has {} qubits, ψ has {}",
            b_qubits.len(),
            psi.n_qubits()
        )));
    }
    let nd = psi.n_qubits();
    let nreg = phi.n_qubits() + nd;
    let total = nreg + 1;
    check_cap(total)?;
    let ctrl = nreg;
    let xs: Vec<usize> = b_qubits.iter().map(|&q| q + nd).collect();
    let ys: Vec<usize> = (0..nd).collect();
    let v = linalg::kron_vec(&CVec::from_vec(vec![ONE, linalg::ZERO]), &linalg::kron_vec(phi.amplitudes(), psi.amplitudes()));
    let (b0, b1) = swap_circuit_branches(&v, total, ctrl, &xs, &ys);
    let mut outcomes = Vec::new();
    for (bit, br) in [b0, b1].into_iter().enumerate() {
        let prob = br.norm_squared();
        let post = (prob > UNREACHABLE).then(|| {
            let keep: Vec<usize> = (0..nreg).collect();
            DensityMatrix::from_raw(nreg, linalg::reduced_from_vec(&br, total, &keep) / cr(prob))
        });
        outcomes.push(Outcome { label: bit.to_string(), prob, post });
    }
    MeasurementOutcomeDist::new(outcomes)
}

/// Partial swap test with B the top `ψ.n_qubits()` qubits of φ = φ_{BC}.
pub fn partial_swap_test(phi: &PureState, psi: &PureState) -> Result<MeasurementOutcomeDist> {
    let n = phi.n_qubits();
    let k = psi.n_qubits();
    if k > n {
        return Err(QError::Dimension(format!("ψ has {k} qubits, φ only {n}")));
    }
    let b: Vec<usize> = (n - k..n).collect();
    partial_swap_test_on(phi, &b, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{fidelity, haar_state, random_density, rng_for};

    #[test]
    fn swap_test_cases() {
        let z = PureState::zero(1).density();
        let o = PureState::basis(1, 1).density();
        assert!((swap_test(&z, &z).unwrap().prob("0") - 1.0).abs() < 1e-12);
        assert!((swap_test(&z, &o).unwrap().prob("0") - 0.5).abs() < 1e-12);
        let mut rng = rng_for(4, 0);
        for n in 1..=2 {
            let phi = haar_state(n, &mut rng).unwrap().density();
            let rho = random_density(n, 2, &mut rng).unwrap();
            let d = swap_test(&phi, &rho).unwrap();
            let f = fidelity(&phi, &rho).unwrap();
            assert!((d.prob("0") - (0.5 + 0.5 * f * f)).abs() < 1e-8);
            assert!((d.prob("0") - swap_accept(&phi, &rho).unwrap()).abs() < 1e-10);
            // Accepting post-state is supported on the symmetric subspace.
            let post = d.get("0").unwrap().post.as_ref().unwrap();
            let mut sw = linalg::identity(1 << (2 * n));
            for j in 0..n {
                sw = linalg::embed(&crate::qcore::GateKind::Swap.matrix(), &[j, j + n], 2 * n) * sw;
            }
            assert!((post.expectation(&sw) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn partial_swap_cases() {
        let psi = PureState::plus();
        let g = PureState::basis(1, 1);
        // φ = |ψ⟩_B |G⟩_C with B the high qubit.
        let phi = psi.tensor(&g);
        assert!((partial_swap_test(&phi, &psi).unwrap().prob("0") - 1.0).abs() < 1e-12);
        let minus = PureState::plus().apply(&crate::qcore::GateKind::Z.matrix(), &[0]).unwrap();
        let phi = minus.tensor(&g);
        assert!((partial_swap_test(&phi, &psi).unwrap().prob("0") - 0.5).abs() < 1e-12);
        let mut rng = rng_for(8, 0);
        for _ in 0..10 {
            let phi = haar_state(3, &mut rng).unwrap();
            let psi = haar_state(1, &mut rng).unwrap();
            let d = partial_swap_test(&phi, &psi).unwrap();
            let red = phi.reduced(&[2]).unwrap();
            let alpha2 = red.expectation(&psi.density().matrix().clone());
            assert!((d.prob("0") - (alpha2 + 0.5 * (1.0 - alpha2))).abs() < 1e-10);
        }
    }
}
