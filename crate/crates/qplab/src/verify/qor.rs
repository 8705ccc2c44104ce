//! Quantum OR with a single copy of the input, by alternating the
//! measurements {Π, I−Π} and {Δ, I−Δ}.

use rand::Rng;

use super::base::{place, QmaVerifier};
use super::report::{Verdict, VerdictReport};
use crate::qcore::linalg::{self, cr, CMat, CVec, ZERO};
use crate::qcore::{check_cap, haar_state, DensityMatrix, GateCircuit, GateKind, PureState};
use crate::{QError, Result};

/// Projector Λ on A ⊗ B (B on the low `m` qubits).
#[derive(Debug, Clone)]
pub struct QorInstance {
    pub lambda: CMat,
    pub n_a: usize,
    pub m: usize,
}

impl QorInstance {
    pub fn new(lambda: CMat, n_a: usize, m: usize) -> Result<Self> {
        let d = 1usize << (n_a + m);
        if lambda.nrows() != d || lambda.ncols() != d {
            return Err(QError::Dimension(format!("Λ is {}×{}, expected {d}", lambda.nrows(), lambda.ncols())));
        }
        let dev = (&lambda * &lambda - &lambda).camax().max(linalg::hermitian_deviation(&lambda));
        if dev > 1e-8 {
            return Err(QError::NotProjector(dev));
        }
        check_cap(n_a + 2 * m)?;
        Ok(Self { lambda, n_a, m })
    }

    pub fn n_b(&self) -> usize {
        1 << self.m
    }

    /// Λ_i = (I ⊗ X_i) Λ (I ⊗ X_i) with X_i|b⟩ = |b ⊕ i⟩.
    pub fn shifted(&self, i: usize) -> CMat {
        let nb = self.n_b();
        let d = self.lambda.nrows();
        let f = |x: usize| (x & !(nb - 1)) | ((x & (nb - 1)) ^ i);
        CMat::from_fn(d, d, |r, c| self.lambda[(f(r), f(c))])
    }

    /// max_σ Tr(Λ(ρ ⊗ σ)) = λ_max(Tr_A[(√ρ ⊗ I)Λ(√ρ ⊗ I)]).
    pub fn promise_value(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.n_qubits() != self.n_a {
            return Err(QError::Dimension("ρ does not match register A".into()));
        }
        let s = linalg::kron(&linalg::psd_sqrt(rho.matrix()), &linalg::identity(self.n_b()));
        let k = &s * &self.lambda * &s;
        let keep: Vec<usize> = (0..self.m).collect();
        let mb = linalg::partial_trace_mat(&k, self.n_a + self.m, &keep);
        Ok(*linalg::eigh(&mb).0.last().unwrap())
    }
}

/// Number of alternation rounds ⌈N/η⌉.
pub fn qor_rounds(m: usize, eta: f64) -> usize {
    ((1usize << m) as f64 / eta).ceil() as usize
}

/// Rejection branch of one pure input, in the frame where C is rotated by
/// the Fourier transform: Π' = Σ Λ_i ⊗ |i⟩⟨i|, Δ' = I ⊗ |u⟩⟨u| (u uniform).
/// Returns Pr[accept] after each round.
fn run_pure(shifted: &[CMat], v: &CVec, rounds: usize) -> Vec<f64> {
    let nb = shifted.len();
    let dab = shifted[0].nrows();
    let u = cr(1.0 / (nb as f64).sqrt());
    // Columns indexed by c; start |v⟩|0⟩_B ⊗ Q†|0⟩_C.
    let mut w = CMat::zeros(dab, nb);
    for c in 0..nb {
        for a in 0..v.len() {
            w[(a * nb, c)] = v[a] * u;
        }
    }
    let mut out = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        for (i, l) in shifted.iter().enumerate() {
            let col = w.column(i).into_owned();
            let proj = l * &col;
            w.set_column(i, &(col - proj));
        }
        for r in 0..dab {
            let mean = w.row(r).iter().fold(ZERO, |acc, x| acc + x) / cr(nb as f64);
            for c in 0..nb {
                w[(r, c)] = mean;
            }
        }
        out.push((1.0 - w.norm_squared()).clamp(0.0, 1.0));
    }
    out
}

/// Exact acceptance probability of the single-copy OR procedure.
pub fn qor_accept_exact(rho: &DensityMatrix, inst: &QorInstance, eta: f64) -> Result<(f64, Vec<f64>)> {
    if rho.n_qubits() != inst.n_a {
        return Err(QError::Dimension("ρ does not match register A".into()));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(QError::Invalid(format!("η = {eta}")));
    }
    let rounds = qor_rounds(inst.m, eta);
    let shifted: Vec<CMat> = (0..inst.n_b()).map(|i| inst.shifted(i)).collect();
    let mut trace = vec![0.0; rounds];
    for (p, psi) in rho.support_decomposition() {
        for (t, a) in run_pure(&shifted, psi.amplitudes(), rounds).into_iter().enumerate() {
            trace[t] += p * a;
        }
    }
    Ok((*trace.last().unwrap_or(&0.0), trace))
}

/// Run the OR procedure exactly. The verdict is accept iff the acceptance
/// probability is at least η²/7; stats carry both promise bounds.
pub fn qor_run(rho: &DensityMatrix, inst: &QorInstance, eta: f64, delta: f64) -> Result<VerdictReport> {
    let (p, trace) = qor_accept_exact(rho, inst, eta)?;
    let yes_bound = eta * eta / 7.0;
    let no_bound = 4.0 * inst.n_b() as f64 * delta;
    let mut r = VerdictReport::exact(Verdict::from_bool(p >= yes_bound), p)
        .with_stat("rounds", trace.len() as f64)
        .with_stat("yes_bound", yes_bound)
        .with_stat("no_bound", no_bound)
        .with_stat("promise_value", inst.promise_value(rho)?);
    if let Some(first) = trace.first() {
        r = r.with_stat("accept_after_round_1", *first);
    }
    Ok(r)
}

fn orthonormal_columns(vs: &[CVec]) -> CMat {
    let d = vs[0].len();
    let mut basis: Vec<CVec> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let p = b.dotc(&w);
                w -= b * p;
            }
        }
        let n = w.norm();
        if n > 1e-8 {
            basis.push(w / cr(n));
        }
    }
    CMat::from_fn(d, basis.len(), |r, c| basis[c][r])
}

fn random_vec<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVec {
    haar_state(n, rng).expect("within cap").into_amplitudes()
}

/// Remove the components of `v` inside the column span of `p_cols`.
fn project_out(v: &CVec, p_cols: &CMat) -> CVec {
    v - p_cols * (p_cols.adjoint() * v)
}

/// Input state with rank ≤ 2: mostly a pure ψ plus a small mixed part.
fn random_input<R: Rng + ?Sized>(n_a: usize, rng: &mut R) -> (DensityMatrix, CMat) {
    let psi = random_vec(n_a, rng);
    let rank2 = rng.random::<f64>() < 0.5;
    if !rank2 {
        let rho = DensityMatrix::new(n_a, linalg::projector(&psi)).expect("pure");
        let cols = CMat::from_fn(psi.len(), 1, |r, _| psi[r]);
        return (rho, cols);
    }
    let other = project_out(&random_vec(n_a, rng), &CMat::from_fn(psi.len(), 1, |r, _| psi[r]));
    let other = &other / cr(other.norm());
    let eps = 0.05 * rng.random::<f64>();
    let rho = DensityMatrix::new(n_a, linalg::projector(&psi) * cr(1.0 - eps) + linalg::projector(&other) * cr(eps))
        .expect("mixture");
    let cols = CMat::from_fn(psi.len(), 2, |r, c| if c == 0 { psi[r] } else { other[r] });
    (rho, cols)
}

/// Yes-instance: Λ contains w = √η′ ψ⊗|i*⟩ + √(1−η′) x, so that
/// max_σ Tr(Λ(ρ⊗σ)) ≥ η. Returns (ρ, instance).
pub fn gen_yes<R: Rng + ?Sized>(n_a: usize, m: usize, eta: f64, rng: &mut R) -> Result<(DensityMatrix, QorInstance)> {
    check_cap(n_a + 2 * m)?;
    let nb = 1usize << m;
    loop {
        let (rho, support) = random_input(n_a, rng);
        let psi = support.column(0).into_owned();
        let istar = rng.random_range(0..nb);
        let mut e = CVec::zeros(nb);
        e[istar] = linalg::ONE;
        let target = linalg::kron_vec(&psi, &e);
        let tcol = CMat::from_fn(target.len(), 1, |r, _| target[r]);
        let x = project_out(&random_vec(n_a + m, rng), &tcol);
        let x = &x / cr(x.norm());
        let eta_p = eta + (1.0 - eta) * rng.random::<f64>();
        let w = target * cr(eta_p.sqrt()) + x * cr((1.0 - eta_p).sqrt());
        let mut vs = vec![w];
        for _ in 0..rng.random_range(0..3usize) {
            vs.push(random_vec(n_a + m, rng));
        }
        let b = orthonormal_columns(&vs);
        let inst = QorInstance::new(linalg::hermitize(&(&b * b.adjoint())), n_a, m)?;
        if inst.promise_value(&rho)? >= eta {
            return Ok((rho, inst));
        }
    }
}

/// No-instance: Λ is spanned by vectors leaking at most δ′ onto
/// supp(ρ) ⊗ H_B, checked so that max_σ Tr(Λ(ρ⊗σ)) ≤ δ.
pub fn gen_no<R: Rng + ?Sized>(n_a: usize, m: usize, delta: f64, rng: &mut R) -> Result<(DensityMatrix, QorInstance)> {
    check_cap(n_a + 2 * m)?;
    let nb = 1usize << m;
    let id_b = CMat::identity(nb, nb);
    let mut scale = 1.0;
    loop {
        let (rho, support) = random_input(n_a, rng);
        let sup_ab = linalg::kron(&support, &id_b);
        let k = 1 + rng.random_range(0..nb.min(3));
        let dp = delta * scale * rng.random::<f64>();
        let mut vs = Vec::new();
        for _ in 0..k {
            let inside = sup_ab.clone() * random_vec_cols(sup_ab.ncols(), rng);
            let inside = &inside / cr(inside.norm());
            let outside = project_out(&random_vec(n_a + m, rng), &sup_ab);
            let outside = &outside / cr(outside.norm());
            vs.push(inside * cr(dp.sqrt()) + outside * cr((1.0 - dp).sqrt()));
        }
        let b = orthonormal_columns(&vs);
        let inst = QorInstance::new(linalg::hermitize(&(&b * b.adjoint())), n_a, m)?;
        if inst.promise_value(&rho)? <= delta {
            return Ok((rho, inst));
        }
        scale *= 0.5;
    }
}

fn random_vec_cols<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVec {
    use rand_distr::{Distribution, StandardNormal};
    let v = CVec::from_fn(d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        linalg::c(re, im)
    });
    let n = v.norm();
    v / cr(n)
}

/// Measure-and-rewind reduction of a verifier to an OR instance.
#[derive(Debug, Clone)]
pub struct QmaToQor {
    pub instance: QorInstance,
    /// Input on register A: ψ in every round's input slot, |0⟩ elsewhere.
    pub rho_a: DensityMatrix,
    pub rounds: usize,
}

/// Round i applies V_i on (copy i, shared witness, ancillas i), copies its
/// answer onto flag f_i with a CNOT, then undoes V_i. Λ = U†(|1…1⟩⟨1…1|_F)U,
/// with B the witness register.
pub fn qma_to_qor(verifier: &QmaVerifier, rounds: usize, psi: &PureState) -> Result<QmaToQor> {
    if rounds == 0 {
        return Err(QError::Invalid("at least one round".into()));
    }
    let m = verifier.witness.len();
    let anc = verifier.ancillas();
    let nin = verifier.input.len();
    let block = nin + anc.len();
    let n_ab = m + rounds * block + rounds;
    check_cap(n_ab + m)?;
    let mut u = GateCircuit::new(n_ab);
    let mut inputs = Vec::new();
    for i in 0..rounds {
        let base = m + i * block;
        let mut map = vec![0usize; verifier.n_qubits()];
        for (j, &q) in verifier.input.iter().enumerate() {
            map[q] = base + j;
            inputs.push(base + j - m);
        }
        for (j, &q) in verifier.witness.iter().enumerate() {
            map[q] = j;
        }
        for (j, &q) in anc.iter().enumerate() {
            map[q] = base + nin + j;
        }
        let vi = verifier.circuit.relabeled(n_ab, &map)?;
        let flag = m + rounds * block + i;
        u.gates.extend(vi.gates.iter().cloned());
        u = u.with(GateKind::Cnot, &[map[verifier.answer], flag]);
        u.gates.extend(vi.inverse().gates);
    }
    // Λ = G†G with G = P_F U restricted to flag string 1…1.
    let flag_mask = ((1usize << rounds) - 1) << (m + rounds * block);
    let d = 1usize << n_ab;
    let mut g = CMat::zeros(d, d);
    for j in 0..d {
        let mut e = CVec::zeros(d);
        e[j] = linalg::ONE;
        let mut col = u.apply_vec(&e);
        for x in 0..d {
            if x & flag_mask != flag_mask {
                col[x] = ZERO;
            }
        }
        g.set_column(j, &col);
    }
    let lambda = linalg::hermitize(&(g.adjoint() * g));
    let n_a = n_ab - m;
    let inst = QorInstance::new(lambda, n_a, m)?;
    let psi_all = psi.tensor_power(rounds);
    let a_state = place(n_a, &[(&inputs, psi_all.amplitudes())])?;
    let rho_a = PureState::new(n_a, a_state)?.density();
    Ok(QmaToQor { instance: inst, rho_a, rounds })
}
