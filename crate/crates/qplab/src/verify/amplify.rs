//! Parallel amplification: s independent runs on s witness registers,
//! accepting when at least ⌈s·½(2a − 1/p)⌉ runs accept.

use rand::Rng;

use super::base::QmaVerifier;
use super::report::{Verdict, VerdictReport};
use crate::qcore::linalg::{self, cr, CMat};
use crate::qcore::{check_cap, rng_for, DensityMatrix, GateCircuit, GateKind, PureState};
use crate::{QError, Result};

/// Pr[Σ Bernoulli(q_i) ≥ thr].
pub fn poisson_binomial_tail(qs: &[f64], thr: usize) -> f64 {
    let mut dist = vec![1.0];
    for &q in qs {
        let mut next = vec![0.0; dist.len() + 1];
        for (k, &p) in dist.iter().enumerate() {
            next[k] += p * (1.0 - q);
            next[k + 1] += p * q;
        }
        dist = next;
    }
    dist.iter().skip(thr).sum::<f64>().clamp(0.0, 1.0)
}

/// Pr[Bin(s, q) ≥ thr].
pub fn binomial_tail(s: usize, q: f64, thr: usize) -> f64 {
    poisson_binomial_tail(&vec![q; s], thr)
}

/// Verifier with a k-qubit classical-basis witness: on witness w the answer
/// qubit is rotated to accept with probability `probs[w]`.
pub fn bernoulli_verifier(probs: &[f64]) -> Result<QmaVerifier> {
    let k = probs.len().trailing_zeros() as usize;
    if probs.is_empty() || 1 << k != probs.len() || probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(QError::Invalid("need 2^k probabilities in [0, 1]".into()));
    }
    let dw = probs.len();
    let mut u = CMat::zeros(2 * dw, 2 * dw);
    for (w, &p) in probs.iter().enumerate() {
        let (c, s) = ((1.0 - p).sqrt(), p.sqrt());
        // index = w + dw·ans
        u[(w, w)] = cr(c);
        u[(w + dw, w)] = cr(s);
        u[(w, w + dw)] = cr(-s);
        u[(w + dw, w + dw)] = cr(c);
    }
    let qs: Vec<usize> = (0..=k).collect();
    let circuit = GateCircuit::new(k + 1).with(GateKind::Unitary(u), &qs);
    QmaVerifier::new(circuit, vec![], (0..k).collect(), k)
}

#[derive(Debug, Clone)]
pub struct AmplifiedVerifier {
    /// Base acceptance operator on one witness register.
    pub m: CMat,
    pub witness_qubits: usize,
    pub a: f64,
    pub p: f64,
    pub s: usize,
}

/// Compose `s` parallel runs of `verifier` on `input` with base thresholds
/// (a, a − 1/p).
pub fn amplify_parallel(verifier: &QmaVerifier, input: &PureState, a: f64, p: f64, s: usize) -> Result<AmplifiedVerifier> {
    if s == 0 || !(p > 0.0) || !(0.0..=1.0).contains(&a) {
        return Err(QError::Invalid(format!("amplification parameters a = {a}, p = {p}, s = {s}")));
    }
    Ok(AmplifiedVerifier {
        m: verifier.accept_operator(input)?,
        witness_qubits: verifier.witness.len(),
        a,
        p,
        s,
    })
}

impl AmplifiedVerifier {
    /// Smallest number of accepting runs that accepts overall.
    pub fn threshold(&self) -> usize {
        let t = self.s as f64 * 0.5 * (2.0 * self.a - 1.0 / self.p);
        (t - 1e-12).ceil().max(0.0) as usize
    }

    fn single(&self, sigma: &DensityMatrix) -> Result<f64> {
        if sigma.n_qubits() != self.witness_qubits {
            return Err(QError::Dimension("witness register size".into()));
        }
        Ok(sigma.expectation(&self.m).clamp(0.0, 1.0))
    }

    /// Exact acceptance on σ_1 ⊗ … ⊗ σ_s.
    pub fn accept_product(&self, witnesses: &[DensityMatrix]) -> Result<f64> {
        if witnesses.len() != self.s {
            return Err(QError::Dimension(format!("{} witnesses for s = {}", witnesses.len(), self.s)));
        }
        let qs: Vec<f64> = witnesses.iter().map(|w| self.single(w)).collect::<Result<_>>()?;
        Ok(poisson_binomial_tail(&qs, self.threshold()))
    }

    /// Exact acceptance on an arbitrary state of the s witness registers
    /// (run i on qubits [i·w, (i+1)·w)).
    pub fn accept_entangled(&self, rho: &DensityMatrix) -> Result<f64> {
        let n = self.s * self.witness_qubits;
        check_cap(n)?;
        if rho.n_qubits() != n {
            return Err(QError::Dimension(format!("state on {} qubits, expected {n}", rho.n_qubits())));
        }
        let reject = linalg::identity(self.m.nrows()) - &self.m;
        let thr = self.threshold();
        let mut total = 0.0;
        for x in 0usize..(1 << self.s) {
            if (x.count_ones() as usize) < thr {
                continue;
            }
            // run 0 on the lowest qubits: build the kron from the top run down.
            let mut op = CMat::from_element(1, 1, linalg::ONE);
            for i in (0..self.s).rev() {
                let f = if (x >> i) & 1 == 1 { &self.m } else { &reject };
                op = linalg::kron(&op, f);
            }
            total += rho.expectation(&op);
        }
        Ok(total.clamp(0.0, 1.0))
    }

    /// Pr[Bin(s, ‖M‖) ≥ thr]: the i.i.d. chain dominating any witness.
    pub fn iid_bound(&self) -> f64 {
        let (vals, _) = linalg::eigh(&self.m);
        let top = vals.last().copied().unwrap_or(0.0).clamp(0.0, 1.0);
        binomial_tail(self.s, top, self.threshold())
    }

    /// Monte-Carlo acceptance frequency on a product witness.
    pub fn sample_product(&self, witnesses: &[DensityMatrix], trials: usize, seed: u64) -> Result<VerdictReport> {
        if witnesses.len() != self.s {
            return Err(QError::Dimension(format!("{} witnesses for s = {}", witnesses.len(), self.s)));
        }
        let qs: Vec<f64> = witnesses.iter().map(|w| self.single(w)).collect::<Result<_>>()?;
        let thr = self.threshold();
        let mut rng = rng_for(seed, 0);
        let mut hits = 0;
        for _ in 0..trials {
            let k = qs.iter().filter(|&&q| rng.random::<f64>() < q).count();
            if k >= thr {
                hits += 1;
            }
        }
        let exact = poisson_binomial_tail(&qs, thr);
        let mut r = VerdictReport::sampled(Verdict::from_bool(2 * hits >= trials), hits, trials, seed);
        r.p_exact = Some(exact);
        Ok(r.with_stat("threshold", thr as f64))
    }
}
