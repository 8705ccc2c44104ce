//! Energy estimation for Hamiltonians coupled to a pure unknown state.
//!
//! Each round draws x ∈ S ∪ L uniformly. For x ∈ S the witness copy is
//! measured in the eigenbasis of H_s and the eigenvalue is reported. For
//! x ∈ L the copy is measured in the eigenbasis of H_ℓ (value Y = λ_i), then
//! a partial swap test against ψ on I sets Z = λ_i on accept; the round
//! reports Y − 2Z.

use rand::Rng;

use super::report::{Verdict, VerdictReport};
use crate::hamlab::{HamiltonianInstance, LocalTerm};
use crate::qcore::linalg::{CMat, ZERO};
use crate::qcore::{rng_for, DensityMatrix, PureState};
use crate::qprim::{hoeffding_half_width, sample_index};
use crate::{QError, Result};

pub const DEFAULT_ROUNDS: usize = 400;

/// One witness copy: either a pure vector or a density matrix.
#[derive(Debug, Clone, Copy)]
pub enum Witness<'a> {
    Pure(&'a PureState),
    Mixed(&'a DensityMatrix),
}

impl Witness<'_> {
    pub fn n_qubits(&self) -> usize {
        match self {
            Witness::Pure(s) => s.n_qubits(),
            Witness::Mixed(r) => r.n_qubits(),
        }
    }

    fn reduced(&self, keep: &[usize]) -> Result<CMat> {
        Ok(match self {
            Witness::Pure(s) => s.reduced(keep)?.matrix().clone(),
            Witness::Mixed(r) => r.partial_trace(keep)?.matrix().clone(),
        })
    }
}

/// (probability, value) pairs of a single round with x fixed.
pub type RoundOutcomes = Vec<(f64, f64)>;

/// Case 1: eigenbasis measurement of H_s on the reduced state.
pub fn plain_outcomes(term: &LocalTerm, rho_a: &CMat) -> RoundOutcomes {
    let (vals, vecs) = term.eigen();
    vals.iter()
        .enumerate()
        .map(|(i, &l)| {
            let v = vecs.column(i);
            let p = (v.adjoint() * rho_a * v)[(0, 0)].re.max(0.0);
            (p, term.weight * l)
        })
        .collect()
}

/// Case 2 on ρ_{IA} with I on the low `n_in` qubits. Outcome i splits into
/// swap-accept (value −λ_i) and swap-reject (value +λ_i).
pub fn coupled_outcomes(term: &LocalTerm, psi: &PureState, rho_ia: &CMat) -> RoundOutcomes {
    let di = psi.dim();
    let (vals, vecs) = term.eigen();
    let da = vecs.nrows();
    let mut out = Vec::with_capacity(2 * vals.len());
    for (i, &l) in vals.iter().enumerate() {
        // K = ⟨v_i|_A ρ_{IA} |v_i⟩_A, unnormalized state on I.
        let mut k = CMat::zeros(di, di);
        for a in 0..da {
            for b in 0..da {
                let c = vecs[(a, i)].conj() * vecs[(b, i)];
                if c == ZERO {
                    continue;
                }
                for r in 0..di {
                    for s in 0..di {
                        k[(r, s)] += c * rho_ia[(a * di + r, b * di + s)];
                    }
                }
            }
        }
        let p = k.trace().re.max(0.0);
        let amp = psi.amplitudes();
        let overlap = (amp.adjoint() * &k * amp)[(0, 0)].re.clamp(0.0, p);
        let lam = term.weight * l;
        out.push((0.5 * p + 0.5 * overlap, -lam));
        out.push((0.5 * p - 0.5 * overlap, lam));
    }
    out
}

fn check(inst: &HamiltonianInstance, psi: &PureState, w: Witness) -> Result<()> {
    if psi.n_qubits() != inst.input_len() {
        return Err(QError::Dimension(format!("ψ has {} qubits, input register {}", psi.n_qubits(), inst.input_len())));
    }
    if w.n_qubits() != inst.n_total_qubits {
        return Err(QError::Dimension(format!("witness has {} qubits, instance {}", w.n_qubits(), inst.n_total_qubits)));
    }
    Ok(())
}

/// |S| + |L|.
pub fn pure_budget(inst: &HamiltonianInstance) -> usize {
    inst.plain_terms.len() + inst.coupled_terms.len()
}

/// Outcome table indexed by x, plain terms first.
pub fn round_table(inst: &HamiltonianInstance, psi: &PureState, w: Witness) -> Result<Vec<RoundOutcomes>> {
    check(inst, psi, w)?;
    let mut table = Vec::with_capacity(pure_budget(inst));
    for t in &inst.plain_terms {
        table.push(plain_outcomes(t, &w.reduced(&t.qubits)?));
    }
    for t in &inst.coupled_terms {
        let mut keep = inst.input_qubits();
        keep.extend_from_slice(&t.qubits);
        table.push(coupled_outcomes(t, psi, &w.reduced(&keep)?));
    }
    Ok(table)
}

/// Per-round expectation E[W] with x integrated out.
pub fn expected_round_value(table: &[RoundOutcomes]) -> f64 {
    if table.is_empty() {
        return 0.0;
    }
    let total: f64 = table.iter().map(|o| o.iter().map(|(p, v)| p * v).sum::<f64>()).sum();
    total / table.len() as f64
}

fn decide(inst: &HamiltonianInstance, estimate: f64) -> Verdict {
    Verdict::from_bool(estimate <= inst.a + 1.0 / inst.p as f64)
}

/// Verdict from the exact expectation (|S|+|L|)·E[W].
pub fn lhwp_exact(inst: &HamiltonianInstance, psi: &PureState, w: Witness) -> Result<VerdictReport> {
    let table = round_table(inst, psi, w)?;
    let e = expected_round_value(&table);
    let est = pure_budget(inst) as f64 * e;
    Ok(VerdictReport::estimate(decide(inst, est), est, 0, 0.0, None).with_stat("round_expectation", e))
}

/// Sampled run over `rounds` fresh witness copies.
pub fn lhwp_verify(inst: &HamiltonianInstance, psi: &PureState, w: Witness, rounds: usize, seed: u64) -> Result<VerdictReport> {
    if rounds == 0 {
        return Err(QError::Invalid("rounds must be positive".into()));
    }
    let table = round_table(inst, psi, w)?;
    let mut rng = rng_for(seed, 0);
    let mut sum = 0.0;
    for _ in 0..rounds {
        let x = rng.random_range(0..table.len());
        let probs: Vec<f64> = table[x].iter().map(|o| o.0).collect();
        sum += table[x][sample_index(&probs, &mut rng)].1;
    }
    let mean = sum / rounds as f64;
    let budget = pure_budget(inst) as f64;
    let est = budget * mean;
    let range = table.iter().flatten().map(|o| o.1.abs()).fold(0.0, f64::max) * 2.0;
    let hw = budget * range * hoeffding_half_width(rounds, super::report::REPORT_DELTA);
    Ok(VerdictReport::estimate(decide(inst, est), est, rounds, hw, Some(seed))
        .with_stat("round_expectation", expected_round_value(&table)))
}

/// Accept frequency over `trials` independent sampled runs.
pub fn lhwp_accept_rate(inst: &HamiltonianInstance, psi: &PureState, w: Witness, rounds: usize, trials: usize, seed: u64) -> Result<f64> {
    let mut hits = 0;
    for t in 0..trials {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(t as u64);
        if lhwp_verify(inst, psi, w, rounds, s)?.verdict.is_accept() {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials.max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamlab::Variant;
    use crate::qcore::linalg;
    use crate::qcore::{haar_state, rng_for};
    use crate::qprim::partial_swap_test_on;

    fn single(plain: Vec<LocalTerm>, coupled: Vec<LocalTerm>, n: usize, input: (usize, usize)) -> HamiltonianInstance {
        HamiltonianInstance {
            n_total_qubits: n,
            plain_terms: plain,
            coupled_terms: coupled,
            input_register: input,
            p: 10,
            a: 0.1,
            b: 0.9,
            variant: Variant::Pure,
        }
    }

    fn proj1() -> CMat {
        CMat::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, linalg::ONE])
    }

    #[test]
    fn plain_zero_energy_accepts() {
        let t = LocalTerm::new(vec![0], proj1()).unwrap();
        let inst = single(vec![t], vec![], 2, (1, 2));
        let psi = PureState::zero(1);
        let w = PureState::zero(2);
        let r = lhwp_exact(&inst, &psi, Witness::Pure(&w)).unwrap();
        assert!(r.expectation.unwrap().abs() < 1e-14);
        assert!(r.verdict.is_accept());
        let s = lhwp_verify(&inst, &psi, Witness::Pure(&w), 50, 1).unwrap();
        assert_eq!(s.expectation, Some(0.0));
    }

    #[test]
    fn orthogonal_input_gives_zero() {
        let t = LocalTerm::new(vec![1], proj1()).unwrap();
        let inst = single(vec![], vec![t], 2, (0, 1));
        let psi = PureState::zero(1);
        // I holds |1⟩ ⊥ ψ; A holds |1⟩.
        let w = PureState::basis(2, 0b11);
        let table = round_table(&inst, &psi, Witness::Pure(&w)).unwrap();
        assert!(expected_round_value(&table).abs() < 1e-14);
    }

    #[test]
    fn unbiased_on_random_instances() {
        let mut rng = rng_for(31, 0);
        for _ in 0..10 {
            let h = crate::qcore::random_density(2, 4, &mut rng).unwrap();
            let ts = LocalTerm::new(vec![1, 2], h.matrix().clone()).unwrap();
            let g = crate::qcore::random_density(1, 2, &mut rng).unwrap();
            let tl = LocalTerm::weighted(vec![3], g.matrix().clone(), 0.7).unwrap();
            let inst = single(vec![ts], vec![tl], 4, (0, 1));
            let psi = haar_state(1, &mut rng).unwrap();
            let eta = haar_state(4, &mut rng).unwrap();
            let table = round_table(&inst, &psi, Witness::Pure(&eta)).unwrap();
            let e = expected_round_value(&table);
            let target = inst.energy(&psi, &eta).unwrap() / 2.0;
            assert!((e - target).abs() < 1e-10);
            let rho = random_mixed(4, &mut rng);
            let e = expected_round_value(&round_table(&inst, &psi, Witness::Mixed(&rho)).unwrap());
            let h = inst.assemble(&psi).unwrap();
            assert!((e - rho.expectation(h.matrix()) / 2.0).abs() < 1e-10);
        }
    }

    fn random_mixed(n: usize, rng: &mut crate::qcore::QRng) -> DensityMatrix {
        crate::qcore::random_density(n, 3, rng).unwrap()
    }

    #[test]
    fn swap_probability_matches_circuit() {
        // Measure A = qubit 1 in the eigenbasis, then run the partial swap
        // test circuit on the post-measurement state.
        let mut rng = rng_for(32, 0);
        let g = crate::qcore::random_density(1, 2, &mut rng).unwrap();
        let t = LocalTerm::new(vec![1], g.matrix().clone()).unwrap();
        let psi = haar_state(1, &mut rng).unwrap();
        let eta = haar_state(3, &mut rng).unwrap();
        let rho = eta.reduced(&[0, 1]).unwrap();
        let outs = coupled_outcomes(&t, &psi, rho.matrix());
        let (_, vecs) = t.eigen();
        for i in 0..2 {
            let proj = linalg::projector(&vecs.column(i).into_owned());
            let post = eta.apply(&proj, &[1]).unwrap();
            let pi = post.amplitudes().norm_squared();
            let post = PureState::normalized(3, post.into_amplitudes()).unwrap();
            let acc = partial_swap_test_on(&post, &[0], &psi).unwrap().prob("0");
            assert!((outs[2 * i].0 - pi * acc).abs() < 1e-10);
            assert!((outs[2 * i + 1].0 - pi * (1.0 - acc)).abs() < 1e-10);
        }
    }
}
