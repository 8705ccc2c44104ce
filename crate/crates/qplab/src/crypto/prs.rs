//! Toy keyed state generators and the L_PRS oracle distinguisher.
//!
//! L_PRS asks whether a state is some φ_k (yes) or has |⟨ψ|φ_k⟩|² ≤ 0.7
//! for every key (no). The oracle here decides membership by exhaustive key
//! search; in the band between the two it runs swap tests against the
//! best-matching key.

use std::f64::consts::TAU;

use rand::Rng;
use serde::Serialize;

use crate::qcore::{check_cap, haar_state, rng_for, GateCircuit, GateKind, PureState};
use crate::{QError, Result};

/// Overlap threshold of the L_PRS no-set.
pub const NO_OVERLAP: f64 = 0.7;
/// Overlaps at least this close to 1 count as images.
pub const IMAGE_TOL: f64 = 1e-9;
/// Largest key length whose key space is enumerated.
pub const MAX_KEY_BITS: usize = 8;

/// Keyed generator k ↦ φ_k = C_k|0…0⟩.
#[derive(Debug, Clone)]
pub struct PrsScheme {
    pub key_bits: usize,
    pub m: usize,
    pub circuits: Vec<GateCircuit>,
    states: Vec<PureState>,
}

impl PrsScheme {
    pub fn from_circuits(key_bits: usize, circuits: Vec<GateCircuit>) -> Result<Self> {
        if key_bits == 0 || key_bits > MAX_KEY_BITS {
            return Err(QError::Invalid(format!("key length {key_bits} outside 1..={MAX_KEY_BITS}")));
        }
        if circuits.len() != 1 << key_bits {
            return Err(QError::Invalid(format!("{} circuits for {key_bits}-bit keys", circuits.len())));
        }
        let m = circuits[0].n_qubits;
        if circuits.iter().any(|c| c.n_qubits != m) {
            return Err(QError::Dimension("circuits act on different registers".into()));
        }
        check_cap(m)?;
        let need = usize::BITS - (key_bits - 1).leading_zeros();
        if key_bits > 1 && m < need as usize {
            return Err(QError::Invalid(format!("m = {m} below ⌈log₂ {key_bits}⌉")));
        }
        let z = PureState::zero(m);
        let states = circuits.iter().map(|c| c.apply(&z)).collect::<Result<Vec<_>>>()?;
        Ok(Self { key_bits, m, circuits, states })
    }

    /// Layers of R_y, R_z on every qubit followed by a CNOT ladder, with
    /// angles drawn from stream k+1 of `seed`.
    pub fn keyed(key_bits: usize, m: usize, layers: usize, seed: u64) -> Result<Self> {
        if key_bits == 0 || key_bits > MAX_KEY_BITS {
            return Err(QError::Invalid(format!("key length {key_bits} outside 1..={MAX_KEY_BITS}")));
        }
        let circuits = (0..1u64 << key_bits)
            .map(|k| {
                let mut rng = rng_for(seed, k + 1);
                let mut c = GateCircuit::new(m);
                for _ in 0..layers {
                    for q in 0..m {
                        c = c.with(GateKind::Ry(rng.random::<f64>() * TAU), &[q]);
                        c = c.with(GateKind::Rz(rng.random::<f64>() * TAU), &[q]);
                    }
                    for q in 0..m.saturating_sub(1) {
                        c = c.with(GateKind::Cnot, &[q, q + 1]);
                    }
                }
                c
            })
            .collect();
        Self::from_circuits(key_bits, circuits)
    }

    pub fn n_keys(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, key: usize) -> &PureState {
        &self.states[key]
    }

    /// |⟨ψ|φ_k⟩|² for every key.
    pub fn overlaps(&self, psi: &PureState) -> Result<Vec<f64>> {
        self.states.iter().map(|s| s.overlap_sq(psi)).collect()
    }

    /// Swap-test acceptance with witness `key`: ½ + ½|⟨ψ|φ_k⟩|².
    pub fn swap_accept(&self, psi: &PureState, key: usize) -> Result<f64> {
        Ok(0.5 + 0.5 * self.states[key].overlap_sq(psi)?)
    }

    /// Largest overlap between images of distinct keys.
    pub fn max_cross_overlap(&self) -> Result<f64> {
        let mut best: f64 = 0.0;
        for i in 0..self.n_keys() {
            for j in i + 1..self.n_keys() {
                best = best.max(self.states[i].overlap_sq(&self.states[j])?);
            }
        }
        Ok(best)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Yes,
    No,
    DontCare,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrsGuess {
    pub guess: bool,
    pub membership: Membership,
    pub best_key: usize,
    pub max_overlap: f64,
    /// Exact Pr[guess = 1] given the challenge.
    pub p_yes: f64,
}

/// One oracle query on the challenge; `copies` swap tests decide the band.
pub fn prs_oracle_break(scheme: &PrsScheme, challenge: &PureState, copies: usize, seed: u64) -> Result<PrsGuess> {
    if challenge.n_qubits() != scheme.m {
        return Err(QError::Dimension(format!("challenge on {} qubits, scheme outputs {}", challenge.n_qubits(), scheme.m)));
    }
    let ov = scheme.overlaps(challenge)?;
    let (best_key, max_overlap) = ov.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let (membership, p_yes) = if max_overlap >= 1.0 - IMAGE_TOL {
        (Membership::Yes, 1.0)
    } else if max_overlap <= NO_OVERLAP {
        (Membership::No, 0.0)
    } else {
        (Membership::DontCare, (0.5 + 0.5 * max_overlap).powi(copies.max(1) as i32))
    };
    let guess = match membership {
        Membership::Yes => true,
        Membership::No => false,
        Membership::DontCare => {
            let mut rng = rng_for(seed, 0);
            (0..copies.max(1)).all(|_| rng.random::<f64>() < 0.5 + 0.5 * max_overlap)
        }
    };
    Ok(PrsGuess { guess, membership, best_key, max_overlap, p_yes })
}

/// Challenge case: an image of a random key or a Haar sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrsCase {
    Prs,
    Haar,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrsTrial {
    pub seed: u64,
    pub case: PrsCase,
    pub oracle_verdict: bool,
    /// 2·Pr[correct guess | challenge] − 1.
    pub advantage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrsExperiment {
    pub trials: Vec<PrsTrial>,
    /// Pr[1 | PRS] − Pr[1 | Haar] from the sampled verdicts.
    pub advantage: f64,
    /// Same difference with exact per-trial probabilities.
    pub exact_advantage: f64,
}

/// Seed of trial i.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    rng_for(seed, 1 << 32 | i as u64).random::<u64>()
}

/// Single-shot distinguishing experiment with a fair coin per trial.
pub fn prs_experiment(scheme: &PrsScheme, trials: usize, copies: usize, seed: u64) -> Result<PrsExperiment> {
    let rows = (0..trials).map(|i| prs_trial(scheme, copies, trial_seed(seed, i))).collect::<Result<Vec<_>>>()?;
    Ok(summarize(rows))
}

pub fn prs_trial(scheme: &PrsScheme, copies: usize, seed: u64) -> Result<PrsTrial> {
    let mut rng = rng_for(seed, 1);
    let case = if rng.random::<bool>() { PrsCase::Prs } else { PrsCase::Haar };
    let challenge = match case {
        PrsCase::Prs => scheme.state(rng.random_range(0..scheme.n_keys())).clone(),
        PrsCase::Haar => haar_state(scheme.m, &mut rng)?,
    };
    let g = prs_oracle_break(scheme, &challenge, copies, seed)?;
    let correct = if case == PrsCase::Prs { g.p_yes } else { 1.0 - g.p_yes };
    Ok(PrsTrial { seed, case, oracle_verdict: g.guess, advantage: 2.0 * correct - 1.0 })
}

/// Aggregates per-trial rows; either case may be missing.
pub fn summarize(trials: Vec<PrsTrial>) -> PrsExperiment {
    let rate = |case: PrsCase, f: &dyn Fn(&PrsTrial) -> f64| {
        let sel: Vec<f64> = trials.iter().filter(|t| t.case == case).map(f).collect();
        if sel.is_empty() {
            0.0
        } else {
            sel.iter().sum::<f64>() / sel.len() as f64
        }
    };
    let verdict = |t: &PrsTrial| if t.oracle_verdict { 1.0 } else { 0.0 };
    // Pr[1 | case] from the exact advantage column.
    let exact_yes = |t: &PrsTrial| match t.case {
        PrsCase::Prs => 0.5 + 0.5 * t.advantage,
        PrsCase::Haar => 0.5 - 0.5 * t.advantage,
    };
    let advantage = rate(PrsCase::Prs, &verdict) - rate(PrsCase::Haar, &verdict);
    let exact_advantage = rate(PrsCase::Prs, &exact_yes) - rate(PrsCase::Haar, &exact_yes);
    PrsExperiment { trials, advantage, exact_advantage }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> PrsScheme {
        PrsScheme::keyed(4, 4, 4, 2024).unwrap()
    }

    #[test]
    fn images_are_yes_instances() {
        let s = toy();
        for k in 0..s.n_keys() {
            let g = prs_oracle_break(&s, s.state(k), 1, 0).unwrap();
            assert!(g.guess && g.membership == Membership::Yes);
            assert_eq!(g.best_key, k);
            assert!((s.swap_accept(s.state(k), k).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn wrong_key_swap_test_below_085() {
        let s = toy();
        assert!(s.max_cross_overlap().unwrap() <= NO_OVERLAP);
        for k in 0..s.n_keys() {
            for w in (0..s.n_keys()).filter(|&w| w != k) {
                assert!(s.swap_accept(s.state(k), w).unwrap() <= 0.85);
            }
        }
    }

    #[test]
    fn output_register_constraints() {
        assert!(PrsScheme::keyed(4, 1, 1, 0).is_err());
        assert!(PrsScheme::keyed(4, 2, 1, 0).is_ok());
        assert!(PrsScheme::keyed(9, 4, 1, 0).is_err());
        assert!(PrsScheme::keyed(2, 13, 1, 0).is_err());
    }

    #[test]
    fn dont_care_band_uses_swap_test() {
        let s = PrsScheme::from_circuits(1, vec![GateCircuit::new(1), GateCircuit::new(1).with(GateKind::X, &[0])]).unwrap();
        // cos²(θ/2) = 0.8 with the image |0⟩.
        let theta = 2.0 * 0.8f64.sqrt().acos();
        let psi = GateCircuit::new(1).with(GateKind::Ry(theta), &[0]).apply(&PureState::zero(1)).unwrap();
        let g = prs_oracle_break(&s, &psi, 3, 5).unwrap();
        assert_eq!(g.membership, Membership::DontCare);
        assert!((g.p_yes - 0.9f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn thousand_trials_break_the_toy_scheme() {
        let e = prs_experiment(&toy(), 1000, 1, 77).unwrap();
        assert_eq!(e.trials.len(), 1000);
        assert!(e.advantage >= 0.5, "{}", e.advantage);
        assert!(e.exact_advantage >= 0.5);
        let again = prs_experiment(&toy(), 1000, 1, 77).unwrap();
        assert_eq!(e, again);
    }
}
