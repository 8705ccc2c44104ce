//! Key recovery for a toy one-way state generator. Ver(k', φ) runs swap
//! tests between φ and StateGen(k'); the attacker finds k' bit by bit with
//! the prefix oracle over the table of Ver acceptance probabilities.

use rand::Rng;
use serde::Serialize;

use super::prs::PrsScheme;
use crate::qcore::{rng_for, PureState};
use crate::verify::stod::{search_to_decision, DontCare, PrefixOracle, StodResult};
use crate::{QError, Result};

#[derive(Debug, Clone)]
pub struct OwsgScheme {
    pub gen: PrsScheme,
    /// Swap tests per Ver call; all must pass.
    pub ver_copies: usize,
}

impl OwsgScheme {
    pub fn new(gen: PrsScheme, ver_copies: usize) -> Result<Self> {
        if ver_copies == 0 {
            return Err(QError::Invalid("Ver needs at least one swap test".into()));
        }
        Ok(Self { gen, ver_copies })
    }

    /// Exact Pr[Ver(k', φ) = ⊤].
    pub fn ver_accept(&self, key: usize, phi: &PureState) -> Result<f64> {
        Ok(self.gen.swap_accept(phi, key)?.powi(self.ver_copies as i32))
    }

    /// One sampled run of Ver.
    pub fn ver_sample<R: Rng + ?Sized>(&self, key: usize, phi: &PureState, rng: &mut R) -> Result<bool> {
        let p = self.gen.swap_accept(phi, key)?;
        Ok((0..self.ver_copies).all(|_| rng.random::<f64>() < p))
    }
}

/// Oracle parameters for the search.
#[derive(Debug, Clone, Copy)]
pub struct OwsgAttack {
    pub a: f64,
    pub slack: f64,
    /// Sampled Ver runs per table entry; `None` uses exact probabilities.
    pub shots: Option<usize>,
}

impl Default for OwsgAttack {
    fn default() -> Self {
        Self { a: 1.0, slack: 0.3, shots: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OwsgResult {
    pub key: usize,
    pub search: StodResult,
    /// Exact Pr[Ver accepts the returned key].
    pub ver_accept: f64,
    /// Sampled final Ver run.
    pub success: bool,
}

/// Acceptance table used by the oracle.
fn table(scheme: &OwsgScheme, phi: &PureState, attack: &OwsgAttack, seed: u64) -> Result<Vec<f64>> {
    let exact = (0..scheme.gen.n_keys()).map(|k| scheme.ver_accept(k, phi)).collect::<Result<Vec<_>>>()?;
    Ok(match attack.shots {
        None => exact,
        Some(s) => {
            let mut rng = rng_for(seed, 2);
            exact
                .iter()
                .map(|&p| (0..s).filter(|_| rng.random::<f64>() < p).count() as f64 / s.max(1) as f64)
                .collect()
        }
    })
}

pub fn owsg_break(scheme: &OwsgScheme, challenge: &PureState, attack: &OwsgAttack, seed: u64) -> Result<OwsgResult> {
    if challenge.n_qubits() != scheme.gen.m {
        return Err(QError::Dimension("challenge does not match the generator output".into()));
    }
    let accept = table(scheme, challenge, attack, seed)?;
    let mut oracle = PrefixOracle::new(accept, attack.a, attack.slack, DontCare::random(seed))?;
    let search = search_to_decision(&mut oracle)?;
    let key = search.witness;
    let ver_accept = scheme.ver_accept(key, challenge)?;
    let success = scheme.ver_sample(key, challenge, &mut rng_for(seed, 3))?;
    Ok(OwsgResult { key, search, ver_accept, success })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OwsgTrial {
    pub seed: u64,
    pub key: usize,
    pub guess: Option<usize>,
    pub success: bool,
    pub ver_accept: f64,
}

/// Uniform key per trial; a promise failure of the search counts as a miss.
pub fn owsg_trial(scheme: &OwsgScheme, attack: &OwsgAttack, seed: u64) -> Result<OwsgTrial> {
    let key = rng_for(seed, 1).random_range(0..scheme.gen.n_keys());
    match owsg_break(scheme, scheme.gen.state(key), attack, seed) {
        Ok(r) => Ok(OwsgTrial { seed, key, guess: Some(r.key), success: r.success, ver_accept: r.ver_accept }),
        Err(QError::Promise(_)) => Ok(OwsgTrial { seed, key, guess: None, success: false, ver_accept: 0.0 }),
        Err(e) => Err(e),
    }
}

pub fn owsg_experiment(scheme: &OwsgScheme, attack: &OwsgAttack, trials: usize, seed: u64) -> Result<Vec<OwsgTrial>> {
    (0..trials).map(|i| owsg_trial(scheme, attack, super::prs::trial_seed(seed, i))).collect()
}
