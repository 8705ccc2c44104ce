//! Search-to-decision for classical witnesses.
//!
//! The prefix oracle answers "yes" when some completion of x is accepted with
//! probability ≥ a − |x|·δ and "no" when every completion is below
//! a − (|x|+1)·δ, where δ = slack/(2n). Between the two thresholds the answer
//! is unconstrained.

use rand::Rng;

use super::base::QmaVerifier;
use crate::qcore::{rng_for, PureState, QRng};
use crate::{QError, Result};

/// How the oracle answers prefixes in the unconstrained band.
#[derive(Debug)]
pub enum DontCare {
    Yes,
    No,
    /// Fresh random bit per query.
    Random(QRng),
}

impl DontCare {
    pub fn random(seed: u64) -> Self {
        DontCare::Random(rng_for(seed, 0))
    }

    fn answer(&mut self) -> bool {
        match self {
            DontCare::Yes => true,
            DontCare::No => false,
            DontCare::Random(rng) => rng.random::<bool>(),
        }
    }
}

/// Exhaustive-suffix oracle over an acceptance table indexed by witness
/// (bit j of the index is witness character j).
#[derive(Debug)]
pub struct PrefixOracle {
    pub accept: Vec<f64>,
    pub n: usize,
    pub a: f64,
    pub slack: f64,
    pub dont_care: DontCare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleRegion {
    Yes,
    No,
    DontCare,
}

impl PrefixOracle {
    pub fn new(accept: Vec<f64>, a: f64, slack: f64, dont_care: DontCare) -> Result<Self> {
        let n = accept.len().trailing_zeros() as usize;
        if accept.is_empty() || 1 << n != accept.len() {
            return Err(QError::Invalid("acceptance table must have 2^n entries".into()));
        }
        if !(slack > 0.0) {
            return Err(QError::Invalid("slack must be positive".into()));
        }
        Ok(Self { accept, n, a, slack, dont_care })
    }

    /// Acceptance table of a verifier on the given input.
    pub fn from_verifier(v: &QmaVerifier, input: &PureState, a: f64, slack: f64, dont_care: DontCare) -> Result<Self> {
        let n = v.witness.len();
        let accept = (0..1usize << n).map(|w| v.accept_classical(input, w)).collect::<Result<Vec<_>>>()?;
        Self::new(accept, a, slack, dont_care)
    }

    pub fn step(&self) -> f64 {
        self.slack / (2.0 * self.n as f64)
    }

    /// max over completions y of Pr[V(x‖y) = 1], x given by its first `len` bits.
    pub fn best_completion(&self, prefix: usize, len: usize) -> f64 {
        let mask = (1usize << len) - 1;
        self.accept
            .iter()
            .enumerate()
            .filter(|(w, _)| w & mask == prefix & mask)
            .map(|(_, &p)| p)
            .fold(0.0, f64::max)
    }

    pub fn region(&self, prefix: usize, len: usize) -> OracleRegion {
        let best = self.best_completion(prefix, len);
        if best >= self.a - len as f64 * self.step() {
            OracleRegion::Yes
        } else if best < self.a - (len + 1) as f64 * self.step() {
            OracleRegion::No
        } else {
            OracleRegion::DontCare
        }
    }

    pub fn query(&mut self, prefix: usize, len: usize) -> (bool, OracleRegion) {
        let r = self.region(prefix, len);
        let b = match r {
            OracleRegion::Yes => true,
            OracleRegion::No => false,
            OracleRegion::DontCare => self.dont_care.answer(),
        };
        (b, r)
    }

    /// Membership in Good: some completion reaches a − (|x|+1)·δ.
    pub fn is_good(&self, prefix: usize, len: usize) -> bool {
        self.best_completion(prefix, len) >= self.a - (len + 1) as f64 * self.step()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StodResult {
    /// Witness index (bit j is character j).
    pub witness: usize,
    pub n: usize,
    /// Region of each query, in order.
    pub regions: Vec<OracleRegion>,
    /// Good-set membership of w_0, …, w_n.
    pub good: Vec<bool>,
    pub accept: f64,
}

impl StodResult {
    pub fn bits(&self) -> String {
        (0..self.n).map(|j| if (self.witness >> j) & 1 == 1 { '1' } else { '0' }).collect()
    }
}

/// The prefix-extension loop: try w‖0, take w‖1 on a "no".
pub fn search_unchecked(oracle: &mut PrefixOracle) -> StodResult {
    let n = oracle.n;
    let mut w = 0usize;
    let mut regions = Vec::with_capacity(n);
    let mut good = vec![oracle.is_good(0, 0)];
    for i in 0..n {
        let (b, r) = oracle.query(w, i + 1);
        regions.push(r);
        if !b {
            w |= 1 << i;
        }
        good.push(oracle.is_good(w, i + 1));
    }
    StodResult { witness: w, n, regions, good, accept: oracle.accept[w] }
}

/// Checks the yes promise (the empty prefix qualifies) before searching.
pub fn search_to_decision(oracle: &mut PrefixOracle) -> Result<StodResult> {
    if oracle.region(0, 0) != OracleRegion::Yes {
        return Err(QError::Promise(format!(
            "no witness reaches a = {} (best {})",
            oracle.a,
            oracle.best_completion(0, 0)
        )));
    }
    Ok(search_unchecked(oracle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::bernoulli_verifier;

    fn table_with(n: usize, hits: &[(usize, f64)]) -> Vec<f64> {
        let mut t = vec![0.0; 1 << n];
        for &(w, p) in hits {
            t[w] = p;
        }
        t
    }

    #[test]
    fn finds_unique_witness_101() {
        // characters 1,0,1 → index 0b101
        let v = bernoulli_verifier(&table_with(3, &[(0b101, 1.0)])).unwrap();
        let mut o = PrefixOracle::from_verifier(&v, &PureState::zero(0), 1.0, 0.1, DontCare::No).unwrap();
        let r = search_to_decision(&mut o).unwrap();
        assert_eq!(r.bits(), "101");
        assert!(r.good.iter().all(|&g| g));
        // Exhaustive check: 101 is the only witness accepted with certainty.
        let accepted: Vec<usize> = (0..8).filter(|&w| o.accept[w] > 0.5).collect();
        assert_eq!(accepted, vec![r.witness]);
    }

    #[test]
    fn all_accepting_returns_zeros() {
        let mut o = PrefixOracle::new(vec![1.0; 16], 1.0, 0.1, DontCare::No).unwrap();
        let r = search_to_decision(&mut o).unwrap();
        assert_eq!(r.bits(), "0000");
    }

    #[test]
    fn no_instance_terminates() {
        let mut o = PrefixOracle::new(vec![0.1; 8], 0.9, 0.1, DontCare::random(3)).unwrap();
        assert!(search_to_decision(&mut o).is_err());
        let r = search_unchecked(&mut o);
        assert_eq!(r.n, 3);
    }

    #[test]
    fn adversarial_band_keeps_good() {
        let mut rng = rng_for(61, 0);
        for seed in 0..50 {
            let t: Vec<f64> = (0..32).map(|_| rng.random::<f64>()).collect();
            let a = t.iter().cloned().fold(0.0, f64::max);
            let mut o = PrefixOracle::new(t, a, 0.3, DontCare::random(seed)).unwrap();
            let r = search_to_decision(&mut o).unwrap();
            assert!(r.good.iter().all(|&g| g));
            assert!(r.accept >= a - 0.3);
        }
    }
}
