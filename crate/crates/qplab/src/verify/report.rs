use serde::{Deserialize, Serialize};

/// Confidence used for reported Hoeffding half-widths.
pub const REPORT_DELTA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn from_bool(accept: bool) -> Self {
        if accept {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }

    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }
}

/// Outcome of a verifier run: an exact probability, a sampled estimate, or
/// both, with named intermediate statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_hat: Option<f64>,
    pub trials: usize,
    pub half_width: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expectation: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub stats: Vec<(String, f64)>,
}

impl VerdictReport {
    pub fn exact(verdict: Verdict, p: f64) -> Self {
        Self {
            verdict,
            p_exact: Some(p.clamp(0.0, 1.0)),
            p_hat: None,
            trials: 0,
            half_width: 0.0,
            seed: None,
            expectation: None,
            stats: Vec::new(),
        }
    }

    /// Empirical frequency `hits / trials` with its Hoeffding half-width.
    pub fn sampled(verdict: Verdict, hits: usize, trials: usize, seed: u64) -> Self {
        let p_hat = if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
        Self {
            verdict,
            p_exact: None,
            p_hat: Some(p_hat),
            trials,
            half_width: crate::qprim::hoeffding_half_width(trials.max(1), REPORT_DELTA),
            seed: Some(seed),
            expectation: None,
            stats: Vec::new(),
        }
    }

    /// Verdict from a single estimator run over `trials` rounds.
    pub fn estimate(verdict: Verdict, value: f64, trials: usize, half_width: f64, seed: Option<u64>) -> Self {
        Self {
            verdict,
            p_exact: None,
            p_hat: None,
            trials,
            half_width,
            seed,
            expectation: Some(value),
            stats: Vec::new(),
        }
    }

    pub fn with_expectation(mut self, e: f64) -> Self {
        self.expectation = Some(e);
        self
    }

    pub fn with_stat(mut self, name: &str, v: f64) -> Self {
        self.stats.push((name.to_string(), v));
        self
    }

    pub fn stat(&self, name: &str) -> Option<f64> {
        self.stats.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_fields() {
        let r = VerdictReport::sampled(Verdict::Accept, 30, 100, 7).with_expectation(0.25);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"verdict\":\"accept\""));
        assert!(s.contains("\"p_hat\":0.3"));
        assert!(!s.contains("p_exact"));
        let back: VerdictReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(r.half_width > 0.0 && r.half_width < 0.2);
    }
}
