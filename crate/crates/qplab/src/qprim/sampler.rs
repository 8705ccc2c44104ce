use rand::Rng;

use super::dist::MeasurementOutcomeDist;
use crate::qcore::rng_for;

/// Categorical draw by inverse CDF. Probabilities need not be normalized.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// `shots` independent outcome indices from `dist`, deterministic per seed.
pub fn sample_trajectory(dist: &MeasurementOutcomeDist, shots: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng_for(seed, 0);
    let probs = dist.probs();
    (0..shots).map(|_| sample_index(&probs, &mut rng)).collect()
}

/// Two-sided Hoeffding half-width for a mean of `n` samples in [0,1] at
/// failure probability `delta`.
pub fn hoeffding_half_width(n: usize, delta: f64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qprim::dist::Outcome;

    fn coin(p: f64) -> MeasurementOutcomeDist {
        MeasurementOutcomeDist::new(vec![
            Outcome { label: "0".into(), prob: p, post: None },
            Outcome { label: "1".into(), prob: 1.0 - p, post: None },
        ])
        .unwrap()
    }

    #[test]
    fn certain_outcome_always_drawn() {
        assert!(sample_trajectory(&coin(1.0), 1000, 5).iter().all(|&i| i == 0));
    }

    #[test]
    fn fair_coin_mean() {
        let n = 100_000;
        let s = sample_trajectory(&coin(0.5), n, 9);
        let mean = s.iter().sum::<usize>() as f64 / n as f64;
        // Hoeffding at δ = 1e-6 gives ≈ 0.0085.
        assert!((mean - 0.5).abs() <= hoeffding_half_width(n, 1e-6));
        assert!((mean - 0.5).abs() <= 0.01);
    }

    #[test]
    fn same_seed_same_sequence() {
        let d = coin(0.3);
        assert_eq!(sample_trajectory(&d, 500, 77), sample_trajectory(&d, 500, 77));
    }
}
