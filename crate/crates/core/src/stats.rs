//! Monte Carlo summaries and parallel replicate runners.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::rng::{stream, StreamRng};

/// Runs `reps` replicates, replicate `i` on stream `i` of `seed`. The output
/// order is the replicate order whatever the thread count.
pub fn replicate<T, F>(seed: u64, reps: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync,
{
    replicate_from(seed, 0, reps, f)
}

/// Same as [`replicate`] on streams `first, first + 1, …`.
pub fn replicate_from<T, F>(seed: u64, first: u64, reps: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync,
{
    (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, first + i);
            f(&mut rng)
        })
        .collect()
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return MeanEstimate { mean: f64::NAN, std_err: f64::NAN, n };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        MeanEstimate {
            mean,
            std_err: (var / n as f64).sqrt(),
            n,
        }
    }

    /// Fraction of `n` trials with `hits` successes.
    pub fn proportion(hits: usize, n: usize) -> Self {
        let f = hits as f64 / n as f64;
        MeanEstimate {
            mean: f,
            std_err: (f * (1.0 - f) / n as f64).sqrt(),
            n,
        }
    }

    pub fn ci(&self, k: f64) -> (f64, f64) {
        (self.mean - k * self.std_err, self.mean + k * self.std_err)
    }

    /// `|mean − target| ≤ k σ`, where `σ` is the standard error.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_err
    }
}

/// `|p̂ − p| ≤ k √(p(1 − p)/n)` with the binomial error of the target.
pub fn proportion_within(hits: usize, n: usize, p: f64, k: f64) -> bool {
    let f = hits as f64 / n as f64;
    (f - p).abs() <= k * (p * (1.0 - p) / n as f64).sqrt()
}

/// Empirical law of a sample.
pub fn empirical<K: Ord + Clone>(xs: &[K]) -> BTreeMap<K, f64> {
    let mut counts: BTreeMap<K, usize> = BTreeMap::new();
    for x in xs {
        *counts.entry(x.clone()).or_default() += 1;
    }
    let n = xs.len() as f64;
    counts.into_iter().map(|(k, c)| (k, c as f64 / n)).collect()
}

/// `½ Σ |p − q|` over the union of supports.
pub fn tv<K: Ord>(a: &BTreeMap<K, f64>, b: &BTreeMap<K, f64>) -> f64 {
    let mut s = 0.0;
    for (k, v) in a {
        s += (v - b.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, v) in b {
        if !a.contains_key(k) {
            s += v;
        }
    }
    s / 2.0
}

/// Pearson statistic `Σ (O − E)² / E` over cells with positive expectation,
/// with its degrees of freedom.
pub fn chi_square(observed: &[usize], expected_probs: &[f64]) -> (f64, usize) {
    let n: usize = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (o, p) in observed.iter().zip(expected_probs) {
        let e = p * n as f64;
        if e > 0.0 {
            stat += (*o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    (stat, cells.saturating_sub(1))
}

/// Upper `1 − α` quantile of χ² with `df` degrees of freedom
/// (Wilson–Hilferty).
pub fn chi_square_quantile(df: usize, z: f64) -> f64 {
    let k = df.max(1) as f64;
    let a = 2.0 / (9.0 * k);
    k * (1.0 - a + z * a.sqrt()).powi(3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn replicate_is_order_stable() {
        let a = replicate(3, 100, |r| r.gen::<u64>());
        let b = replicate(3, 100, |r| r.gen::<u64>());
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn mean_estimate() {
        let m = MeanEstimate::from_samples(&[1.0, 2.0, 3.0]);
        assert_eq!(m.mean, 2.0);
        assert!((m.std_err - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(m.within(2.5, 1.0));
    }

    #[test]
    fn tv_and_chi_square() {
        let a = empirical(&[0, 0, 1, 1]);
        let b: BTreeMap<i32, f64> = [(0, 1.0)].into();
        assert_eq!(tv(&a, &b), 0.5);
        let (s, df) = chi_square(&[50, 50], &[0.5, 0.5]);
        assert_eq!((s, df), (0.0, 1));
        assert!((chi_square_quantile(10, 2.326) - 23.2).abs() < 0.3);
    }
}
