//! Series used by the parametric families.

const BERNOULLI: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];
const EM_START: usize = 24;
const MAX_TERMS: usize = 20_000_000;

/// `Σ_{k ≥ n} k^{-s}` for `s > 1`, by Euler–Maclaurin from a shifted start.
pub fn hurwitz_tail(s: f64, n: f64) -> f64 {
    let mut n = n.max(1.0);
    let mut acc = 0.0;
    while n < EM_START as f64 {
        acc += n.powf(-s);
        n += 1.0;
    }
    let mut sum = acc + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    let mut rising = s;
    let mut fact = 2.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let m = 2 * j + 1;
        sum += b / fact * rising * n.powf(-s - m as f64);
        rising *= (s + m as f64) * (s + m as f64 + 1.0);
        fact *= ((m + 2) * (m + 3)) as f64;
    }
    sum
}

pub fn zeta(s: f64) -> f64 {
    hurwitz_tail(s, 1.0)
}

/// `Σ_{k ≥ 1} k^{-s} x^k` for `0 ≤ x ≤ 1` (`s > 1` when `x = 1`).
pub fn polylog(s: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return if s > 1.0 { zeta(s) } else { f64::INFINITY };
    }
    let mut sum = 0.0;
    let mut pw = 1.0;
    for k in 1..MAX_TERMS {
        pw *= x;
        let t = (k as f64).powf(-s) * pw;
        sum += t;
        if t <= 1e-18 * sum && (k as f64) * (1.0 - x) > 1.0 {
            break;
        }
    }
    sum
}

/// `ln k!`.
pub fn ln_factorial(k: usize) -> f64 {
    if k < 64 {
        return (2..=k).map(|i| (i as f64).ln()).sum();
    }
    let n = k as f64;
    n * n.ln() - n + 0.5 * (2.0 * std::f64::consts::PI * n).ln() + 1.0 / (12.0 * n)
        - 1.0 / (360.0 * n.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        assert!((zeta(3.0) - 1.2020569031595942).abs() < 1e-14);
        assert!((zeta(4.0) - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-14);
    }

    #[test]
    fn polylog_half() {
        // Li_2(1/2) = π²/12 − ln²2/2
        let want = std::f64::consts::PI.powi(2) / 12.0 - std::f64::consts::LN_2.powi(2) / 2.0;
        assert!((polylog(2.0, 0.5) - want).abs() < 1e-14);
        // Li_1(x) = −ln(1−x)
        assert!((polylog(1.0, 0.25) + (0.75f64).ln()).abs() < 1e-14);
    }

    #[test]
    fn ln_factorial_branches_agree() {
        let direct: f64 = (2..=100).map(|i| (i as f64).ln()).sum();
        assert!((ln_factorial(100) - direct).abs() < 1e-10);
    }
}
