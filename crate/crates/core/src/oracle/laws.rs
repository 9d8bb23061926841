//! Laws of functionals computed from generating-function recursions.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{abs_diff, enumerate_law, pmf_from_law, OracleError, Pmf, Scalar};
use crate::functional::{DegreeSet, FunctionalSpec, Window};
use crate::offspring::{extinction_probability, OffspringDistribution, OffspringError};
use crate::weight::{rational_from_f64, Rational};

/// Law of `|τ|` on `1..=nmax`.
pub fn size_law<W: Scalar>(p: &OffspringDistribution, nmax: usize) -> Result<Pmf<W>, OracleError> {
    leaves_law(p, &DegreeSet::all(), nmax)
}

/// Law of `L_𝒜(τ)` on `1..=nmax` for `0 ∈ 𝒜`, from the coefficients of
/// `F = x Σ_{k∈𝒜} p(k) F^k + Σ_{k∉𝒜} p(k) F^k`, `F(0) = 0`.
pub fn leaves_law<W: Scalar>(
    p: &OffspringDistribution,
    set: &DegreeSet,
    nmax: usize,
) -> Result<Pmf<W>, OracleError> {
    if !set.contains_zero() {
        return Err(OracleError::InvalidInput(
            "the series route needs 0 in the degree set".into(),
        ));
    }
    let masses = W::masses(p, nmax + 1)?;
    let unary_out = !set.contains(1);
    let denom = if unary_out {
        W::one() - masses[1.min(nmax)].clone()
    } else {
        W::one()
    };
    if nmax >= 1 && denom.is_zero() {
        return Err(OracleError::InvalidInput("p(1) = 1".into()));
    }
    // pw[k][j] = [x^j] F^k
    let mut pw: Vec<Vec<W>> = vec![vec![W::zero(); nmax + 1]; nmax + 1];
    pw[0][0] = W::one();
    let mut f = vec![W::zero(); nmax + 1];
    for n in 1..=nmax {
        for k in 2..=n {
            let mut acc = W::zero();
            for i in 1..=n - k + 1 {
                if f[i].is_zero() || pw[k - 1][n - i].is_zero() {
                    continue;
                }
                acc = acc + f[i].clone() * pw[k - 1][n - i].clone();
            }
            pw[k][n] = acc;
        }
        let mut acc = W::zero();
        for (k, pk) in masses.iter().enumerate().take(n + 1) {
            if pk.is_zero() {
                continue;
            }
            if set.contains(k as u32) {
                acc = acc + pk.clone() * pw[k][n - 1].clone();
            } else if k >= 2 {
                acc = acc + pk.clone() * pw[k][n].clone();
            }
        }
        f[n] = acc / denom.clone();
        pw[1][n] = f[n].clone();
    }
    let values = (1..=nmax as u64)
        .filter(|&n| !f[n as usize].is_zero())
        .map(|n| (n, f[n as usize].clone()))
        .collect();
    Ok(Pmf::new(values, Some(nmax as u64)))
}

/// Law of `H(τ)` on `0..=nmax` from `P(H ≤ j) = g_{j+1}(0)`.
pub fn height_law<W: Scalar>(p: &OffspringDistribution, nmax: usize) -> Result<Pmf<W>, OracleError> {
    let mut values = BTreeMap::new();
    let mut prev = W::zero();
    let mut c = W::zero();
    for j in 0..=nmax {
        c = W::pgf(p, &c)?;
        let d = c.clone() - prev.clone();
        if !d.is_zero() {
            values.insert(j as u64, d);
        }
        prev = c.clone();
    }
    Ok(Pmf::new(values, Some(nmax as u64)))
}

/// Law of `M(τ)` on `0..=nmax`; `P(M ≤ j)` is the smallest fixed point of
/// `r ↦ Σ_{k≤j} p(k) r^k`, which is algebraic, so this is floating point
/// only.
pub fn max_degree_law<W: Scalar>(p: &OffspringDistribution, nmax: usize) -> Result<Pmf<W>, OracleError> {
    if W::EXACT {
        return Err(OracleError::NotExact(
            "P(M ≤ j) is an algebraic number".into(),
        ));
    }
    let masses: Vec<f64> = (0..=nmax).map(|k| p.prob(k)).collect();
    let mut values = BTreeMap::new();
    let mut prev = 0.0;
    let full = p.support_max();
    let q = match extinction_probability(p) {
        Ok(e) => e.q,
        Err(OffspringError::DegenerateDistribution { q, .. }) => q as f64,
        Err(e) => return Err(e.into()),
    };
    for j in 0..=nmax {
        // once the whole support is kept the fixed point is q itself
        let c = if full.is_some_and(|s| j >= s) { q } else { truncated_fixed_point(&masses[..=j]) };
        if c - prev > 0.0 {
            let w = rational_from_f64(c - prev).unwrap_or_else(Rational::zero);
            values.insert(j as u64, W::from_rational(&w));
        }
        prev = c;
    }
    Ok(Pmf::new(values, Some(nmax as u64)))
}

/// Smallest root of `Σ_k c_k r^k = r` on `[0, 1]`, by Newton from 0.
fn truncated_fixed_point(c: &[f64]) -> f64 {
    let eval = |r: f64| {
        let g = c.iter().rev().fold(0.0, |a, &x| a * r + x);
        let dg = c
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |a, (k, &x)| a * r + k as f64 * x);
        (g, dg)
    };
    let mut r = 0.0f64;
    for _ in 0..10_000 {
        let (g, dg) = eval(r);
        let step = if dg < 1.0 { (g - r) / (1.0 - dg) } else { g - r };
        let next = (r + step).min(1.0);
        if (next - r).abs() <= 1e-17 {
            return next;
        }
        r = next;
    }
    r
}

fn solve_linear<W: Scalar>(mut a: Vec<Vec<W>>, mut b: Vec<W>) -> Option<Vec<W>> {
    let n = b.len();
    let zero = W::zero();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            abs_diff(&a[i][col], &zero)
                .partial_cmp(&abs_diff(&a[j][col], &zero))
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[piv][col].is_zero() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone() / a[col][col].clone();
            for c in col..n {
                let v = a[col][c].clone();
                a[r][c] = a[r][c].clone() - factor.clone() * v;
            }
            let v = b[col].clone();
            b[r] = b[r].clone() - factor * v;
        }
    }
    let mut x = vec![W::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc = acc - a[r][c].clone() * x[c].clone();
        }
        x[r] = acc / a[r][r].clone();
    }
    Some(x)
}

/// Law of `𝒵(τ)` on `1..=nmax`. `P(𝒵 ≤ j)` is the probability that the
/// process started from one individual dies out without exceeding `j`, the
/// solution of a linear system on the states `1..=j`.
pub fn largest_generation_law<W: Scalar>(
    p: &OffspringDistribution,
    nmax: usize,
) -> Result<Pmf<W>, OracleError> {
    let masses = W::masses(p, nmax + 1)?;
    // conv[a][b] = P(a individuals have b children), b ≤ nmax
    let mut conv: Vec<Vec<W>> = vec![vec![W::zero(); nmax + 1]];
    conv[0][0] = W::one();
    for a in 1..=nmax {
        let prev = &conv[a - 1];
        let mut row = vec![W::zero(); nmax + 1];
        for (i, x) in prev.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (k, pk) in masses.iter().enumerate().take(nmax + 1 - i) {
                row[i + k] = row[i + k].clone() + x.clone() * pk.clone();
            }
        }
        conv.push(row);
    }
    let mut values = BTreeMap::new();
    let mut prev = W::zero();
    for j in 1..=nmax {
        let mut a = vec![vec![W::zero(); j]; j];
        let mut b = vec![W::zero(); j];
        for s in 1..=j {
            b[s - 1] = conv[s][0].clone();
            for t in 1..=j {
                let delta = if s == t { W::one() } else { W::zero() };
                a[s - 1][t - 1] = delta - conv[s][t].clone();
            }
        }
        let v = solve_linear(a, b)
            .ok_or_else(|| OracleError::InvalidInput("singular transition system".into()))?;
        let c = v[0].clone();
        let d = c.clone() - prev.clone();
        if !d.is_zero() {
            values.insert(j as u64, d);
        }
        prev = c;
    }
    Ok(Pmf::new(values, Some(nmax as u64)))
}

/// Law of `A(τ)` on values up to `cap`. Routes without an exact recursion
/// fall back on size enumeration up to `cap` and record lower bounds only.
pub fn functional_law<W: Scalar>(
    p: &OffspringDistribution,
    f: &FunctionalSpec,
    cap: usize,
) -> Result<Pmf<W>, OracleError> {
    match f {
        FunctionalSpec::Size => size_law(p, cap),
        FunctionalSpec::Leaves(a) if a.contains_zero() => leaves_law(p, a, cap),
        FunctionalSpec::Leaves(_) => {
            let law = enumerate_law::<W>(p, cap)?;
            Ok(Pmf::new(pmf_from_law(&law, f), None))
        }
        FunctionalSpec::Height => height_law(p, cap),
        FunctionalSpec::MaxOutDegree => max_degree_law(p, cap),
        FunctionalSpec::LargestGeneration => largest_generation_law(p, cap),
    }
}

/// `P(A(τ) ∈ window)`.
pub fn window_prob<W: Scalar>(
    p: &OffspringDistribution,
    f: &FunctionalSpec,
    window: &Window,
) -> Result<W, OracleError> {
    let law = functional_law::<W>(p, f, window.reach() as usize)?;
    law.window_prob(window).ok_or_else(|| {
        OracleError::NotExact(format!("no exact law of {f} for window {window}"))
    })
}

/// Coefficients `[s^0..=deg] (Σ_k c_k s^k)^n`.
fn conv_power<W: Scalar>(c: &[W], n: usize, deg: usize) -> Vec<W> {
    let mut acc = vec![W::zero(); deg + 1];
    acc[0] = W::one();
    for _ in 0..n {
        let mut next = vec![W::zero(); deg + 1];
        for (i, x) in acc.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (k, ck) in c.iter().enumerate().take(deg + 1 - i) {
                if !ck.is_zero() {
                    next[i + k] = next[i + k].clone() + x.clone() * ck.clone();
                }
            }
        }
        acc = next;
    }
    acc
}

/// `(P(|τ| = n), P(S_n = n − 1) / n)` with `S_n` a sum of `n` independent
/// copies of `ζ`.
pub fn dwass_check<W: Scalar>(p: &OffspringDistribution, n: usize) -> Result<(W, W), OracleError> {
    if n == 0 {
        return Err(OracleError::InvalidInput("n must be positive".into()));
    }
    let lhs = size_law::<W>(p, n)?.prob(n as u64);
    let masses = W::masses(p, n)?;
    let s = conv_power(&masses, n, n - 1);
    let rhs = s[n - 1].clone() / W::from_u64(n as u64);
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongRatioRow<W> {
    pub n: u64,
    pub l: u64,
    /// `n mod d`.
    pub residue: u64,
    /// `P(S_n = n + ℓ) / P(S_n = n)`; `None` when the denominator vanishes.
    pub ratio: Option<W>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongRatioTable<W> {
    pub period: u32,
    pub rows: Vec<StrongRatioRow<W>>,
}

/// Ratios `P(S_n = n + ℓ) / P(S_n = n)` from exact convolution powers. For
/// a periodic law rows are tagged by residue class and vanishing
/// denominators are reported as `None`.
pub fn strong_ratio_table<W: Scalar>(
    p: &OffspringDistribution,
    ns: &[u64],
    ls: &[u64],
) -> Result<StrongRatioTable<W>, OracleError> {
    let nmax = ns.iter().copied().max().unwrap_or(0) as usize;
    let lmax = ls.iter().copied().max().unwrap_or(0) as usize;
    let deg = nmax + lmax;
    let masses = W::masses(p, deg + 1)?;
    let period = p.period().max(1);
    let mut rows = Vec::new();
    let mut acc = vec![W::zero(); deg + 1];
    acc[0] = W::one();
    for n in 1..=nmax {
        let mut next = vec![W::zero(); deg + 1];
        for (i, x) in acc.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (k, ck) in masses.iter().enumerate().take(deg + 1 - i) {
                if !ck.is_zero() {
                    next[i + k] = next[i + k].clone() + x.clone() * ck.clone();
                }
            }
        }
        acc = next;
        if ns.contains(&(n as u64)) {
            for &l in ls {
                let den = &acc[n];
                let ratio = if den.is_zero() {
                    None
                } else {
                    Some(acc[n + l as usize].clone() / den.clone())
                };
                rows.push(StrongRatioRow {
                    n: n as u64,
                    l,
                    residue: n as u64 % period as u64,
                    ratio,
                });
            }
        }
    }
    Ok(StrongRatioTable { period, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{enumerate_by_height, enumerate_law, TreeLaw};
    use crate::weight::rat;

    fn preset(n: &str) -> OffspringDistribution {
        OffspringDistribution::preset(n).unwrap()
    }

    #[test]
    fn size_law_examples() {
        let l: Pmf<Rational> = size_law(&preset("critical-binary"), 5).unwrap();
        assert_eq!(l.prob(1), rat(1, 2));
        assert_eq!(l.prob(2), rat(0, 1));
        assert_eq!(l.prob(3), rat(1, 8));
        assert_eq!(l.prob(5), rat(1, 16));
    }

    #[test]
    fn series_laws_match_enumeration() {
        for name in ["critical-binary", "aperiodic-critical", "sub-binary", "super-binary"] {
            let p = preset(name);
            let law: TreeLaw<Rational> = enumerate_law(&p, 9).unwrap();
            for f in [
                FunctionalSpec::Size,
                FunctionalSpec::Leaves(DegreeSet::leaves()),
                FunctionalSpec::Leaves(DegreeSet::finite([0, 2]).unwrap()),
            ] {
                let series: Pmf<Rational> = functional_law(&p, &f, 9).unwrap();
                let counted = pmf_from_law(&law, &f);
                // sizes ≤ 9 are complete; leaf counts only when p(1) = 0
                for n in 1..=4u64 {
                    let complete = f == FunctionalSpec::Size || p.prob(1) == 0.0;
                    if complete {
                        assert_eq!(series.prob(n), counted.get(&n).cloned().unwrap_or_else(|| rat(0, 1)), "{name} {f} {n}");
                    } else {
                        assert!(series.prob(n) >= counted.get(&n).cloned().unwrap_or_else(|| rat(0, 1)));
                    }
                }
            }
        }
    }

    #[test]
    fn height_law_examples() {
        let l: Pmf<Rational> = height_law(&preset("critical-binary"), 3).unwrap();
        assert_eq!(l.prob(0), rat(1, 2));
        assert_eq!(l.prob(1), rat(1, 8));
        let p = preset("aperiodic-critical");
        let l: Pmf<Rational> = height_law(&p, 3).unwrap();
        let by_h: TreeLaw<Rational> = enumerate_by_height(&p, 3, 100_000).unwrap();
        let counted = pmf_from_law(&by_h, &FunctionalSpec::Height);
        for j in 0..=3 {
            assert_eq!(l.prob(j), counted[&j]);
        }
    }

    #[test]
    fn max_degree_law_matches_enumeration_bound() {
        let p = preset("aperiodic-critical");
        let l: Pmf<f64> = max_degree_law(&p, 2).unwrap();
        assert!((l.prob(0) - 0.25).abs() < 1e-15);
        // M ≤ 1 means a path ending in a leaf: (1/4) / (1 − 1/2)
        assert!((l.prob(1) - 0.25).abs() < 1e-15);
        assert!((l.prob(2) - 0.5).abs() < 1e-12);
        assert!(max_degree_law::<Rational>(&p, 2).is_err());
    }

    #[test]
    fn largest_generation_matches_enumeration() {
        let p = preset("critical-binary");
        let l: Pmf<Rational> = largest_generation_law(&p, 4).unwrap();
        assert_eq!(l.prob(1), rat(1, 2));
        // 𝒵 = 2 ⇔ generations never exceed two nodes
        let law: TreeLaw<Rational> = enumerate_law(&p, 21).unwrap();
        let counted = pmf_from_law(&law, &FunctionalSpec::LargestGeneration);
        assert!(l.prob(2) >= counted[&2]);
        // from two nodes: v = 1/4 + v/2, so v = 1/2 and P(𝒵 ≤ 2) = 1/2 + v/2
        assert_eq!(l.prob(2), rat(1, 4));
    }

    #[test]
    fn dwass_examples() {
        let (l, r): (Rational, Rational) = dwass_check(&preset("critical-binary"), 3).unwrap();
        assert_eq!((l.clone(), r), (rat(1, 8), rat(1, 8)));
        let (l, r): (Rational, Rational) = dwass_check(&preset("sub-binary"), 5).unwrap();
        assert_eq!(l, r);
        let (l, r): (Rational, Rational) = dwass_check(&preset("aperiodic-critical"), 1).unwrap();
        assert_eq!((l, r), (rat(1, 4), rat(1, 4)));
    }

    #[test]
    fn strong_ratio_examples() {
        let t: StrongRatioTable<Rational> =
            strong_ratio_table(&preset("critical-binary"), &[3, 4], &[0, 2]).unwrap();
        assert_eq!(t.period, 2);
        assert!(t.rows.iter().any(|r| r.n == 3 && r.ratio.is_none()));
        let t: StrongRatioTable<f64> =
            strong_ratio_table(&preset("aperiodic-critical"), &[200], &[0, 1]).unwrap();
        assert_eq!(t.rows[0].ratio, Some(1.0));
        assert!((t.rows[1].ratio.unwrap() - 1.0).abs() < 0.02);
    }

    #[test]
    fn window_probabilities() {
        let p = preset("critical-binary");
        let w: Rational = window_prob(&p, &FunctionalSpec::Height, &Window::at_least(0)).unwrap();
        assert_eq!(w, rat(1, 1));
        let w: Rational = window_prob(&p, &FunctionalSpec::Size, &Window::span(1, 3).unwrap()).unwrap();
        assert_eq!(w, rat(5, 8));
    }
}
