use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use super::{Criticality, Family, OffspringDistribution, OffspringError, DEFAULT_TRUNCATE_TAIL};
use crate::weight::{convergents, Rational, Weight};

/// Special cases excluded by the non-degeneracy hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegenerateCase {
    /// `p(0) = 0`: the tree is a.s. infinite.
    NoLeaves,
    /// `p(0) = 1`: the tree is a.s. `{∅}`.
    AlwaysLeaf,
    /// `p(1) = 1`: the tree is a.s. the infinite spine.
    Spine,
    /// `0 < p(0) < 1 = p(0) + p(1)`: a path of geometric length.
    Path,
}

impl DegenerateCase {
    pub fn extinction(self) -> u8 {
        match self {
            DegenerateCase::NoLeaves | DegenerateCase::Spine => 0,
            DegenerateCase::AlwaysLeaf | DegenerateCase::Path => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extinction {
    pub q: f64,
    pub exact: Option<Rational>,
}

fn degenerate_case(p: &OffspringDistribution) -> Option<DegenerateCase> {
    let (p0, p1) = match p.exact_support() {
        Some(ex) => (
            ex[0].clone(),
            ex.get(1).cloned().unwrap_or_else(Rational::zero),
        ),
        None => {
            let f = |x: f64| Rational::from_float(x).unwrap_or_else(Rational::zero);
            (f(p.prob(0)), f(p.prob(1)))
        }
    };
    let one = Rational::one();
    if p0 == one {
        Some(DegenerateCase::AlwaysLeaf)
    } else if p1 == one {
        Some(DegenerateCase::Spine)
    } else if p0.is_zero() {
        Some(DegenerateCase::NoLeaves)
    } else if p0 + p1 == one {
        Some(DegenerateCase::Path)
    } else {
        None
    }
}

/// Smallest root of `g(r) = r` in `[0, 1]`.
///
/// Fixed-point iteration from 0 (monotone), then Newton steps from the left.
/// For exact inputs the float root is turned into a candidate fraction and
/// accepted only if `g(c) = c` holds exactly.
pub fn extinction_probability(p: &OffspringDistribution) -> Result<Extinction, OffspringError> {
    if let Some(case) = degenerate_case(p) {
        return Err(OffspringError::DegenerateDistribution {
            case,
            q: case.extinction(),
        });
    }
    if p.criticality() != Criticality::Super {
        return Ok(Extinction {
            q: 1.0,
            exact: Some(Rational::one()),
        });
    }
    if let Some(a) = p.geometric_parameter_exact() {
        let q = (Rational::one() - a) / a;
        return Ok(Extinction {
            q: q.to_f64().unwrap_or(f64::NAN),
            exact: Some(q),
        });
    }
    let mut q = 0.0f64;
    for _ in 0..100_000 {
        let next = p.gen_fn(q)?.0;
        let done = (next - q).abs() < 1e-10;
        q = next;
        if done {
            break;
        }
    }
    for _ in 0..50 {
        let (g, dg) = p.gen_fn(q)?;
        if dg >= 1.0 {
            break;
        }
        let next = q - (g - q) / (dg - 1.0);
        if !(next.is_finite() && (0.0..1.0).contains(&next)) || (next - q).abs() < 1e-17 {
            if next.is_finite() && (0.0..1.0).contains(&next) {
                q = next;
            }
            break;
        }
        q = next;
    }
    let exact = p.exact_support().and_then(|_| {
        convergents(q, 1_000_000_000_000)
            .into_iter()
            .rev()
            .find(|c| {
                c < &Rational::one()
                    && !c.is_zero()
                    && p.gen_fn_exact(c).map(|(g, _)| &g == c).unwrap_or(false)
            })
    });
    if let Some(e) = &exact {
        q = e.to_f64().unwrap_or(q);
    }
    Ok(Extinction { q, exact })
}

fn require_super(p: &OffspringDistribution) -> Result<(), OffspringError> {
    p.require_nondegenerate()?;
    if p.criticality() != Criticality::Super {
        return Err(OffspringError::NotSuperCritical(p.mean()));
    }
    Ok(())
}

/// `p̃(n) = q^{n-1} p(n)`: the law of a super-critical tree on extinction.
pub fn conjugate(p: &OffspringDistribution) -> Result<OffspringDistribution, OffspringError> {
    require_super(p)?;
    let ext = extinction_probability(p)?;
    if let (Some(ex), Some(q)) = (p.exact_support(), &ext.exact) {
        let mut pw = Rational::one() / q;
        let mut w = Vec::with_capacity(ex.len());
        for pk in ex {
            w.push(pk * &pw);
            pw = &pw * q;
        }
        return OffspringDistribution::from_rationals(w);
    }
    let q = ext.q;
    match *p.family() {
        Family::Geometric { a } => match p.geometric_parameter_exact() {
            Some(e) => OffspringDistribution::geometric_exact(Rational::one() - e),
            None => OffspringDistribution::geometric(1.0 - a),
        },
        Family::Poisson { lambda } => OffspringDistribution::poisson(lambda * q),
        Family::Finite => {
            let w: Vec<f64> = p
                .probs()
                .iter()
                .enumerate()
                .map(|(n, pn)| pn * q.powi(n as i32 - 1))
                .collect();
            let total: f64 = w.iter().sum();
            OffspringDistribution::from_f64(w.iter().map(|x| x / total).collect())
        }
        Family::PowerLaw { .. } | Family::Table => {
            let w: Vec<f64> = p
                .probs()
                .iter()
                .enumerate()
                .map(|(n, pn)| pn * q.powi(n as i32 - 1))
                .collect();
            let len = w.len() as i32;
            let mean = p.gen_fn(q)?.1;
            Ok(OffspringDistribution::table(
                w,
                None,
                p.tail_bound() * q.powi(len - 1),
                mean,
                p.radius() / q,
            ))
        }
    }
}

/// `p*(n) = n p(n) / m`.
pub fn size_biased(p: &OffspringDistribution) -> Result<OffspringDistribution, OffspringError> {
    let m = p.mean();
    if !(m > 0.0 && m.is_finite()) {
        return Err(OffspringError::ZeroOrInfiniteMean);
    }
    if let (Some(ex), Some(me)) = (p.exact_support(), p.exact_mean()) {
        let w = ex
            .iter()
            .enumerate()
            .map(|(n, pn)| pn * Rational::from_u64(n as u64) / &me)
            .collect();
        return OffspringDistribution::from_rationals(w);
    }
    let mut probs = Vec::new();
    let mut acc = 0.0;
    let mut second = 0.0;
    let mut n = 0usize;
    while n < super::MAX_TABLE_LEN {
        let w = n as f64 * p.prob(n) / m;
        probs.push(w);
        acc += w;
        second += n as f64 * w;
        n += 1;
        if n >= p.probs().len() && 1.0 - acc < DEFAULT_TRUNCATE_TAIL {
            break;
        }
    }
    let tail = (1.0 - acc).max(0.0);
    let exact_prefix = match (p.exact_prefix(probs.len().min(256)), p.exact_mean()) {
        (Some(ex), Some(me)) => Some(
            ex.iter()
                .enumerate()
                .map(|(n, pn)| pn * Rational::from_u64(n as u64) / &me)
                .collect(),
        ),
        _ => None,
    };
    if p.support_max().is_some() {
        return OffspringDistribution::from_f64(probs);
    }
    Ok(OffspringDistribution::table(probs, exact_prefix, tail, second, p.radius()))
}

/// Joint law of `(S, E)`: children of the root with an infinite, resp.
/// finite, line of descent, conditionally on non-extinction.
#[derive(Debug, Clone)]
pub struct JointRootLaw {
    entries: BTreeMap<(u32, u32), f64>,
    exact: Option<BTreeMap<(u32, u32), Rational>>,
    q: f64,
    q_exact: Option<Rational>,
    tail_bound: f64,
    cumulative: Vec<((u32, u32), f64)>,
}

/// Rows of the offspring table kept when building the joint law of an
/// infinitely supported distribution.
const JOINT_MAX_N: usize = 4096;

pub fn survivor_joint(p: &OffspringDistribution) -> Result<JointRootLaw, OffspringError> {
    require_super(p)?;
    let ext = extinction_probability(p)?;
    let q = ext.q;
    let exact = match (p.exact_support(), &ext.exact) {
        (Some(ex), Some(qe)) => {
            let one_minus = Rational::one() - qe;
            let mut map = BTreeMap::new();
            for (n, pn) in ex.iter().enumerate() {
                if pn.is_zero() {
                    continue;
                }
                let mut binom = Rational::one();
                for k in 1..=n {
                    binom = binom * Rational::from_u64((n - k + 1) as u64)
                        / Rational::from_u64(k as u64);
                    let w = pn * &binom * one_minus.powi(k as u32) * qe.powi((n - k) as u32)
                        / &one_minus;
                    if !w.is_zero() {
                        map.insert((k as u32, (n - k) as u32), w);
                    }
                }
            }
            Some(map)
        }
        _ => None,
    };
    let mut entries = BTreeMap::new();
    let mut tail_bound = 0.0;
    match &exact {
        Some(map) => {
            for (key, w) in map {
                entries.insert(*key, w.to_f64().unwrap_or(f64::NAN));
            }
        }
        None => {
            let rows = p.probs().len().min(JOINT_MAX_N);
            let mut used = 0.0;
            for n in 1..rows {
                let pn = p.prob(n);
                if pn == 0.0 {
                    continue;
                }
                used += pn * (1.0 - q.powi(n as i32));
                let ln_base = pn.ln() - (1.0 - q).ln();
                let mut ln_binom = 0.0;
                for k in 1..=n {
                    ln_binom += ((n - k + 1) as f64).ln() - (k as f64).ln();
                    let lw = ln_base
                        + ln_binom
                        + k as f64 * (1.0 - q).ln()
                        + if n > k { (n - k) as f64 * q.ln() } else { 0.0 };
                    let w = lw.exp();
                    if w > 1e-300 {
                        entries.insert((k as u32, (n - k) as u32), w);
                    }
                }
            }
            tail_bound = (1.0 - used / (1.0 - q)).max(0.0);
        }
    }
    let mut cumulative = Vec::with_capacity(entries.len());
    let mut acc = 0.0;
    for (key, w) in &entries {
        acc += w;
        cumulative.push((*key, acc));
    }
    Ok(JointRootLaw {
        entries,
        exact,
        q,
        q_exact: ext.exact,
        tail_bound,
        cumulative,
    })
}

impl JointRootLaw {
    pub fn prob(&self, s: u32, e: u32) -> f64 {
        self.entries.get(&(s, e)).copied().unwrap_or(0.0)
    }

    pub fn exact_prob(&self, s: u32, e: u32) -> Option<Rational> {
        self.exact
            .as_ref()
            .map(|m| m.get(&(s, e)).cloned().unwrap_or_else(Rational::zero))
    }

    pub fn entries(&self) -> &BTreeMap<(u32, u32), f64> {
        &self.entries
    }

    pub fn exact_entries(&self) -> Option<&BTreeMap<(u32, u32), Rational>> {
        self.exact.as_ref()
    }

    pub fn extinction(&self) -> f64 {
        self.q
    }

    pub fn extinction_exact(&self) -> Option<&Rational> {
        self.q_exact.as_ref()
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `G(r, ℓ) = E[r^S ℓ^E]`.
    pub fn gen_fn(&self, r: f64, l: f64) -> f64 {
        self.entries
            .iter()
            .map(|(&(s, e), w)| w * r.powi(s as i32) * l.powi(e as i32))
            .sum()
    }

    /// The backbone law `p̂`, marginal of `S`.
    pub fn backbone(&self) -> Result<OffspringDistribution, OffspringError> {
        if let Some(map) = &self.exact {
            let len = map.keys().map(|&(s, _)| s as usize).max().unwrap_or(0) + 1;
            let mut w = vec![Rational::zero(); len];
            for (&(s, _), v) in map {
                w[s as usize] += v;
            }
            return OffspringDistribution::from_rationals(w);
        }
        let len = self.entries.keys().map(|&(s, _)| s as usize).max().unwrap_or(0) + 1;
        let mut w = vec![0.0; len];
        for (&(s, _), v) in &self.entries {
            w[s as usize] += v;
        }
        let mean = w.iter().enumerate().map(|(k, x)| k as f64 * x).sum();
        if self.tail_bound == 0.0 {
            let total: f64 = w.iter().sum();
            return OffspringDistribution::from_f64(w.iter().map(|x| x / total).collect());
        }
        Ok(OffspringDistribution::table(w, None, self.tail_bound, mean, 1.0))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (u32, u32) {
        let total = self.cumulative.last().map_or(1.0, |c| c.1);
        let u: f64 = rng.gen::<f64>() * total;
        let i = self.cumulative.partition_point(|c| c.1 <= u);
        self.cumulative[i.min(self.cumulative.len() - 1)].0
    }
}

/// A law on `ℕ ∪ {+∞}`.
#[derive(Debug, Clone)]
pub struct ExtendedOffspring {
    finite: Vec<f64>,
    exact_finite: Option<Vec<Rational>>,
    atom: f64,
    exact_atom: Option<Rational>,
    tail_bound: f64,
    cdf: Vec<f64>,
}

/// `p̃(n) = n p(n)` on `ℕ` and `p̃(+∞) = 1 − m`.
pub fn condensation_offspring(p: &OffspringDistribution) -> Result<ExtendedOffspring, OffspringError> {
    if p.criticality() != Criticality::Sub {
        return Err(OffspringError::NotSubCritical(p.mean()));
    }
    let m = p.mean();
    let finite: Vec<f64> = p
        .probs()
        .iter()
        .enumerate()
        .map(|(n, pn)| n as f64 * pn)
        .collect();
    let (exact_finite, exact_atom) = match (p.exact_support(), p.exact_mean()) {
        (Some(ex), Some(me)) => (
            Some(
                ex.iter()
                    .enumerate()
                    .map(|(n, pn)| pn * Rational::from_u64(n as u64))
                    .collect(),
            ),
            Some(Rational::one() - me),
        ),
        _ => (None, None),
    };
    let listed: f64 = finite.iter().sum();
    let mut cdf = Vec::with_capacity(finite.len());
    let mut acc = 0.0;
    for w in &finite {
        acc += w;
        cdf.push(acc);
    }
    Ok(ExtendedOffspring {
        tail_bound: (m - listed).max(0.0),
        finite,
        exact_finite,
        atom: 1.0 - m,
        exact_atom,
        cdf,
    })
}

impl ExtendedOffspring {
    pub fn finite_part(&self) -> &[f64] {
        &self.finite
    }

    pub fn exact_finite_part(&self) -> Option<&[Rational]> {
        self.exact_finite.as_deref()
    }

    pub fn atom_at_infinity(&self) -> f64 {
        self.atom
    }

    pub fn exact_atom(&self) -> Option<&Rational> {
        self.exact_atom.as_ref()
    }

    /// Finite mass not listed in the table.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn exact_total(&self) -> Option<Rational> {
        let f: Rational = self.exact_finite.as_ref()?.iter().cloned().sum();
        Some(f + self.exact_atom.clone()?)
    }

    /// `None` stands for `+∞`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<u32> {
        let u: f64 = rng.gen();
        let i = self.cdf.partition_point(|&c| c <= u);
        if i < self.cdf.len() {
            Some(i as u32)
        } else {
            None
        }
    }
}

/// Offspring law of the leaf tree together with the criticality flag.
#[derive(Debug, Clone)]
pub struct LeafOffspring {
    pub distribution: OffspringDistribution,
    /// `(m − (1 − p(0))) / p(0)`.
    pub mean: f64,
    /// False when the input was not critical; the law is still returned.
    pub critical: bool,
}

const LEAF_EXACT_LEN: usize = 64;
const LEAF_MAX_LEN: usize = 1 << 14;

/// Law of `ζ' = Σ_{k=1}^{N-1} (X_k − 1)` with `N ~ Geom(p(0))` on
/// `{1, 2, …}` and `X_k ~ ζ | ζ > 0`, read off
/// `E[s^{ζ'}] = p(0) / (1 − Σ_{k≥1} p(k) s^{k−1})`.
pub fn leaf_offspring(p: &OffspringDistribution) -> Result<LeafOffspring, OffspringError> {
    p.require_nondegenerate()?;
    let p0 = p.prob(0);
    let critical = p.criticality() == Criticality::Critical;
    let closed_mean = (p.mean() - (1.0 - p0)) / p0;

    let exact = p.exact_prefix(LEAF_EXACT_LEN + 1).map(|ex| {
        let a: Vec<Rational> = ex[1..].to_vec();
        let denom = Rational::one() - &a[0];
        let mut b: Vec<Rational> = vec![Rational::one() / &denom];
        for j in 1..LEAF_EXACT_LEN {
            let mut acc = Rational::zero();
            for i in 1..=j {
                if !a[i].is_zero() {
                    acc += &a[i] * &b[j - i];
                }
            }
            b.push(acc / &denom);
        }
        b.into_iter().map(|x| x * &ex[0]).collect::<Vec<_>>()
    });

    let alen = p.probs().len().saturating_sub(1).max(1);
    let a: Vec<f64> = (0..alen).map(|i| p.prob(i + 1)).collect();
    let denom = 1.0 - a[0];
    let mut b = vec![1.0 / denom];
    let mut acc = p0 * b[0];
    let min_len = if exact.is_some() { LEAF_EXACT_LEN } else { 1 };
    while b.len() < LEAF_MAX_LEN && (1.0 - acc > 1e-15 || b.len() < min_len) {
        let j = b.len();
        let mut s = 0.0;
        for i in 1..=j.min(alen - 1) {
            s += a[i] * b[j - i];
        }
        b.push(s / denom);
        acc += p0 * b[j];
    }
    let probs: Vec<f64> = b.into_iter().map(|x| x * p0).collect();
    let tail = (1.0 - acc).max(0.0);
    let distribution = OffspringDistribution::table(probs, exact, tail, closed_mean, 1.0);
    Ok(LeafOffspring {
        distribution,
        mean: closed_mean,
        critical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::rat;

    fn preset(n: &str) -> OffspringDistribution {
        OffspringDistribution::preset(n).unwrap()
    }

    #[test]
    fn extinction_examples() {
        let e = extinction_probability(&preset("super-binary")).unwrap();
        assert_eq!(e.exact, Some(rat(1, 3)));
        assert!((e.q - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(extinction_probability(&preset("critical-binary")).unwrap().q, 1.0);
        assert_eq!(extinction_probability(&preset("sub-binary")).unwrap().q, 1.0);
        let g = extinction_probability(&preset("geom:0.6")).unwrap();
        assert_eq!(g.exact, Some(rat(2, 3)));
    }

    #[test]
    fn extinction_float_only() {
        let p = OffspringDistribution::poisson(1.5).unwrap();
        let e = extinction_probability(&p).unwrap();
        let (g, _) = p.gen_fn(e.q).unwrap();
        assert!((g - e.q).abs() < 1e-14);
        assert!(e.q > 0.0 && e.q < 1.0);
        let f = OffspringDistribution::geometric(0.6).unwrap();
        let fl = OffspringDistribution::from_f64(f.probs().to_vec()).unwrap();
        let e = extinction_probability(&fl).unwrap();
        assert!((e.q - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn degenerate_cases() {
        let cases = [
            (vec![rat(1, 1)], DegenerateCase::AlwaysLeaf),
            (vec![rat(0, 1), rat(1, 1)], DegenerateCase::Spine),
            (vec![rat(0, 1), rat(1, 2), rat(1, 2)], DegenerateCase::NoLeaves),
            (vec![rat(1, 3), rat(2, 3)], DegenerateCase::Path),
        ];
        for (w, case) in cases {
            let p = OffspringDistribution::from_rationals(w).unwrap();
            match extinction_probability(&p) {
                Err(OffspringError::DegenerateDistribution { case: c, q }) => {
                    assert_eq!(c, case);
                    assert_eq!(q, case.extinction());
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn conjugate_examples() {
        let c = conjugate(&preset("super-binary")).unwrap();
        assert_eq!(c, OffspringDistribution::from_rationals(vec![rat(3, 4), rat(0, 1), rat(1, 4)]).unwrap());
        assert_eq!(c.exact_mean(), Some(rat(1, 2)));
        assert!(matches!(conjugate(&preset("critical-binary")), Err(OffspringError::NotSuperCritical(_))));
        let g = conjugate(&preset("geom:0.6")).unwrap();
        assert_eq!(g.geometric_parameter_exact(), Some(&rat(2, 5)));
    }

    #[test]
    fn size_biased_examples() {
        let want = OffspringDistribution::from_rationals(vec![rat(0, 1), rat(0, 1), rat(1, 1)]).unwrap();
        assert_eq!(size_biased(&preset("critical-binary")).unwrap(), want);
        assert_eq!(size_biased(&preset("sub-binary")).unwrap(), want);
        let g = size_biased(&preset("geom:0.5")).unwrap();
        assert_eq!(g.prob(0), 0.0);
        let total: f64 = g.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        // E[ζ²]/m = (2a²/(1-a)² + a/(1-a)) / (a/(1-a)) = 3 for a = 1/2
        assert!((g.mean() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn survivor_examples() {
        let j = survivor_joint(&preset("super-binary")).unwrap();
        assert_eq!(j.exact_prob(2, 0), Some(rat(1, 2)));
        assert_eq!(j.exact_prob(1, 1), Some(rat(1, 2)));
        let sum: Rational = j.exact_entries().unwrap().values().cloned().sum();
        assert_eq!(sum, rat(1, 1));
        let b = j.backbone().unwrap();
        assert_eq!(b, OffspringDistribution::from_rationals(vec![rat(0, 1), rat(1, 2), rat(1, 2)]).unwrap());
        assert_eq!(b.exact_mean(), Some(rat(3, 2)));
        for r in [0.0, 0.3, 0.7, 1.0] {
            for l in [0.0, 0.5, 1.0] {
                assert!((j.gen_fn(r, l) - (r * r + r * l) / 2.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn survivor_float_path_matches_formula() {
        let p = OffspringDistribution::poisson(2.0).unwrap();
        let j = survivor_joint(&p).unwrap();
        let q = j.extinction();
        for r in [0.1, 0.5, 0.9] {
            for l in [0.2, 1.0] {
                let want = (p.gen_fn((1.0 - q) * r + q * l).unwrap().0 - p.gen_fn(q * l).unwrap().0) / (1.0 - q);
                assert!((j.gen_fn(r, l) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn condensation_examples() {
        let c = condensation_offspring(&preset("sub-binary")).unwrap();
        assert_eq!(
            c.exact_finite_part().unwrap(),
            &[rat(0, 1), rat(0, 1), rat(4, 5)][..]
        );
        assert_eq!(c.exact_atom(), Some(&rat(1, 5)));
        assert_eq!(c.exact_total(), Some(rat(1, 1)));
        assert!(condensation_offspring(&preset("critical-binary")).is_err());
    }

    #[test]
    fn leaf_offspring_critical_binary() {
        let l = leaf_offspring(&preset("critical-binary")).unwrap();
        assert!(l.critical);
        let ex = l.distribution.exact_prefix(10).unwrap();
        for (j, w) in ex.iter().enumerate() {
            assert_eq!(*w, rat(1, 1 << (j + 1)));
        }
        assert!((l.mean - 1.0).abs() < 1e-15);
        let num: f64 = l.distribution.probs().iter().enumerate().map(|(k, w)| k as f64 * w).sum();
        assert!((num - 1.0).abs() < 1e-10);
    }

    #[test]
    fn leaf_offspring_flags_noncritical() {
        let l = leaf_offspring(&preset("sub-binary")).unwrap();
        assert!(!l.critical);
        assert!((l.mean - (0.8 - 0.4) / 0.6).abs() < 1e-15);
    }
}
