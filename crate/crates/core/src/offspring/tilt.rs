use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Criticality, OffspringDistribution, OffspringError, DEFAULT_TRUNCATE_TAIL, MAX_TABLE_LEN};
use crate::functional::DegreeSet;
use crate::weight::{convergents, rational_from_f64, Rational, Weight};

/// `Σ θ^{k-1} p(k)` and `Σ k θ^{k-1} p(k)` split by membership in `𝒜`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltSums {
    pub in_mass: f64,
    pub out_mass: f64,
    pub in_mean: f64,
    pub out_mean: f64,
}

impl TiltSums {
    /// `c_𝒜(θ)`.
    pub fn constant(&self) -> f64 {
        (1.0 - self.out_mass) / self.in_mass
    }

    /// `m^𝒜(θ)`, the mean of `p_θ^𝒜`.
    pub fn tilted_mean(&self) -> f64 {
        self.out_mean + self.constant() * self.in_mean
    }

    pub fn feasible(&self) -> bool {
        self.in_mass > 0.0 && self.out_mass <= 1.0 && self.in_mass.is_finite() && self.out_mass.is_finite()
    }
}

fn term(p: &OffspringDistribution, theta: f64, k: usize) -> f64 {
    p.prob(k) * theta.powf(k as f64 - 1.0)
}

/// The sums at `θ`, or `None` when one of them diverges.
pub fn tilt_sums(p: &OffspringDistribution, set: &DegreeSet, theta: f64) -> Option<TiltSums> {
    if !(theta > 0.0) {
        return None;
    }
    if let Some(max) = p.support_max() {
        let mut s = TiltSums { in_mass: 0.0, out_mass: 0.0, in_mean: 0.0, out_mean: 0.0 };
        let mut pw = theta.recip();
        for k in 0..=max {
            let pk = p.prob(k);
            let t = if pk == 0.0 { 0.0 } else { pk * pw };
            pw *= theta;
            if set.contains(k as u32) {
                s.in_mass += t;
                s.in_mean += k as f64 * t;
            } else {
                s.out_mass += t;
                s.out_mean += k as f64 * t;
            }
        }
        return Some(s);
    }
    let (g, dg) = p.gen_fn(theta).ok()?;
    if !(g.is_finite() && dg.is_finite()) {
        return None;
    }
    let total_mass = g / theta;
    let (listed, listed_is_in): (Vec<usize>, bool) = match set {
        DegreeSet::Finite(s) => (s.iter().map(|&k| k as usize).collect(), true),
        DegreeSet::AtLeast(j) => ((0..*j as usize).collect(), false),
    };
    let mut mass = 0.0;
    let mut mean = 0.0;
    for k in listed {
        let t = term(p, theta, k);
        mass += t;
        mean += k as f64 * t;
    }
    let rest_mass = (total_mass - mass).max(0.0);
    let rest_mean = (dg - mean).max(0.0);
    Some(if listed_is_in {
        TiltSums { in_mass: mass, in_mean: mean, out_mass: rest_mass, out_mean: rest_mean }
    } else {
        TiltSums { in_mass: rest_mass, in_mean: rest_mean, out_mass: mass, out_mean: mean }
    })
}

fn p_of_set(p: &OffspringDistribution, set: &DegreeSet) -> f64 {
    tilt_sums(p, set, 1.0).map_or(0.0, |s| s.in_mass)
}

/// `p_θ^𝒜`. Finite exact inputs are tilted exactly (θ is read as the exact
/// value of the float).
pub fn tilt(p: &OffspringDistribution, set: &DegreeSet, theta: f64) -> Result<OffspringDistribution, OffspringError> {
    if p.exact_support().is_some() {
        if let Some(t) = rational_from_f64(theta) {
            return tilt_exact(p, set, &t);
        }
    }
    if p_of_set(p, set) <= 0.0 {
        return Err(OffspringError::EmptyIntersection);
    }
    let sums = tilt_sums(p, set, theta).ok_or(OffspringError::ThetaOutsideInterval(theta))?;
    if !sums.feasible() {
        return Err(OffspringError::ThetaOutsideInterval(theta));
    }
    let c = sums.constant();
    let weight = |k: usize| {
        let t = term(p, theta, k);
        if set.contains(k as u32) {
            c * t
        } else {
            t
        }
    };
    if let Some(max) = p.support_max() {
        let w: Vec<f64> = (0..=max).map(weight).collect();
        return OffspringDistribution::from_f64(w);
    }
    let mut probs = Vec::new();
    let mut acc = 0.0;
    let mut k = 0;
    while k < MAX_TABLE_LEN {
        let w = weight(k);
        probs.push(w);
        acc += w;
        k += 1;
        if k >= p.probs().len() && 1.0 - acc < DEFAULT_TRUNCATE_TAIL {
            break;
        }
    }
    Ok(OffspringDistribution::table(
        probs,
        None,
        (1.0 - acc).max(0.0),
        sums.tilted_mean(),
        p.radius() / theta,
    ))
}

/// `p_θ^𝒜` in exact arithmetic (finite support).
pub fn tilt_exact(p: &OffspringDistribution, set: &DegreeSet, theta: &Rational) -> Result<OffspringDistribution, OffspringError> {
    let ex = p
        .exact_support()
        .ok_or_else(|| OffspringError::NotExact("exact tilting needs a finite exact pmf".into()))?;
    let theta_f = theta.to_f64().unwrap_or(f64::NAN);
    if !theta.is_positive() {
        return Err(OffspringError::ThetaOutsideInterval(theta_f));
    }
    let terms = exact_terms(ex, theta);
    let (mut in_mass, mut out_mass) = (Rational::zero(), Rational::zero());
    let mut in_prob = Rational::zero();
    for (k, t) in terms.iter().enumerate() {
        if set.contains(k as u32) {
            in_mass += t;
            in_prob += &ex[k];
        } else {
            out_mass += t;
        }
    }
    if in_prob.is_zero() {
        return Err(OffspringError::EmptyIntersection);
    }
    if out_mass > Rational::one() {
        return Err(OffspringError::ThetaOutsideInterval(theta_f));
    }
    let c = (Rational::one() - out_mass) / in_mass;
    let w = terms
        .into_iter()
        .enumerate()
        .map(|(k, t)| if set.contains(k as u32) { t * &c } else { t })
        .collect();
    OffspringDistribution::from_rationals(w)
}

fn exact_terms(ex: &[Rational], theta: &Rational) -> Vec<Rational> {
    let mut pw = Rational::one() / theta;
    ex.iter()
        .map(|pk| {
            let t = pk * &pw;
            pw = &pw * theta;
            t
        })
        .collect()
}

fn exact_tilted_mean(ex: &[Rational], set: &DegreeSet, theta: &Rational) -> Option<Rational> {
    let terms = exact_terms(ex, theta);
    let (mut im, mut om, mut imean, mut omean) =
        (Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero());
    for (k, t) in terms.iter().enumerate() {
        let kt = t * Rational::from_u64(k as u64);
        if set.contains(k as u32) {
            im += t;
            imean += kt;
        } else {
            om += t;
            omean += kt;
        }
    }
    if im.is_zero() || om > Rational::one() {
        return None;
    }
    Some(omean + (Rational::one() - om) / im * imean)
}

/// Which case of the radius criterion applies.
#[derive(Debug, Clone, PartialEq)]
pub enum RadiusCase {
    /// `ρ = +∞`: generic for every `𝒜`.
    InfiniteRadius,
    /// `ρ < ∞` and `g'(ρ) ≥ 1`: generic for every `𝒜`.
    SteepAtRadius,
    /// `ρ = 1`: no exponential moment, non-generic for every `𝒜`.
    NoExponentialMoment,
    /// `1 < ρ < ∞`, `g'(ρ) < 1`: non-generic iff
    /// `E[Y | Y ∈ 𝒜] < (ρ − ρ g'(ρ)) / (ρ − g(ρ))` with `Y ~ p_ρ^ℕ`.
    Threshold { conditional_mean: f64, threshold: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Genericity {
    Generic { theta_c: f64, exact: Option<Rational> },
    NonGeneric { theta_star: f64 },
}

#[derive(Debug, Clone)]
pub struct TiltReport {
    pub set: DegreeSet,
    /// `inf I_𝒜`.
    pub interval_inf: f64,
    /// `sup I_𝒜` (possibly `+∞`).
    pub interval_sup: f64,
    pub sup_attained: bool,
    pub radius_case: RadiusCase,
    pub classification: Genericity,
    /// `p_{θ_c}^𝒜` in the generic case, `p_{θ*}^𝒜` otherwise.
    pub distribution: OffspringDistribution,
}

impl TiltReport {
    pub fn is_generic(&self) -> bool {
        matches!(self.classification, Genericity::Generic { .. })
    }
}

const THETA_BIG: f64 = 1e12;

fn bisect<F: Fn(f64) -> bool>(mut good: f64, mut bad: f64, pred: F) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (good + bad);
        if mid == good || mid == bad || (good - bad).abs() <= 1e-15 * good.abs().max(bad.abs()) {
            break;
        }
        if pred(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

fn radius_case(p: &OffspringDistribution, set: &DegreeSet) -> RadiusCase {
    let rho = p.radius();
    if rho.is_infinite() {
        return RadiusCase::InfiniteRadius;
    }
    let (g, dg) = match p.gen_fn(rho) {
        Ok(v) => v,
        Err(_) => return RadiusCase::SteepAtRadius,
    };
    if !(dg < 1.0) {
        return RadiusCase::SteepAtRadius;
    }
    if rho == 1.0 {
        return RadiusCase::NoExponentialMoment;
    }
    let (mass, mean) = match tilt_sums(p, set, rho) {
        Some(s) => (s.in_mass * rho, s.in_mean * rho),
        None => (0.0, 0.0),
    };
    RadiusCase::Threshold {
        conditional_mean: mean / mass,
        threshold: (rho - rho * dg) / (rho - g),
    }
}

/// Decides whether `θ ↦ m^𝒜(θ)` reaches 1 on `I_𝒜` and returns the
/// corresponding critical (or extremal) tilt.
pub fn genericity(p: &OffspringDistribution, set: &DegreeSet) -> Result<TiltReport, OffspringError> {
    p.require_nondegenerate()?;
    if p.criticality() == Criticality::Super {
        return Err(OffspringError::NotSubCritical(p.mean()));
    }
    if p_of_set(p, set) <= 0.0 {
        return Err(OffspringError::EmptyIntersection);
    }
    let feasible = |t: f64| tilt_sums(p, set, t).is_some_and(|s| s.feasible());
    let mean_at = |t: f64| tilt_sums(p, set, t).filter(|s| s.feasible()).map(|s| s.tilted_mean());

    let interval_inf = if feasible(f64::MIN_POSITIVE) {
        0.0
    } else {
        bisect(1.0, 0.0, feasible)
    };
    let rho = p.radius();
    let (interval_sup, sup_attained) = if rho.is_finite() {
        if feasible(rho) {
            (rho, true)
        } else {
            let s = bisect(1.0, rho, feasible);
            if rho - s <= 1e-12 * rho {
                (rho, false)
            } else {
                (s, true)
            }
        }
    } else {
        let mut hi = 2.0;
        while hi < THETA_BIG && feasible(hi) {
            hi *= 2.0;
        }
        if feasible(hi) {
            (f64::INFINITY, false)
        } else {
            (bisect(hi / 2.0, hi, feasible), true)
        }
    };
    let case = radius_case(p, set);
    let generic = match &case {
        RadiusCase::InfiniteRadius | RadiusCase::SteepAtRadius => true,
        RadiusCase::NoExponentialMoment => false,
        RadiusCase::Threshold { conditional_mean, threshold } => conditional_mean >= threshold,
    };

    if p.criticality() == Criticality::Critical {
        return Ok(TiltReport {
            set: set.clone(),
            interval_inf,
            interval_sup,
            sup_attained,
            radius_case: case,
            classification: Genericity::Generic { theta_c: 1.0, exact: Some(Rational::one()) },
            distribution: p.clone(),
        });
    }

    if generic {
        let hi = find_upper(interval_sup, sup_attained, &mean_at).ok_or_else(|| {
            OffspringError::NotExact(format!(
                "tilted mean stays below 1 on the tilting interval for {set}"
            ))
        })?;
        let theta = bisect(1.0, hi, |t| mean_at(t).is_some_and(|m| m < 1.0));
        let theta_hi = hi.min(bisect_upper(theta, hi, &mean_at));
        let theta_c = 0.5 * (theta + theta_hi);
        let exact = p.exact_support().and_then(|ex| {
            convergents(theta_c, 1_000_000_000)
                .into_iter()
                .rev()
                .find(|c| exact_tilted_mean(ex, set, c).is_some_and(|m| m.is_one()))
        });
        let distribution = match &exact {
            Some(t) => tilt_exact(p, set, t)?,
            None => tilt(p, set, theta_c)?,
        };
        let theta_c = exact.as_ref().and_then(|e| e.to_f64()).unwrap_or(theta_c);
        Ok(TiltReport {
            set: set.clone(),
            interval_inf,
            interval_sup,
            sup_attained,
            radius_case: case,
            classification: Genericity::Generic { theta_c, exact },
            distribution,
        })
    } else {
        let theta_star = interval_sup;
        let distribution = tilt(p, set, theta_star)?;
        Ok(TiltReport {
            set: set.clone(),
            interval_inf,
            interval_sup,
            sup_attained,
            radius_case: case,
            classification: Genericity::NonGeneric { theta_star },
            distribution,
        })
    }
}

/// A point of `I_𝒜` where `m^𝒜 ≥ 1`.
fn find_upper<F: Fn(f64) -> Option<f64>>(sup: f64, attained: bool, mean_at: &F) -> Option<f64> {
    if sup.is_infinite() {
        let mut t = 2.0;
        while t < THETA_BIG {
            if mean_at(t).is_some_and(|m| m >= 1.0) {
                return Some(t);
            }
            t *= 2.0;
        }
        return None;
    }
    if attained && mean_at(sup).is_some_and(|m| m >= 1.0) {
        return Some(sup);
    }
    let mut gap = (sup - 1.0) / 2.0;
    for _ in 0..200 {
        let t = sup - gap;
        if mean_at(t).is_some_and(|m| m >= 1.0) {
            return Some(t);
        }
        gap /= 2.0;
        if gap == 0.0 {
            break;
        }
    }
    None
}

fn bisect_upper<F: Fn(f64) -> Option<f64>>(lo: f64, hi: f64, mean_at: &F) -> f64 {
    bisect(hi, lo, |t| mean_at(t).is_some_and(|m| m >= 1.0))
}
