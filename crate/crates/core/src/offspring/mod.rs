//! Offspring distributions and their algebra.

mod derive;
mod special;
mod tilt;

pub use derive::{
    condensation_offspring, conjugate, extinction_probability, leaf_offspring, size_biased,
    survivor_joint, DegenerateCase, ExtendedOffspring, Extinction, JointRootLaw, LeafOffspring,
};
pub use tilt::{genericity, tilt, tilt_exact, tilt_sums, Genericity, RadiusCase, TiltReport, TiltSums};

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::weight::{parse_rational, rational_to_string, Rational, Weight};

pub const DEFAULT_TRUNCATE_TAIL: f64 = 1e-14;
/// Longest table kept for a parametric family.
pub const MAX_TABLE_LEN: usize = 1 << 20;
const FLOAT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OffspringError {
    #[error("invalid distribution: {0}")]
    InvalidPmf(String),
    #[error("argument {0} outside the domain of the generating function")]
    OutOfDomain(f64),
    #[error("degenerate distribution ({case:?}): extinction probability {q}")]
    DegenerateDistribution { case: DegenerateCase, q: u8 },
    #[error("distribution violates 0<p(0)<1 and p(0)+p(1)<1")]
    HypothesisViolated,
    #[error("distribution is not super-critical (mean {0})")]
    NotSuperCritical(f64),
    #[error("distribution is not sub-critical (mean {0})")]
    NotSubCritical(f64),
    #[error("distribution is not critical (mean {0})")]
    NotCritical(f64),
    #[error("mean is zero or infinite")]
    ZeroOrInfiniteMean,
    #[error("theta = {0} lies outside the tilting interval")]
    ThetaOutsideInterval(f64),
    #[error("p(A) = 0 for the requested degree set")]
    EmptyIntersection,
    #[error("exact arithmetic unavailable: {0}")]
    NotExact(String),
    #[error("unknown preset or malformed distribution spec: {0}")]
    UnknownSpec(String),
}

/// How the distribution was specified.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Finite,
    Geometric { a: f64 },
    Poisson { lambda: f64 },
    /// `p(k) = scale · k^{-beta} · radius^{-k}` for `k ≥ 1`.
    PowerLaw { beta: f64, scale: f64, radius: f64 },
    /// Derived numerically from another distribution and truncated.
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criticality {
    Sub,
    Critical,
    Super,
}

/// A probability distribution on `ℕ`.
#[derive(Debug, Clone)]
pub struct OffspringDistribution {
    family: Family,
    probs: Vec<f64>,
    exact: Option<Vec<Rational>>,
    exact_complete: bool,
    geometric_exact: Option<Rational>,
    tail_bound: f64,
    mean: f64,
    period: u32,
    radius: f64,
    cdf: Vec<f64>,
}

impl PartialEq for OffspringDistribution {
    fn eq(&self, other: &Self) -> bool {
        match (self.exact_complete, other.exact_complete) {
            (true, true) => self.exact == other.exact,
            _ => {
                self.family == other.family
                    && self.probs == other.probs
                    && self.tail_bound == other.tail_bound
            }
        }
    }
}

fn trim_zeros<T: Zero>(v: &mut Vec<T>) {
    while v.len() > 1 && v.last().is_some_and(|x| x.is_zero()) {
        v.pop();
    }
}

fn support_period(probs: &[f64]) -> u32 {
    probs
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &p)| p > 0.0)
        .fold(0u32, |g, (k, _)| g.gcd(&(k as u32)))
}

impl OffspringDistribution {
    /// Finite support, exact rational weights summing to one.
    pub fn from_rationals(mut weights: Vec<Rational>) -> Result<Self, OffspringError> {
        if weights.is_empty() {
            return Err(OffspringError::InvalidPmf("empty support".into()));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(OffspringError::InvalidPmf("negative probability".into()));
        }
        let total: Rational = weights.iter().cloned().sum();
        if !total.is_one() {
            return Err(OffspringError::InvalidPmf(format!(
                "probabilities sum to {}",
                rational_to_string(&total)
            )));
        }
        trim_zeros(&mut weights);
        let probs: Vec<f64> = weights.iter().map(Weight::approx).collect();
        let mean_exact: Rational = weights
            .iter()
            .enumerate()
            .map(|(k, w)| w * Rational::from_u64(k as u64))
            .sum();
        let mut d = Self::finite_float_unchecked(probs);
        d.mean = mean_exact.to_f64().unwrap_or(f64::NAN);
        d.exact = Some(weights);
        d.exact_complete = true;
        Ok(d)
    }

    /// Finite support, floating weights summing to one within `1e-12`.
    pub fn from_f64(mut probs: Vec<f64>) -> Result<Self, OffspringError> {
        if probs.is_empty() {
            return Err(OffspringError::InvalidPmf("empty support".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(OffspringError::InvalidPmf("negative or non-finite probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > FLOAT_SUM_TOL {
            return Err(OffspringError::InvalidPmf(format!("probabilities sum to {total}")));
        }
        trim_zeros(&mut probs);
        Ok(Self::finite_float_unchecked(probs))
    }

    fn finite_float_unchecked(probs: Vec<f64>) -> Self {
        let mean = probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        Self::assemble(Family::Finite, probs, 0.0, mean, f64::INFINITY)
    }

    fn assemble(family: Family, probs: Vec<f64>, tail_bound: f64, mean: f64, radius: f64) -> Self {
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cdf.push(acc);
        }
        let period = support_period(&probs);
        OffspringDistribution {
            family,
            probs,
            exact: None,
            exact_complete: false,
            geometric_exact: None,
            tail_bound,
            mean,
            period,
            radius,
            cdf,
        }
    }

    /// Truncated numerical table produced by a derivation.
    pub(crate) fn table(
        probs: Vec<f64>,
        exact_prefix: Option<Vec<Rational>>,
        tail_bound: f64,
        mean: f64,
        radius: f64,
    ) -> Self {
        let mut d = Self::assemble(Family::Table, probs, tail_bound, mean, radius);
        d.exact = exact_prefix;
        d
    }

    /// `p(k) = (1-a) a^k`.
    pub fn geometric(a: f64) -> Result<Self, OffspringError> {
        Self::geometric_with_tail(a, DEFAULT_TRUNCATE_TAIL)
    }

    pub fn geometric_with_tail(a: f64, truncate_tail: f64) -> Result<Self, OffspringError> {
        if !(a > 0.0 && a < 1.0) {
            return Err(OffspringError::InvalidPmf(format!("geometric parameter {a} not in (0,1)")));
        }
        let len = ((truncate_tail.ln() / a.ln()).ceil() as usize).clamp(1, MAX_TABLE_LEN);
        let probs: Vec<f64> = (0..len).map(|k| (1.0 - a) * a.powi(k as i32)).collect();
        let tail = a.powi(len as i32);
        let mut d = Self::assemble(Family::Geometric { a }, probs, tail, a / (1.0 - a), 1.0 / a);
        d.period = 1;
        Ok(d)
    }

    /// Geometric law with an exact rational parameter.
    pub fn geometric_exact(a: Rational) -> Result<Self, OffspringError> {
        let af = a.to_f64().unwrap_or(f64::NAN);
        let mut d = Self::geometric(af)?;
        d.geometric_exact = Some(a);
        Ok(d)
    }

    pub fn poisson(lambda: f64) -> Result<Self, OffspringError> {
        Self::poisson_with_tail(lambda, DEFAULT_TRUNCATE_TAIL)
    }

    pub fn poisson_with_tail(lambda: f64, truncate_tail: f64) -> Result<Self, OffspringError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(OffspringError::InvalidPmf(format!("poisson rate {lambda} must be positive")));
        }
        let mut probs = Vec::new();
        let mut term = (-lambda).exp();
        let mut k = 0usize;
        loop {
            probs.push(term);
            k += 1;
            term *= lambda / k as f64;
            let ratio = lambda / (k as f64 + 1.0);
            if (ratio < 1.0 && term / (1.0 - ratio) < truncate_tail) || k >= MAX_TABLE_LEN {
                break;
            }
        }
        let ratio = lambda / (k as f64 + 1.0);
        let tail = if ratio < 1.0 { term / (1.0 - ratio) } else { 1.0 };
        let mut d = Self::assemble(Family::Poisson { lambda }, probs, tail, lambda, f64::INFINITY);
        d.period = 1;
        Ok(d)
    }

    /// `p(k) = scale · k^{-beta} · radius^{-k}` for `k ≥ 1`, `p(0)` the
    /// remaining mass. `radius = 1` gives a pure power law without
    /// exponential moments.
    pub fn power_law(beta: f64, scale: f64, radius: f64) -> Result<Self, OffspringError> {
        if !(beta > 1.0 && scale > 0.0 && radius >= 1.0) {
            return Err(OffspringError::InvalidPmf(
                "power law needs beta > 1, scale > 0, radius ≥ 1".into(),
            ));
        }
        let body = scale * special::polylog(beta, 1.0 / radius);
        let p0 = 1.0 - body;
        if !(p0 > 0.0 && p0 < 1.0) {
            return Err(OffspringError::InvalidPmf(format!("power law leaves p(0) = {p0}")));
        }
        let mean = if radius == 1.0 && beta <= 2.0 {
            f64::INFINITY
        } else {
            scale * special::polylog(beta - 1.0, 1.0 / radius)
        };
        let mut probs = vec![p0];
        let mut k = 1usize;
        let mut acc = p0;
        while k < MAX_TABLE_LEN {
            let t = scale * (k as f64).powf(-beta) * radius.powf(-(k as f64));
            probs.push(t);
            acc += t;
            k += 1;
            if 1.0 - acc < DEFAULT_TRUNCATE_TAIL * 0.5 && k > 8 {
                break;
            }
        }
        let tail = if radius == 1.0 {
            scale * special::hurwitz_tail(beta, k as f64)
        } else {
            scale * (k as f64).powf(-beta) * radius.powf(-(k as f64)) / (1.0 - 1.0 / radius)
        };
        let mut d = Self::assemble(Family::PowerLaw { beta, scale, radius }, probs, tail, mean, radius);
        d.period = 1;
        Ok(d)
    }

    /// Named presets: `critical-binary`, `sub-binary`, `super-binary`,
    /// `aperiodic-critical` and `geom:<a>`.
    pub fn preset(name: &str) -> Result<Self, OffspringError> {
        let r = |n: i64, d: i64| crate::weight::rat(n, d);
        let zero = Rational::zero;
        match name {
            "critical-binary" => Self::from_rationals(vec![r(1, 2), zero(), r(1, 2)]),
            "sub-binary" => Self::from_rationals(vec![r(3, 5), zero(), r(2, 5)]),
            "super-binary" => Self::from_rationals(vec![r(1, 4), zero(), r(3, 4)]),
            "aperiodic-critical" => Self::from_rationals(vec![r(1, 4), r(1, 2), r(1, 4)]),
            _ => match name.strip_prefix("geom:") {
                Some(a) => {
                    let exact = parse_rational(a)
                        .ok_or_else(|| OffspringError::UnknownSpec(name.into()))?;
                    Self::geometric_exact(exact)
                }
                None => Err(OffspringError::UnknownSpec(name.into())),
            },
        }
    }

    /// A preset name, inline JSON, or a path to a JSON file.
    pub fn parse_spec(spec: &str) -> Result<Self, OffspringError> {
        let trimmed = spec.trim();
        if trimmed.starts_with('{') {
            return Self::from_json(trimmed);
        }
        match Self::preset(trimmed) {
            Ok(d) => Ok(d),
            Err(e) => match std::fs::read_to_string(trimmed) {
                Ok(text) => Self::from_json(&text),
                Err(_) => Err(e),
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self, OffspringError> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| OffspringError::UnknownSpec(e.to_string()))?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self, OffspringError> {
        let obj = v
            .as_object()
            .ok_or_else(|| OffspringError::UnknownSpec("expected a JSON object".into()))?;
        let tail = match obj.get("truncate_tail") {
            Some(t) => t
                .as_f64()
                .filter(|t| *t > 0.0 && *t < 1.0)
                .ok_or_else(|| OffspringError::UnknownSpec("bad truncate_tail".into()))?,
            None => DEFAULT_TRUNCATE_TAIL,
        };
        let num = |o: &Map<String, Value>, key: &str| -> Result<(f64, Option<Rational>), OffspringError> {
            let raw = o
                .get(key)
                .ok_or_else(|| OffspringError::UnknownSpec(format!("missing '{key}'")))?;
            let exact = json_rational(raw);
            let f = exact
                .as_ref()
                .and_then(|r| r.to_f64())
                .or_else(|| raw.as_f64())
                .ok_or_else(|| OffspringError::UnknownSpec(format!("'{key}' is not a number")))?;
            Ok((f, exact))
        };
        if let Some(pmf) = obj.get("pmf") {
            let pmf = pmf
                .as_object()
                .ok_or_else(|| OffspringError::UnknownSpec("'pmf' must be an object".into()))?;
            let mut exact: BTreeMap<usize, Rational> = BTreeMap::new();
            let mut floats: BTreeMap<usize, f64> = BTreeMap::new();
            let mut all_exact = true;
            for (k, w) in pmf {
                let k: usize = k
                    .trim()
                    .parse()
                    .map_err(|_| OffspringError::InvalidPmf(format!("bad support point '{k}'")))?;
                match json_rational(w) {
                    Some(r) => {
                        floats.insert(k, r.to_f64().unwrap_or(f64::NAN));
                        exact.insert(k, r);
                    }
                    None => {
                        all_exact = false;
                        let f = w.as_f64().ok_or_else(|| {
                            OffspringError::InvalidPmf(format!("bad probability for {k}"))
                        })?;
                        floats.insert(k, f);
                    }
                }
            }
            let len = floats.keys().next_back().map_or(0, |k| k + 1);
            if all_exact {
                let mut w = vec![Rational::zero(); len];
                for (k, r) in exact {
                    w[k] = r;
                }
                let total: Rational = w.iter().cloned().sum();
                if total.is_one() {
                    return Self::from_rationals(w);
                }
            }
            let mut w = vec![0.0; len];
            for (k, f) in floats {
                w[k] = f;
            }
            return Self::from_f64(w);
        }
        if let Some(g) = obj.get("geometric").and_then(Value::as_object) {
            let (a, exact) = num(g, "a")?;
            let mut d = Self::geometric_with_tail(a, tail)?;
            if let Some(e) = exact {
                d.geometric_exact = Some(e);
            }
            return Ok(d);
        }
        if let Some(g) = obj.get("poisson").and_then(Value::as_object) {
            let (lambda, _) = num(g, "lambda")?;
            return Self::poisson_with_tail(lambda, tail);
        }
        if let Some(g) = obj.get("power_law").and_then(Value::as_object) {
            let (beta, _) = num(g, "beta")?;
            let (scale, _) = num(g, "scale")?;
            let radius = if g.contains_key("radius") { num(g, "radius")?.0 } else { 1.0 };
            return Self::power_law(beta, scale, radius);
        }
        Err(OffspringError::UnknownSpec(
            "expected one of pmf, geometric, poisson, power_law".into(),
        ))
    }

    pub fn to_json(&self) -> Value {
        match &self.family {
            Family::Finite => {
                let mut m = Map::new();
                match (&self.exact, self.exact_complete) {
                    (Some(ex), true) => {
                        for (k, w) in ex.iter().enumerate() {
                            if !w.is_zero() {
                                m.insert(k.to_string(), Value::String(rational_to_string(w)));
                            }
                        }
                    }
                    _ => {
                        for (k, &w) in self.probs.iter().enumerate() {
                            if w > 0.0 {
                                m.insert(k.to_string(), json!(w));
                            }
                        }
                    }
                }
                json!({ "pmf": m })
            }
            Family::Geometric { a } => match &self.geometric_exact {
                Some(e) if e.to_f64() != Some(*a) || !e.denom().is_one() => {
                    json!({ "geometric": { "a": rational_to_string(e) } })
                }
                _ => json!({ "geometric": { "a": a } }),
            },
            Family::Poisson { lambda } => json!({ "poisson": { "lambda": lambda } }),
            Family::PowerLaw { beta, scale, radius } => {
                json!({ "power_law": { "beta": beta, "scale": scale, "radius": radius } })
            }
            Family::Table => {
                let mut m = Map::new();
                for (k, &w) in self.probs.iter().enumerate() {
                    if w > 0.0 {
                        let v = match self.exact.as_ref().and_then(|e| e.get(k)) {
                            Some(r) => Value::String(rational_to_string(r)),
                            None => json!(w),
                        };
                        m.insert(k.to_string(), v);
                    }
                }
                json!({ "pmf": m, "tail_bound": self.tail_bound })
            }
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// `p(k)`.
    pub fn prob(&self, k: usize) -> f64 {
        if let Some(&p) = self.probs.get(k) {
            return p;
        }
        match self.family {
            Family::Finite | Family::Table => 0.0,
            Family::Geometric { a } => (1.0 - a) * a.powf(k as f64),
            Family::Poisson { lambda } => {
                (-lambda + k as f64 * lambda.ln() - special::ln_factorial(k)).exp()
            }
            Family::PowerLaw { beta, scale, radius } => {
                scale * (k as f64).powf(-beta) * radius.powf(-(k as f64))
            }
        }
    }

    /// Stored table `p(0), …, p(len-1)`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Mass outside the stored table (zero for finite support).
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Largest support point when the support is finite.
    pub fn support_max(&self) -> Option<usize> {
        match self.family {
            Family::Finite => Some(self.probs.len() - 1),
            _ => None,
        }
    }

    /// `p(0..len)` in exact arithmetic, when available.
    pub fn exact_prefix(&self, len: usize) -> Option<Vec<Rational>> {
        if let (Some(ex), true) = (&self.exact, self.exact_complete) {
            let mut v: Vec<Rational> = ex.iter().take(len).cloned().collect();
            v.resize(len, Rational::zero());
            return Some(v);
        }
        if let Some(a) = &self.geometric_exact {
            let one_minus = Rational::one() - a;
            let mut v = Vec::with_capacity(len);
            let mut pw = Rational::one();
            for _ in 0..len {
                v.push(&one_minus * &pw);
                pw = &pw * a;
            }
            return Some(v);
        }
        match &self.exact {
            Some(ex) if ex.len() >= len => Some(ex[..len].to_vec()),
            _ => None,
        }
    }

    /// Whole support in exact arithmetic (finite support only).
    pub fn exact_support(&self) -> Option<&[Rational]> {
        match (&self.exact, self.exact_complete) {
            (Some(ex), true) => Some(ex),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact_complete || self.geometric_exact.is_some()
    }

    pub fn geometric_parameter_exact(&self) -> Option<&Rational> {
        self.geometric_exact.as_ref()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn exact_mean(&self) -> Option<Rational> {
        if let Some(ex) = self.exact_support() {
            return Some(
                ex.iter()
                    .enumerate()
                    .map(|(k, w)| w * Rational::from_u64(k as u64))
                    .sum(),
            );
        }
        self.geometric_exact
            .as_ref()
            .map(|a| a / (Rational::one() - a))
    }

    /// `gcd{k ≥ 1 : p(k) > 0}`; zero when `p = δ_0`.
    pub fn period(&self) -> u32 {
        self.period
    }

    /// Radius of convergence of the generating function.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `0 < p(0) < 1` and `p(0) + p(1) < 1`.
    pub fn is_nondegenerate(&self) -> bool {
        if let Some(ex) = self.exact_support() {
            let p0 = ex[0].clone();
            let p1 = ex.get(1).cloned().unwrap_or_else(Rational::zero);
            return p0.is_positive() && p0 < Rational::one() && p0 + p1 < Rational::one();
        }
        let p0 = self.prob(0);
        p0 > 0.0 && p0 < 1.0 && p0 + self.prob(1) < 1.0
    }

    pub fn require_nondegenerate(&self) -> Result<(), OffspringError> {
        if self.is_nondegenerate() {
            Ok(())
        } else {
            Err(OffspringError::HypothesisViolated)
        }
    }

    /// Exact when the mean is known exactly, else within `1e-12`.
    pub fn criticality(&self) -> Criticality {
        if let Some(m) = self.exact_mean() {
            return match m.cmp(&Rational::one()) {
                std::cmp::Ordering::Less => Criticality::Sub,
                std::cmp::Ordering::Equal => Criticality::Critical,
                std::cmp::Ordering::Greater => Criticality::Super,
            };
        }
        if (self.mean - 1.0).abs() <= 1e-12 {
            Criticality::Critical
        } else if self.mean < 1.0 {
            Criticality::Sub
        } else {
            Criticality::Super
        }
    }

    /// `(g(r), g'(r))`. The argument must lie in `[0, ρ)`; `r = ρ` is
    /// accepted for power laws, where the series may still converge.
    pub fn gen_fn(&self, r: f64) -> Result<(f64, f64), OffspringError> {
        if !(r >= 0.0) || r > self.radius || (r == self.radius && !self.converges_at_radius()) {
            return Err(OffspringError::OutOfDomain(r));
        }
        match self.family {
            Family::Finite => {
                let g = self.probs.iter().rev().fold(0.0, |acc, p| acc * r + p);
                let dg = self
                    .probs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .rev()
                    .fold(0.0, |acc, (k, p)| acc * r + k as f64 * p);
                Ok((g, dg))
            }
            Family::Geometric { a } => {
                let den = 1.0 - a * r;
                Ok(((1.0 - a) / den, (1.0 - a) * a / (den * den)))
            }
            Family::Poisson { lambda } => {
                let e = (lambda * (r - 1.0)).exp();
                Ok((e, lambda * e))
            }
            Family::PowerLaw { beta, scale, radius } => {
                let x = r / radius;
                let g = self.probs[0] + scale * special::polylog(beta, x);
                let dg = if r == 0.0 {
                    scale / radius
                } else if x == 1.0 && beta <= 2.0 {
                    f64::INFINITY
                } else {
                    scale * special::polylog(beta - 1.0, x) / r
                };
                Ok((g, dg))
            }
            Family::Table => {
                if r > 1.0 && self.tail_bound > 0.0 {
                    return Err(OffspringError::OutOfDomain(r));
                }
                let g = self.probs.iter().rev().fold(0.0, |acc, p| acc * r + p);
                let dg = self
                    .probs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .rev()
                    .fold(0.0, |acc, (k, p)| acc * r + k as f64 * p);
                Ok((g, dg))
            }
        }
    }

    fn converges_at_radius(&self) -> bool {
        matches!(self.family, Family::PowerLaw { .. })
    }

    /// `(g(r), g'(r))` in exact arithmetic.
    pub fn gen_fn_exact(&self, r: &Rational) -> Result<(Rational, Rational), OffspringError> {
        if r.is_negative() {
            return Err(OffspringError::OutOfDomain(r.to_f64().unwrap_or(f64::NAN)));
        }
        if let Some(ex) = self.exact_support() {
            let g = ex
                .iter()
                .rev()
                .fold(Rational::zero(), |acc, p| acc * r + p);
            let dg = ex
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(Rational::zero(), |acc, (k, p)| {
                    acc * r + p * Rational::from_u64(k as u64)
                });
            return Ok((g, dg));
        }
        if let Some(a) = &self.geometric_exact {
            let den = Rational::one() - a * r;
            if !den.is_positive() {
                return Err(OffspringError::OutOfDomain(r.to_f64().unwrap_or(f64::NAN)));
            }
            let one_minus = Rational::one() - a;
            let g = &one_minus / &den;
            let dg = &one_minus * a / (&den * &den);
            return Ok((g, dg));
        }
        Err(OffspringError::NotExact("generating function needs an exact pmf".into()))
    }

    /// Draws one value by inversion.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.gen();
        if let Family::Geometric { a } = self.family {
            return ((1.0 - u).ln() / a.ln()).floor() as u32;
        }
        let idx = self.cdf.partition_point(|&c| c <= u);
        if idx < self.cdf.len() {
            return idx as u32;
        }
        let mut acc = *self.cdf.last().unwrap_or(&0.0);
        let mut k = self.cdf.len();
        if matches!(self.family, Family::Finite | Family::Table) {
            // rounding slack past the last support point
            return self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0) as u32;
        }
        loop {
            acc += self.prob(k);
            if acc > u || k >= 64 * MAX_TABLE_LEN {
                return k as u32;
            }
            k += 1;
        }
    }
}

impl fmt::Display for OffspringDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

fn json_rational(v: &Value) -> Option<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::rat;

    #[test]
    fn gen_fn_at_one() {
        for name in ["critical-binary", "sub-binary", "super-binary", "aperiodic-critical", "geom:0.6"] {
            let p = OffspringDistribution::preset(name).unwrap();
            let (g, dg) = p.gen_fn(1.0).unwrap();
            assert!((g - 1.0).abs() < 1e-14, "{name}");
            assert!((dg - p.mean()).abs() < 1e-12, "{name}");
        }
    }

    #[test]
    fn fixed_point_value_exact() {
        let p = OffspringDistribution::preset("super-binary").unwrap();
        let (g, _) = p.gen_fn_exact(&rat(1, 3)).unwrap();
        assert_eq!(g, rat(1, 3));
    }

    #[test]
    fn geometric_closed_form_vs_series() {
        let a = 0.6;
        let p = OffspringDistribution::geometric(a).unwrap();
        for r in [0.0, 0.3, 0.9, 1.2, 1.6] {
            let (g, _) = p.gen_fn(r).unwrap();
            let series: f64 = (0..4000).map(|k| (1.0 - a) * (a * r).powi(k)).sum();
            assert!((g - series).abs() < 1e-12 * g);
        }
        assert!(p.gen_fn(1.0 / a).is_err());
        assert!(p.tail_bound() < 1e-14);
    }

    #[test]
    fn poisson_table_and_closed_form() {
        let p = OffspringDistribution::poisson(1.3).unwrap();
        let total: f64 = p.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        let (g, _) = p.gen_fn(0.5).unwrap();
        let series: f64 = p.probs().iter().enumerate().map(|(k, w)| w * 0.5f64.powi(k as i32)).sum();
        assert!((g - series).abs() < 1e-13);
    }

    #[test]
    fn power_law_cached_facts() {
        let p = OffspringDistribution::power_law(3.0, 0.3, 1.0).unwrap();
        assert_eq!(p.radius(), 1.0);
        let zeta3 = 1.2020569031595942;
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((p.prob(0) - (1.0 - 0.3 * zeta3)).abs() < 1e-13);
        assert!((p.mean() - 0.3 * zeta2).abs() < 1e-13);
        let (g, dg) = p.gen_fn(1.0).unwrap();
        assert!((g - 1.0).abs() < 1e-12);
        assert!((dg - p.mean()).abs() < 1e-12);
    }

    #[test]
    fn json_parsing() {
        let p = OffspringDistribution::from_json(r#"{"pmf":{"0":"1/4","2":"3/4"}}"#).unwrap();
        assert_eq!(p, OffspringDistribution::preset("super-binary").unwrap());
        let p = OffspringDistribution::from_json(r#"{"pmf":{"0":0.25,"2":0.75}}"#).unwrap();
        assert!(p.exact_support().is_some());
        let g = OffspringDistribution::from_json(r#"{"geometric":{"a":0.6},"truncate_tail":1e-14}"#)
            .unwrap();
        assert_eq!(g.geometric_parameter_exact(), Some(&rat(3, 5)));
        assert!(OffspringDistribution::from_json(r#"{"pmf":{"0":"1/4","2":"1/4"}}"#).is_err());
        let back = OffspringDistribution::from_value(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn period_and_hypothesis() {
        let p = OffspringDistribution::preset("critical-binary").unwrap();
        assert_eq!(p.period(), 2);
        assert!(p.is_nondegenerate());
        let q = OffspringDistribution::preset("aperiodic-critical").unwrap();
        assert_eq!(q.period(), 1);
        let path = OffspringDistribution::from_rationals(vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert!(!path.is_nondegenerate());
    }

    #[test]
    fn sampling_frequencies() {
        use rand::SeedableRng;
        let p = OffspringDistribution::preset("aperiodic-critical").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            counts[p.sample(&mut rng) as usize] += 1;
        }
        for (k, want) in [0.25, 0.5, 0.25].iter().enumerate() {
            let f = counts[k] as f64 / n as f64;
            assert!((f - want).abs() < 5.0 * (want * (1.0 - want) / n as f64).sqrt());
        }
    }
}
