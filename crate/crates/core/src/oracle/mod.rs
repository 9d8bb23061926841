//! Exact laws of GW trees and of tree functionals on small instances.
//!
//! Every routine is generic over [`Scalar`]: `Rational` gives exact answers
//! for pmfs known exactly, `f64` works for every family.

mod enumerate;
mod graft;
mod laws;

pub use enumerate::{
    enumerate_by_height, enumerate_law, enumerate_law_limited, kesten_restriction_law,
    restriction_law,
};
pub use graft::{
    conditioned_graft_interval, conditioned_law, conditioned_restriction_law, eq_tmp_ratio,
    graft_set_prob, graft_slices, ConditionedInterval, EqTmp, EqTmpRoute, GraftSlice,
};
pub use laws::{
    dwass_check, functional_law, height_law, largest_generation_law, leaves_law, max_degree_law,
    size_law, strong_ratio_table, window_prob, StrongRatioRow, StrongRatioTable,
};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::offspring::{OffspringDistribution, OffspringError};
use crate::tree::{FiniteTree, TreeError};
use crate::weight::{rational_to_string, Rational, Weight};

/// Default guard on the number of stored trees.
pub const DEFAULT_MAX_ENTRIES: usize = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("enumeration would exceed {0} entries")]
    SupportTooLarge(usize),
    #[error("not available in exact arithmetic: {0}")]
    NotExact(String),
    #[error("offspring distribution must have finite support")]
    InfiniteSupport,
    #[error("conditioning window has zero probability")]
    WindowUnreachable,
    #[error("functional {0} has no additive graft property")]
    PropertyMismatch(String),
    #[error("distribution has period {0}")]
    PeriodicDistribution(u32),
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Offspring(#[from] OffspringError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Arithmetic the oracle needs from a weight type.
pub trait Scalar: Weight {
    /// `p(0), …, p(len − 1)`.
    fn masses(p: &OffspringDistribution, len: usize) -> Result<Vec<Self>, OracleError>;

    fn mean_of(p: &OffspringDistribution) -> Result<Self, OracleError>;

    /// `g(r)`.
    fn pgf(p: &OffspringDistribution, r: &Self) -> Result<Self, OracleError>;

    /// CSV cells: `num,den` for exact values, one float otherwise.
    fn csv_cells(&self) -> String;

    fn display(&self) -> String;
}

impl Scalar for Rational {
    fn masses(p: &OffspringDistribution, len: usize) -> Result<Vec<Self>, OracleError> {
        p.exact_prefix(len)
            .ok_or_else(|| OracleError::NotExact("pmf is only known in floating point".into()))
    }

    fn mean_of(p: &OffspringDistribution) -> Result<Self, OracleError> {
        p.exact_mean()
            .ok_or_else(|| OracleError::NotExact("mean is only known in floating point".into()))
    }

    fn pgf(p: &OffspringDistribution, r: &Self) -> Result<Self, OracleError> {
        Ok(p.gen_fn_exact(r)?.0)
    }

    fn csv_cells(&self) -> String {
        format!("{},{}", self.numer(), self.denom())
    }

    fn display(&self) -> String {
        rational_to_string(self)
    }
}

impl Scalar for f64 {
    fn masses(p: &OffspringDistribution, len: usize) -> Result<Vec<Self>, OracleError> {
        Ok((0..len).map(|k| p.prob(k)).collect())
    }

    fn mean_of(p: &OffspringDistribution) -> Result<Self, OracleError> {
        Ok(p.mean())
    }

    fn pgf(p: &OffspringDistribution, r: &Self) -> Result<Self, OracleError> {
        Ok(p.gen_fn(*r)?.0)
    }

    fn csv_cells(&self) -> String {
        format!("{self:e}")
    }

    fn display(&self) -> String {
        format!("{self}")
    }
}

pub(crate) fn abs_diff<W: Scalar>(a: &W, b: &W) -> W {
    if a >= b {
        a.clone() - b.clone()
    } else {
        b.clone() - a.clone()
    }
}

pub(crate) fn min_w<W: Scalar>(a: W, b: W) -> W {
    if a <= b {
        a
    } else {
        b
    }
}

pub(crate) fn max_w<W: Scalar>(a: W, b: W) -> W {
    if a >= b {
        a
    } else {
        b
    }
}

/// Total variation distance with the bracket implied by unaccounted mass.
#[derive(Debug, Clone, PartialEq)]
pub struct TvDistance<W> {
    /// `½ Σ |p − q|` over the recorded support.
    pub point: W,
    pub lower: W,
    pub upper: W,
}

impl<W: Scalar> TvDistance<W> {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

fn tv_maps<K: Ord, W: Scalar>(
    a: &BTreeMap<K, W>,
    ca: &W,
    b: &BTreeMap<K, W>,
    cb: &W,
) -> TvDistance<W> {
    let zero = W::zero();
    let mut sum = W::zero();
    for (k, v) in a {
        sum = sum + abs_diff(v, b.get(k).unwrap_or(&zero));
    }
    for (k, v) in b {
        if !a.contains_key(k) {
            sum = sum + v.clone();
        }
    }
    let two = W::from_u64(2);
    let point = sum / two.clone();
    let slack = (ca.clone() + cb.clone()) / two;
    let lower = if point > slack {
        point.clone() - slack.clone()
    } else {
        W::zero()
    };
    let upper = min_w(point.clone() + slack, W::one());
    TvDistance { point, lower, upper }
}

/// A finitely supported law on trees with the mass it leaves unaccounted.
///
/// When the complement is positive, each recorded probability is a lower
/// bound and each true probability lies below `prob + complement`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeLaw<W> {
    support: BTreeMap<FiniteTree, W>,
    complement: W,
}

impl<W: Scalar> TreeLaw<W> {
    pub fn new(support: BTreeMap<FiniteTree, W>, complement: W) -> Self {
        TreeLaw { support, complement }
    }

    /// Complement computed as `1 − Σ`.
    pub fn from_support(support: BTreeMap<FiniteTree, W>) -> Self {
        let total = support.values().fold(W::zero(), |a, v| a + v.clone());
        let complement = max_w(W::one() - total, W::zero());
        TreeLaw { support, complement }
    }

    pub fn point_mass(t: FiniteTree) -> Self {
        TreeLaw {
            support: [(t, W::one())].into(),
            complement: W::zero(),
        }
    }

    pub fn support(&self) -> &BTreeMap<FiniteTree, W> {
        &self.support
    }

    pub fn prob(&self, t: &FiniteTree) -> W {
        self.support.get(t).cloned().unwrap_or_else(W::zero)
    }

    /// `[prob, prob + complement]`.
    pub fn bounds(&self, t: &FiniteTree) -> (W, W) {
        let p = self.prob(t);
        let hi = min_w(p.clone() + self.complement.clone(), W::one());
        (p, hi)
    }

    pub fn mass_accounted(&self) -> W {
        self.support.values().fold(W::zero(), |a, v| a + v.clone())
    }

    pub fn complement_bound(&self) -> &W {
        &self.complement
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FiniteTree, &W)> {
        self.support.iter()
    }

    /// Image law under `f`.
    pub fn push_forward<F: Fn(&FiniteTree) -> FiniteTree>(&self, f: F) -> TreeLaw<W> {
        let mut out: BTreeMap<FiniteTree, W> = BTreeMap::new();
        for (t, w) in &self.support {
            let e = out.entry(f(t)).or_insert_with(W::zero);
            *e = e.clone() + w.clone();
        }
        TreeLaw {
            support: out,
            complement: self.complement.clone(),
        }
    }

    pub fn restrict(&self, h: usize) -> TreeLaw<W> {
        self.push_forward(|t| t.restrict(h))
    }

    pub fn tv(&self, other: &TreeLaw<W>) -> TvDistance<W> {
        tv_maps(&self.support, &self.complement, &other.support, &other.complement)
    }

    /// `tree,prob` rows (`tree,num,den` for exact weights).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(if W::EXACT {
            "tree,probability_num,probability_den\n"
        } else {
            "tree,probability\n"
        });
        for (t, w) in &self.support {
            let enc: Vec<String> = t.encode().iter().map(u32::to_string).collect();
            out.push_str(&format!("\"{}\",{}\n", enc.join(" "), w.csv_cells()));
        }
        out
    }

    pub fn to_f64(&self) -> TreeLaw<f64> {
        TreeLaw {
            support: self.support.iter().map(|(t, w)| (t.clone(), w.approx())).collect(),
            complement: self.complement.approx(),
        }
    }
}

/// Law of an integer-valued functional.
///
/// Values up to `exact_upto` are exact; larger values, if recorded, are
/// lower bounds. `complement` is the mass not recorded in `values`, which
/// includes `+∞` for super-critical laws.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf<W> {
    values: BTreeMap<u64, W>,
    complement: W,
    exact_upto: Option<u64>,
}

impl<W: Scalar> Pmf<W> {
    pub fn new(values: BTreeMap<u64, W>, exact_upto: Option<u64>) -> Self {
        let total = values.values().fold(W::zero(), |a, v| a + v.clone());
        let complement = max_w(W::one() - total, W::zero());
        Pmf {
            values,
            complement,
            exact_upto,
        }
    }

    pub fn values(&self) -> &BTreeMap<u64, W> {
        &self.values
    }

    pub fn prob(&self, v: u64) -> W {
        self.values.get(&v).cloned().unwrap_or_else(W::zero)
    }

    pub fn complement_bound(&self) -> &W {
        &self.complement
    }

    pub fn exact_upto(&self) -> Option<u64> {
        self.exact_upto
    }

    pub fn is_exact_at(&self, v: u64) -> bool {
        self.exact_upto.is_some_and(|m| v <= m)
    }

    /// `P(A ∈ window)` when the recorded values determine it.
    pub fn window_prob(&self, w: &crate::functional::Window) -> Option<W> {
        if !self.is_exact_at(w.reach()) {
            return None;
        }
        match w.hi {
            Some(h) => Some(
                (w.lo..h).fold(W::zero(), |a, v| a + self.prob(v)),
            ),
            None => Some((0..w.lo).fold(W::one(), |a, v| a - self.prob(v))),
        }
    }

    pub fn mean_lower(&self) -> W {
        self.values
            .iter()
            .fold(W::zero(), |a, (v, w)| a + W::from_u64(*v) * w.clone())
    }

    pub fn tv(&self, other: &Pmf<W>) -> TvDistance<W> {
        tv_maps(&self.values, &self.complement, &other.values, &other.complement)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(if W::EXACT {
            "value,probability_num,probability_den\n"
        } else {
            "value,probability\n"
        });
        for (v, w) in &self.values {
            out.push_str(&format!("{v},{}\n", w.csv_cells()));
        }
        out
    }
}

/// Pmf of a functional read off an enumerated tree law.
pub fn pmf_from_law<W: Scalar>(
    law: &TreeLaw<W>,
    f: &crate::functional::FunctionalSpec,
) -> BTreeMap<u64, W> {
    let mut out: BTreeMap<u64, W> = BTreeMap::new();
    for (t, w) in law.iter() {
        let e = out.entry(f.eval(t)).or_insert_with(W::zero);
        *e = e.clone() + w.clone();
    }
    out
}

pub fn tv_distance<W: Scalar>(a: &TreeLaw<W>, b: &TreeLaw<W>) -> TvDistance<W> {
    a.tv(b)
}

pub(crate) fn one_if<W: Scalar>(b: bool) -> W {
    if b {
        W::one()
    } else {
        W::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::rat;

    fn t(k: &[u32]) -> FiniteTree {
        FiniteTree::decode(k).unwrap()
    }

    #[test]
    fn tv_examples() {
        let a: TreeLaw<Rational> = TreeLaw::point_mass(t(&[0]));
        let b: TreeLaw<Rational> = TreeLaw::point_mass(t(&[2, 0, 0]));
        assert_eq!(a.tv(&a).point, rat(0, 1));
        assert_eq!(a.tv(&b).point, rat(1, 1));
        assert!(a.tv(&b).is_exact());
        let gw = TreeLaw::from_support([(t(&[0]), rat(1, 2)), (t(&[2, 0, 0]), rat(1, 2))].into());
        assert_eq!(gw.tv(&b).point, rat(1, 2));
    }

    #[test]
    fn tv_bracket_widens_with_complement() {
        let a = TreeLaw::from_support([(t(&[0]), rat(1, 2))].into());
        let b: TreeLaw<Rational> = TreeLaw::point_mass(t(&[0]));
        let d = a.tv(&b);
        assert_eq!(d.point, rat(1, 4));
        assert_eq!(d.lower, rat(0, 1));
        assert_eq!(d.upper, rat(1, 2));
    }
}
