//! Graft-set probabilities and conditioned laws.

use std::collections::BTreeMap;

use super::{
    enumerate_by_height, enumerate_law, functional_law, one_if, restriction_law, window_prob,
    OracleError, Pmf, Scalar, TreeLaw, DEFAULT_MAX_ENTRIES,
};
use crate::functional::{FunctionalSpec, Window};
use crate::offspring::OffspringDistribution;
use crate::tree::{FiniteTree, NodeLabel, TreeError};

/// `P(τ ∈ T(t, x)) = Π_{u ∈ t, u ≠ x} p(k_u(t))`, divided by `m^{|x|}` for
/// Kesten's tree.
pub fn graft_set_prob<W: Scalar>(
    p: &OffspringDistribution,
    t: &FiniteTree,
    x: &NodeLabel,
    kesten: bool,
) -> Result<W, OracleError> {
    let ix = t
        .index_of(x)
        .ok_or_else(|| TreeError::NoSuchNode(x.clone()))?;
    if t.encode()[ix] != 0 {
        return Err(TreeError::NotALeaf(x.clone()).into());
    }
    let masses = W::masses(p, t.max_out_degree() as usize + 1)?;
    let mut w = W::one();
    for (i, &k) in t.encode().iter().enumerate() {
        if i != ix {
            w = w * masses[k as usize].clone();
        }
    }
    if kesten {
        let m = W::mean_of(p)?;
        w = w / m.powi(x.depth() as u32);
    }
    Ok(w)
}

/// `P(X ≤ j)` from a pmf exact up to `j`; zero for `j < 0`.
fn cdf<W: Scalar>(law: &Pmf<W>, j: i64) -> W {
    if j < 0 {
        return W::zero();
    }
    (0..=j as u64).fold(W::zero(), |a, v| a + law.prob(v))
}

/// `P(max(base, Y_1, …, Y_z) ∈ window)` for iid `Y_i` with the given law.
fn max_in_window<W: Scalar>(law: &Pmf<W>, base: i64, z: usize, shift: i64, w: &Window) -> W {
    // value = shift + max(base, max Y)
    let below = |v: i64| -> W {
        // P(shift + max(base, max Y) ≤ v)
        let j = v - shift;
        if j < base {
            W::zero()
        } else {
            cdf(law, j).powi(z as u32)
        }
    };
    let lo = w.lo as i64;
    match w.hi {
        Some(h) => below(h as i64 - 1) - below(lo - 1),
        None => W::one() - below(lo - 1),
    }
}

/// `P(base + Y_1 + … + Y_z ∈ window)` for iid `Y_i ≥ 0` with the given law.
fn sum_in_window<W: Scalar>(law: &Pmf<W>, base: u64, z: usize, w: &Window) -> W {
    let Some(w) = w.shift_down(base) else {
        return W::zero();
    };
    let reach = w.reach() as usize;
    let single: Vec<W> = (0..=reach as u64).map(|v| law.prob(v)).collect();
    let mut acc = vec![W::zero(); reach + 1];
    acc[0] = W::one();
    for _ in 0..z {
        let mut next = vec![W::zero(); reach + 1];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in single.iter().enumerate().take(reach + 1 - i) {
                if !b.is_zero() {
                    next[i + k] = next[i + k].clone() + a.clone() * b.clone();
                }
            }
        }
        acc = next;
    }
    match w.hi {
        Some(h) => (w.lo..h).fold(W::zero(), |a, v| a + acc[v as usize].clone()),
        None => (0..w.lo).fold(W::one(), |a, v| a - acc[v as usize].clone()),
    }
}

/// Largest tree size compatible with the window, when finite.
fn size_bound<W: Scalar>(p: &OffspringDistribution, f: &FunctionalSpec, w: &Window) -> Option<usize> {
    let hi = w.hi?;
    match f {
        FunctionalSpec::Size => Some(hi as usize - 1),
        FunctionalSpec::Leaves(a) if a.contains_zero() => {
            let p1 = W::masses(p, 2).ok()?.pop()?;
            // without unary nodes a tree with ℓ leaves has at most 2ℓ − 1 nodes
            p1.is_zero().then(|| (2 * (hi as usize - 1)).saturating_sub(1).max(1))
        }
        _ => None,
    }
}

/// Enumerated trees containing every tree whose functional lies in the
/// window, when such a finite enumeration is available.
fn enumerate_window<W: Scalar>(
    p: &OffspringDistribution,
    f: &FunctionalSpec,
    w: &Window,
    size_cap: usize,
) -> Result<Option<TreeLaw<W>>, OracleError> {
    if let Some(n) = size_bound::<W>(p, f, w) {
        if n <= size_cap {
            return enumerate_law(p, n).map(Some);
        }
    }
    if *f == FunctionalSpec::Height && p.support_max().is_some() {
        if let Some(hi) = w.hi {
            return match enumerate_by_height(p, hi as usize - 1, DEFAULT_MAX_ENTRIES) {
                Ok(l) => Ok(Some(l)),
                Err(OracleError::SupportTooLarge(_)) => Ok(None),
                Err(e) => Err(e),
            };
        }
    }
    Ok(None)
}

/// Law of `τ` given `A(τ) ∈ window`, from trees of size at most
/// `size_cap` (or every tree in the window when that set is finite and
/// enumerable). Recorded probabilities are lower bounds when the
/// complement is positive.
pub fn conditioned_law<W: Scalar>(
    p: &OffspringDistribution,
    f: &FunctionalSpec,
    window: &Window,
    size_cap: usize,
) -> Result<TreeLaw<W>, OracleError> {
    let (law, complete) = match enumerate_window::<W>(p, f, window, size_cap)? {
        Some(l) => (l, true),
        None => (enumerate_law::<W>(p, size_cap)?, false),
    };
    let inside: BTreeMap<FiniteTree, W> = law
        .iter()
        .filter(|(t, _)| window.contains(f.eval(t)))
        .map(|(t, w)| (t.clone(), w.clone()))
        .collect();
    let enumerated = inside.values().fold(W::zero(), |a, v| a + v.clone());
    let den = if complete {
        enumerated
    } else {
        window_prob::<W>(p, f, window)?
    };
    if den.is_zero() {
        return Err(OracleError::WindowUnreachable);
    }
    let support: BTreeMap<FiniteTree, W> = inside
        .into_iter()
        .map(|(t, w)| (t, w / den.clone()))
        .collect();
    Ok(TreeLaw::from_support(support))
}

/// Law of `r_h(τ_n)` where `τ_n` is `τ` given `A(τ) ∈ window`.
///
/// For finite-support laws and the functionals `|·|`, `L_𝒜` with `0 ∈ 𝒜`,
/// `H` and `M`, the law is computed from the law of `r_h(τ)` and the
/// independent subtrees above level `h`, and is exact. Otherwise it comes
/// from [`conditioned_law`].
pub fn conditioned_restriction_law<W: Scalar>(
    p: &OffspringDistribution,
    f: &FunctionalSpec,
    window: &Window,
    h: usize,
    size_cap: usize,
) -> Result<TreeLaw<W>, OracleError> {
    let structural = match f {
        FunctionalSpec::Size | FunctionalSpec::Height => true,
        FunctionalSpec::Leaves(a) => a.contains_zero(),
        FunctionalSpec::MaxOutDegree => !W::EXACT,
        FunctionalSpec::LargestGeneration => false,
    };
    if !structural || p.support_max().is_none() {
        return Ok(conditioned_law::<W>(p, f, window, size_cap)?.restrict(h));
    }
    let den = window_prob::<W>(p, f, window)?;
    if den.is_zero() {
        return Err(OracleError::WindowUnreachable);
    }
    let rl = restriction_law::<W>(p, h, DEFAULT_MAX_ENTRIES)?;
    let law = functional_law::<W>(p, f, window.reach() as usize)?;
    let mut support = BTreeMap::new();
    for (s, w) in rl.iter() {
        let z = s.width_at(h);
        let factor = if z == 0 {
            one_if(window.contains(f.eval(s)))
        } else {
            let inner = inner_nodes(s, h);
            match f {
                FunctionalSpec::Size => sum_in_window(&law, inner.len() as u64, z, window),
                FunctionalSpec::Leaves(a) => {
                    let base = inner.iter().filter(|&&k| a.contains(k)).count() as u64;
                    sum_in_window(&law, base, z, window)
                }
                FunctionalSpec::Height => max_in_window(&law, 0, z, h as i64, window),
                FunctionalSpec::MaxOutDegree => {
                    let base = inner.iter().copied().max().unwrap_or(0) as i64;
                    max_in_window(&law, base, z, 0, window)
                }
                FunctionalSpec::LargestGeneration => unreachable!("routed to enumeration"),
            }
        };
        if !factor.is_zero() {
            support.insert(s.clone(), w.clone() * factor / den.clone());
        }
    }
    Ok(TreeLaw::from_support(support))
}

/// Out-degrees of the nodes of `s` strictly below level `h`.
fn inner_nodes(s: &FiniteTree, h: usize) -> Vec<u32> {
    let levels = s.level_degrees();
    levels.iter().take(h).flatten().copied().collect()
}

/// `P(τ ∈ T(t, x), A(τ) ∈ window)`, from `τ = t ⊛_x τ'` with `τ'` an
/// independent GW tree.
fn graft_window_prob<W: Scalar>(
    p: &OffspringDistribution,
    f: &FunctionalSpec,
    t: &FiniteTree,
    x: &NodeLabel,
    window: &Window,
) -> Result<W, OracleError> {
    let base = graft_set_prob::<W>(p, t, x, false)?;
    let factor = match f {
        FunctionalSpec::Size => {
            let w = window.shift_down(t.size() as u64 - 1);
            match w {
                Some(w) => window_prob::<W>(p, f, &w)?,
                None => W::zero(),
            }
        }
        FunctionalSpec::Leaves(a) => {
            let d = t.count_degrees_in(a) as u64 - u64::from(a.contains_zero());
            match window.shift_down(d) {
                Some(w) => window_prob::<W>(p, f, &w)?,
                None => W::zero(),
            }
        }
        FunctionalSpec::Height => {
            let law = functional_law::<W>(p, f, window.reach() as usize)?;
            let shift = x.depth() as i64;
            let floor = t.height() as i64 - shift;
            // H = max(H(t), |x| + H(τ')) = |x| + max(H(t) − |x|, H(τ'))
            max_in_window(&law, floor, 1, shift, window)
        }
        FunctionalSpec::MaxOutDegree => {
            let law = functional_law::<W>(p, f, window.reach() as usize)?;
            max_in_window(&law, t.max_out_degree() as i64, 1, 0, window)
        }
        FunctionalSpec::LargestGeneration => {
            return Err(OracleError::PropertyMismatch(f.name()));
        }
    };
    Ok(base * factor)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqTmpRoute {
    /// Every tree of the window was enumerated.
    Enumeration,
    /// `τ = t ⊛_x τ'` with the law of `A(τ')` from its recursion.
    Composition,
}

/// Both sides of `P(τ_n ∈ T(t,x)) = m^{|x|} P(τ* ∈ T(t,x)) P(𝔸_{n−D}) / P(𝔸_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EqTmp<W> {
    pub lhs: W,
    pub rhs: W,
    pub d: u64,
    pub n0: u64,
    pub route: EqTmpRoute,
}

impl<W: Scalar> EqTmp<W> {
    pub fn residual(&self) -> W {
        self.lhs.clone() - self.rhs.clone()
    }
}

/// `(D(t, x), n0)` for functionals with the additive graft property;
/// `M` is additive with `D = 0`.
fn additivity(f: &FunctionalSpec, t: &FiniteTree, x: &NodeLabel) -> Result<(u64, u64), OracleError> {
    Ok(match f {
        FunctionalSpec::Size => (t.size() as u64 - 1, t.size() as u64),
        FunctionalSpec::Height => (x.depth() as u64, t.height() as u64 + 1),
        FunctionalSpec::Leaves(a) => {
            let d = t.count_degrees_in(a) as u64 - u64::from(a.contains_zero());
            (d, d + u64::from(a.contains_zero()))
        }
        FunctionalSpec::MaxOutDegree => (0, t.max_out_degree() as u64 + 1),
        FunctionalSpec::LargestGeneration => return Err(OracleError::PropertyMismatch(f.name())),
    })
}

/// Evaluates both sides of the graft ratio identity on `window`, which must
/// start at or above `n0`.
pub fn eq_tmp_ratio<W: Scalar>(
    p: &OffspringDistribution,
    f: &FunctionalSpec,
    t: &FiniteTree,
    x: &NodeLabel,
    window: &Window,
    size_cap: usize,
) -> Result<EqTmp<W>, OracleError> {
    let (d, n0) = additivity(f, t, x)?;
    if window.lo < n0 {
        return Err(OracleError::InvalidInput(format!(
            "window {window} starts below n0 = {n0}"
        )));
    }
    let p_window = window_prob::<W>(p, f, window)?;
    if p_window.is_zero() {
        return Err(OracleError::WindowUnreachable);
    }
    let shifted = match window.shift_down(d) {
        Some(w) => window_prob::<W>(p, f, &w)?,
        None => W::zero(),
    };
    let m = W::mean_of(p)?;
    let kesten = graft_set_prob::<W>(p, t, x, true)?;
    let rhs = m.powi(x.depth() as u32) * kesten * shifted / p_window.clone();

    let (lhs, route) = match enumerate_window::<W>(p, f, window, size_cap)? {
        Some(law) => {
            let mut num = W::zero();
            let mut den = W::zero();
            for (s, w) in law.iter() {
                if window.contains(f.eval(s)) {
                    den = den + w.clone();
                    if t.graft_set_contains(x, s) {
                        num = num + w.clone();
                    }
                }
            }
            if den.is_zero() {
                return Err(OracleError::WindowUnreachable);
            }
            (num / den, EqTmpRoute::Enumeration)
        }
        None => (
            graft_window_prob::<W>(p, f, t, x, window)? / p_window,
            EqTmpRoute::Composition,
        ),
    };
    Ok(EqTmp {
        lhs,
        rhs,
        d,
        n0,
        route,
    })
}

/// One size slice of the graft identity.
#[derive(Debug, Clone, PartialEq)]
pub struct GraftSlice<W> {
    pub size: usize,
    /// `Σ P(τ = s)` over `s ∈ T(t,x)`, `|s| = size`, `A(s) ∈ window`.
    pub lhs: W,
    /// `P(τ ∈ T(t,x)) Σ P(τ = s')` over `|s'| = size − |t| + 1`,
    /// `A(s') + D ∈ window`.
    pub rhs: W,
}

/// Size-by-size comparison of the two sides of the graft identity with
/// shift `d`, from independent enumerations.
pub fn graft_slices<W: Scalar>(
    p: &OffspringDistribution,
    f: &FunctionalSpec,
    t: &FiniteTree,
    x: &NodeLabel,
    window: &Window,
    d: u64,
    size_cap: usize,
) -> Result<Vec<GraftSlice<W>>, OracleError> {
    let law = enumerate_law::<W>(p, size_cap)?;
    let base = graft_set_prob::<W>(p, t, x, false)?;
    let offset = t.size() - 1;
    let mut lhs = vec![W::zero(); size_cap + 1];
    let mut rhs = vec![W::zero(); size_cap + 1];
    let shifted = window.shift_down(d);
    for (s, w) in law.iter() {
        let v = f.eval(s);
        if window.contains(v) && t.graft_set_contains(x, s) {
            lhs[s.size()] = lhs[s.size()].clone() + w.clone();
        }
        let target = s.size() + offset;
        if target <= size_cap && shifted.is_some_and(|sw| sw.contains(v)) {
            rhs[target] = rhs[target].clone() + w.clone();
        }
    }
    Ok((t.size()..=size_cap)
        .map(|size| GraftSlice {
            size,
            lhs: lhs[size].clone(),
            rhs: base.clone() * rhs[size].clone(),
        })
        .collect())
}

/// Bracket on `P(τ_n ∈ T(t,x))` from trees of size at most `size_cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionedInterval<W> {
    pub lower: W,
    pub upper: W,
    /// Enumerated `P(τ ∈ T(t,x), A(τ) ∈ window)`.
    pub numerator: W,
    /// Enumerated `P(A(τ) ∈ window)`.
    pub window_mass: W,
    /// Bound on the window mass left out of the enumeration.
    pub missing: W,
}

impl<W: Scalar> ConditionedInterval<W> {
    pub fn contains(&self, v: &W) -> bool {
        &self.lower <= v && v <= &self.upper
    }
}

pub fn conditioned_graft_interval<W: Scalar>(
    p: &OffspringDistribution,
    f: &FunctionalSpec,
    t: &FiniteTree,
    x: &NodeLabel,
    window: &Window,
    size_cap: usize,
) -> Result<ConditionedInterval<W>, OracleError> {
    let law = enumerate_law::<W>(p, size_cap)?;
    let mut num = W::zero();
    let mut den = W::zero();
    for (s, w) in law.iter() {
        if window.contains(f.eval(s)) {
            den = den + w.clone();
            if t.graft_set_contains(x, s) {
                num = num + w.clone();
            }
        }
    }
    let missing = match window_prob::<W>(p, f, window) {
        Ok(total) if total >= den => total - den.clone(),
        _ => law.complement_bound().clone(),
    };
    let total = den.clone() + missing.clone();
    if total.is_zero() {
        return Err(OracleError::WindowUnreachable);
    }
    Ok(ConditionedInterval {
        lower: num.clone() / total.clone(),
        upper: (num.clone() + missing.clone()) / total,
        numerator: num,
        window_mass: den,
        missing,
    })
}
