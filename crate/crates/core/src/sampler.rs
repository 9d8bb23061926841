//! Seeded samplers for GW trees, processes, Kesten's tree, the survivor
//! decomposition, condensation trees and GW processes with immigration.
//!
//! Trees are grown breadth first: one generation at a time, each node of a
//! generation drawing its child count in lexicographic order.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;
use thiserror::Error;

use crate::functional::{FunctionalSpec, Window};
use crate::offspring::{
    condensation_offspring, conjugate, size_biased, survivor_joint, Criticality, ExtendedOffspring,
    JointRootLaw, OffspringDistribution, OffspringError,
};
use crate::tree::{ExtendedTree, FiniteTree, NodeLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleBudget {
    pub max_nodes: usize,
    pub max_height: usize,
    pub max_rejections: u64,
}

impl Default for SampleBudget {
    fn default() -> Self {
        SampleBudget {
            max_nodes: 2_000_000,
            max_height: 1_000_000,
            max_rejections: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationReason {
    MaxNodes,
    MaxHeight,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("sample truncated ({0:?})")]
    Truncated(TruncationReason),
    #[error("no accepted sample after {0} rejections")]
    Exhausted(u64),
    #[error(transparent)]
    Offspring(#[from] OffspringError),
}

fn check_budget(nodes: usize, depth: usize, budget: &SampleBudget) -> Result<(), SampleError> {
    if nodes > budget.max_nodes {
        return Err(SampleError::Truncated(TruncationReason::MaxNodes));
    }
    if depth > budget.max_height {
        return Err(SampleError::Truncated(TruncationReason::MaxHeight));
    }
    Ok(())
}

/// A GW(p) tree. Truncated when the height exceeds `max_height` or the size
/// exceeds `max_nodes`.
pub fn sample_gw<R: Rng + ?Sized>(
    p: &OffspringDistribution,
    rng: &mut R,
    budget: &SampleBudget,
) -> Result<FiniteTree, SampleError> {
    let mut levels: Vec<Vec<u32>> = Vec::new();
    let mut width = 1usize;
    let mut nodes = 1usize;
    while width > 0 {
        check_budget(nodes, levels.len(), budget)?;
        let level: Vec<u32> = (0..width).map(|_| p.sample(rng)).collect();
        width = level.iter().map(|&k| k as usize).sum();
        nodes += width;
        levels.push(level);
    }
    Ok(FiniteTree::from_levels(&levels).expect("consistent generations"))
}

/// `r_h(τ)` for a GW(p) tree.
pub fn sample_gw_restricted<R: Rng + ?Sized>(
    p: &OffspringDistribution,
    rng: &mut R,
    h: usize,
    budget: &SampleBudget,
) -> Result<FiniteTree, SampleError> {
    let mut levels: Vec<Vec<u32>> = Vec::new();
    let mut width = 1usize;
    let mut nodes = 1usize;
    while width > 0 && levels.len() < h {
        check_budget(nodes, levels.len(), budget)?;
        let level: Vec<u32> = (0..width).map(|_| p.sample(rng)).collect();
        width = level.iter().map(|&k| k as usize).sum();
        nodes += width;
        levels.push(level);
    }
    if width > 0 {
        levels.push(vec![0; width]);
    }
    Ok(FiniteTree::from_levels(&levels).expect("consistent generations"))
}

/// A trajectory `Z_0, …, Z_n` and `W_k = Z_k / m^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessPath {
    pub z: Vec<u64>,
    pub w: Vec<f64>,
}

pub fn sample_process<R: Rng + ?Sized>(p: &OffspringDistribution, rng: &mut R, n: usize) -> ProcessPath {
    let m = p.mean();
    let mut z = Vec::with_capacity(n + 1);
    let mut w = Vec::with_capacity(n + 1);
    let mut cur: u64 = 1;
    for k in 0..=n {
        z.push(cur);
        w.push(if m > 0.0 { cur as f64 / m.powi(k as i32) } else { f64::NAN });
        if k < n {
            cur = (0..cur).map(|_| p.sample(rng) as u64).sum();
        }
    }
    ProcessPath { z, w }
}

/// Sampler for `r_h(τ*)`, Kesten's tree.
#[derive(Debug, Clone)]
pub struct KestenSampler {
    p: OffspringDistribution,
    pstar: OffspringDistribution,
}

impl KestenSampler {
    pub fn new(p: &OffspringDistribution) -> Result<Self, SampleError> {
        p.require_nondegenerate()?;
        Ok(KestenSampler {
            p: p.clone(),
            pstar: size_biased(p)?,
        })
    }

    /// Returns `r_h(τ*)` together with the spine label at depth `h`.
    pub fn sample_with_spine<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        h: usize,
        budget: &SampleBudget,
    ) -> Result<(FiniteTree, NodeLabel), SampleError> {
        let mut levels: Vec<Vec<u32>> = Vec::with_capacity(h + 1);
        let mut width = 1usize;
        let mut special = 0usize;
        let mut spine = Vec::with_capacity(h);
        let mut nodes = 1usize;
        for _ in 0..h {
            check_budget(nodes, levels.len(), budget)?;
            let mut level = Vec::with_capacity(width);
            let mut next_special = 0;
            let mut offset = 0usize;
            for i in 0..width {
                let k = if i == special {
                    let k = self.pstar.sample(rng);
                    let j = rng.gen_range(0..k);
                    spine.push(j + 1);
                    next_special = offset + j as usize;
                    k
                } else {
                    self.p.sample(rng)
                };
                offset += k as usize;
                level.push(k);
            }
            width = offset;
            nodes += width;
            special = next_special;
            levels.push(level);
        }
        levels.push(vec![0; width]);
        let tree = FiniteTree::from_levels(&levels).expect("consistent generations");
        Ok((tree, NodeLabel::new(spine).expect("positive indices")))
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        h: usize,
        budget: &SampleBudget,
    ) -> Result<FiniteTree, SampleError> {
        self.sample_with_spine(rng, h, budget).map(|(t, _)| t)
    }
}

pub fn sample_kesten<R: Rng + ?Sized>(
    p: &OffspringDistribution,
    rng: &mut R,
    h: usize,
    budget: &SampleBudget,
) -> Result<FiniteTree, SampleError> {
    KestenSampler::new(p)?.sample(rng, h, budget)
}

/// A restriction of the survivor-decomposed tree `τ^s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivorSample {
    pub tree: FiniteTree,
    /// Per generation, whether each node (lexicographic order) is of
    /// survivor type.
    pub survivor_type: Vec<Vec<bool>>,
    /// `(S, E)` drawn at the root.
    pub root_split: (u32, u32),
}

/// Sampler for `r_h(τ^s)`: survivor nodes draw `(S, E)` from the joint root
/// law and place their `S` survivor children uniformly among the `S + E`
/// slots; extinct-type nodes have offspring law `p̃`.
#[derive(Debug, Clone)]
pub struct SurvivorSampler {
    joint: JointRootLaw,
    conj: OffspringDistribution,
}

impl SurvivorSampler {
    pub fn new(p: &OffspringDistribution) -> Result<Self, SampleError> {
        Ok(SurvivorSampler {
            joint: survivor_joint(p)?,
            conj: conjugate(p)?,
        })
    }

    pub fn joint(&self) -> &JointRootLaw {
        &self.joint
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        h: usize,
        budget: &SampleBudget,
    ) -> Result<SurvivorSample, SampleError> {
        let mut levels: Vec<Vec<u32>> = Vec::with_capacity(h + 1);
        let mut types: Vec<Vec<bool>> = vec![vec![true]];
        let mut root_split = (0, 0);
        let mut nodes = 1usize;
        for d in 0..h {
            check_budget(nodes, d, budget)?;
            let current = &types[d];
            let mut level = Vec::with_capacity(current.len());
            let mut next = Vec::new();
            for &is_s in current {
                if is_s {
                    let (s, e) = self.joint.sample(rng);
                    if d == 0 {
                        root_split = (s, e);
                    }
                    let total = (s + e) as usize;
                    let chosen: BTreeSet<usize> =
                        index::sample(rng, total, s as usize).into_iter().collect();
                    next.extend((0..total).map(|i| chosen.contains(&i)));
                    level.push(s + e);
                } else {
                    let k = self.conj.sample(rng);
                    next.extend(std::iter::repeat_n(false, k as usize));
                    level.push(k);
                }
            }
            nodes += next.len();
            levels.push(level);
            types.push(next);
        }
        levels.push(vec![0; types[h].len()]);
        let tree = FiniteTree::from_levels(&levels).expect("consistent generations");
        Ok(SurvivorSample {
            tree,
            survivor_type: types,
            root_split,
        })
    }
}

pub fn sample_survivor<R: Rng + ?Sized>(
    p: &OffspringDistribution,
    rng: &mut R,
    h: usize,
    budget: &SampleBudget,
) -> Result<SurvivorSample, SampleError> {
    SurvivorSampler::new(p)?.sample(rng, h, budget)
}

/// `r_n^∞(τ̃)` together with the position of the infinite node, which is
/// followed along the special line even beyond level `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensationSample {
    pub tree: ExtendedTree,
    pub infinite_node: NodeLabel,
    pub infinite_depth: usize,
}

#[derive(Debug, Clone)]
pub struct CondensationSampler {
    p: OffspringDistribution,
    special: ExtendedOffspring,
}

impl CondensationSampler {
    pub fn new(p: &OffspringDistribution) -> Result<Self, SampleError> {
        p.require_nondegenerate()?;
        if p.criticality() != Criticality::Sub {
            return Err(OffspringError::NotSubCritical(p.mean()).into());
        }
        Ok(CondensationSampler {
            p: p.clone(),
            special: condensation_offspring(p)?,
        })
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        n: usize,
        budget: &SampleBudget,
    ) -> Result<CondensationSample, SampleError> {
        let cap = n as u32;
        let mut levels: Vec<Vec<u32>> = Vec::with_capacity(n + 1);
        let mut width = 1usize;
        // index of the special node inside the current generation, while it
        // is still inside the window
        let mut special: Option<usize> = Some(0);
        let mut spine: Vec<u32> = Vec::new();
        let mut infinite: Option<NodeLabel> = None;
        let mut nodes = 1usize;
        for _ in 0..n {
            check_budget(nodes, levels.len(), budget)?;
            let mut level = Vec::with_capacity(width);
            let mut offset = 0usize;
            let mut next_special = None;
            for i in 0..width {
                let k = if Some(i) == special {
                    match self.special.sample(rng) {
                        Some(k) => {
                            let j = rng.gen_range(0..k);
                            spine.push(j + 1);
                            if j < cap {
                                next_special = Some(offset + j as usize);
                            }
                            k.min(cap)
                        }
                        None => {
                            infinite = Some(NodeLabel::new(spine.clone()).expect("positive"));
                            cap
                        }
                    }
                } else {
                    self.p.sample(rng).min(cap)
                };
                offset += k as usize;
                level.push(k);
            }
            width = offset;
            nodes += width;
            levels.push(level);
            special = next_special;
        }
        levels.push(vec![0; width]);
        // continue the special line outside the window
        while infinite.is_none() {
            match self.special.sample(rng) {
                Some(k) => spine.push(rng.gen_range(0..k) + 1),
                None => infinite = Some(NodeLabel::new(spine.clone()).expect("positive")),
            }
        }
        let infinite_node = infinite.expect("set above");
        let base = FiniteTree::from_levels(&levels).expect("consistent generations");
        let marked: BTreeSet<NodeLabel> = if base.contains(&infinite_node) {
            [infinite_node.clone()].into()
        } else {
            BTreeSet::new()
        };
        let tree = ExtendedTree::new(base, marked, n).expect("materialized to level n");
        Ok(CondensationSample {
            infinite_depth: infinite_node.depth(),
            tree,
            infinite_node,
        })
    }
}

pub fn sample_condensation<R: Rng + ?Sized>(
    p: &OffspringDistribution,
    rng: &mut R,
    n: usize,
    budget: &SampleBudget,
) -> Result<CondensationSample, SampleError> {
    CondensationSampler::new(p)?.sample(rng, n, budget)
}

/// `Z*_0, …, Z*_n` for the GW process with immigration `Y`, `Y + 1 ~ p*`.
#[derive(Debug, Clone)]
pub struct ImmigrationSampler {
    p: OffspringDistribution,
    pstar: OffspringDistribution,
}

impl ImmigrationSampler {
    pub fn new(p: &OffspringDistribution) -> Result<Self, SampleError> {
        Ok(ImmigrationSampler {
            p: p.clone(),
            pstar: size_biased(p)?,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<u64> {
        let mut z = Vec::with_capacity(n + 1);
        let mut cur = 0u64;
        z.push(cur);
        for _ in 0..n {
            let y = self.pstar.sample(rng) as u64 - 1;
            cur = y + (0..cur).map(|_| self.p.sample(rng) as u64).sum::<u64>();
            z.push(cur);
        }
        z
    }
}

pub fn sample_immigration<R: Rng + ?Sized>(
    p: &OffspringDistribution,
    rng: &mut R,
    n: usize,
) -> Result<Vec<u64>, SampleError> {
    Ok(ImmigrationSampler::new(p)?.sample(rng, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Decision {
    Open,
    Accept,
    Reject,
}

/// Running statistics of a tree grown generation by generation.
struct Partial<'a> {
    functional: &'a FunctionalSpec,
    window: Window,
    nodes: u64,
    leaf_type: u64,
    max_deg: u64,
    max_width: u64,
}

impl Partial<'_> {
    /// Decision after generation `depth` (of width `width`) has been placed
    /// and, if `finished`, after the tree is known to be complete.
    fn decide(&self, depth: usize, width: u64, finished: bool) -> Decision {
        let w = &self.window;
        let value_so_far = match self.functional {
            FunctionalSpec::Height => depth as u64,
            FunctionalSpec::Size => self.nodes,
            FunctionalSpec::Leaves(_) => self.leaf_type,
            FunctionalSpec::MaxOutDegree => self.max_deg,
            FunctionalSpec::LargestGeneration => self.max_width.max(width),
        };
        if finished {
            return if w.contains(value_so_far) { Decision::Accept } else { Decision::Reject };
        }
        // every functional is non-decreasing as the tree grows
        if w.hi.is_some_and(|h| value_so_far >= h) {
            return Decision::Reject;
        }
        if w.hi.is_none() && value_so_far >= w.lo {
            return Decision::Accept;
        }
        Decision::Open
    }
}

/// Rejection sampling of `τ` given `A(τ) ∈ window`; only `r_h` of the
/// accepted tree is returned when `h` is given.
///
/// Growth stops as soon as acceptance is decided and `r_h` is available, so
/// open windows work for super-critical laws. A budget overflow on an
/// undecided draw is reported, never silently rejected.
pub fn sample_conditioned_restricted<R: Rng + ?Sized>(
    p: &OffspringDistribution,
    functional: &FunctionalSpec,
    window: Window,
    h: Option<usize>,
    rng: &mut R,
    budget: &SampleBudget,
) -> Result<FiniteTree, SampleError> {
    for _ in 0..budget.max_rejections.max(1) {
        let mut st = Partial {
            functional,
            window,
            nodes: 1,
            leaf_type: 0,
            max_deg: 0,
            max_width: 1,
        };
        let mut levels: Vec<Vec<u32>> = Vec::new();
        let mut width = 1u64;
        let mut decision = st.decide(0, 1, false);
        loop {
            let need_more = match (decision, h) {
                (Decision::Reject, _) => false,
                (Decision::Open, _) => width > 0,
                (Decision::Accept, Some(h)) => width > 0 && levels.len() < h,
                (Decision::Accept, None) => width > 0,
            };
            if !need_more {
                break;
            }
            check_budget(st.nodes as usize, levels.len(), budget)?;
            let mut level = Vec::with_capacity(width as usize);
            let mut next = 0u64;
            for _ in 0..width {
                let k = p.sample(rng);
                if let FunctionalSpec::Leaves(a) = functional {
                    if a.contains(k) {
                        st.leaf_type += 1;
                    }
                }
                st.max_deg = st.max_deg.max(k as u64);
                next += k as u64;
                level.push(k);
            }
            st.nodes += next;
            levels.push(level);
            width = next;
            if decision == Decision::Open {
                decision = st.decide(levels.len(), width, width == 0);
                if width > 0 {
                    st.max_width = st.max_width.max(width);
                }
            }
        }
        if decision == Decision::Open {
            decision = st.decide(levels.len().saturating_sub(1), 0, true);
        }
        if decision != Decision::Accept {
            continue;
        }
        if width > 0 {
            levels.push(vec![0; width as usize]);
        }
        let tree = FiniteTree::from_levels(&levels).expect("consistent generations");
        return Ok(match h {
            Some(h) => tree.restrict(h),
            None => tree,
        });
    }
    Err(SampleError::Exhausted(budget.max_rejections))
}

pub fn sample_conditioned<R: Rng + ?Sized>(
    p: &OffspringDistribution,
    functional: &FunctionalSpec,
    window: Window,
    rng: &mut R,
    budget: &SampleBudget,
) -> Result<FiniteTree, SampleError> {
    sample_conditioned_restricted(p, functional, window, None, rng, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::DegreeSet;
    use crate::rng::stream;
    use crate::weight::rat;

    fn preset(n: &str) -> OffspringDistribution {
        OffspringDistribution::preset(n).unwrap()
    }

    fn within_3_sigma(count: usize, n: usize, p: f64) -> bool {
        let f = count as f64 / n as f64;
        (f - p).abs() <= 3.0 * (p * (1.0 - p) / n as f64).sqrt()
    }

    #[test]
    fn trivial_law_gives_root() {
        let p = OffspringDistribution::from_rationals(vec![rat(1, 1)]).unwrap();
        let mut rng = stream(1, 0);
        for _ in 0..10 {
            assert_eq!(sample_gw(&p, &mut rng, &SampleBudget::default()).unwrap(), FiniteTree::singleton());
        }
    }

    #[test]
    fn critical_binary_small_trees() {
        let p = preset("critical-binary");
        let mut rng = stream(11, 0);
        let n = 100_000;
        let budget = SampleBudget::default();
        let (mut single, mut three) = (0, 0);
        for _ in 0..n {
            match sample_gw(&p, &mut rng, &budget) {
                Ok(t) if t.size() == 1 => single += 1,
                Ok(t) if t.size() == 3 => three += 1,
                _ => {}
            }
        }
        assert!(within_3_sigma(single, n, 0.5));
        assert!(within_3_sigma(three, n, 0.125));
    }

    #[test]
    fn height_budget_is_exact() {
        let p = preset("super-binary");
        let mut rng = stream(5, 0);
        let budget = SampleBudget { max_height: 3, ..SampleBudget::default() };
        for _ in 0..2000 {
            match sample_gw(&p, &mut rng, &budget) {
                Ok(t) => assert!(t.height() <= 3),
                Err(SampleError::Truncated(TruncationReason::MaxHeight)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn process_absorbs_and_starts_at_one() {
        let p = preset("sub-binary");
        let mut rng = stream(2, 0);
        for _ in 0..1000 {
            let path = sample_process(&p, &mut rng, 8);
            assert_eq!(path.z[0], 1);
            for k in 0..8 {
                if path.z[k] == 0 {
                    assert_eq!(path.z[k + 1], 0);
                }
            }
        }
    }

    #[test]
    fn kesten_critical_binary_root() {
        let p = preset("critical-binary");
        let s = KestenSampler::new(&p).unwrap();
        let mut rng = stream(9, 0);
        for _ in 0..100 {
            let (t, spine) = s.sample_with_spine(&mut rng, 1, &SampleBudget::default()).unwrap();
            assert_eq!(t.encode(), &[2, 0, 0]);
            assert_eq!(spine.depth(), 1);
            let t4 = s.sample(&mut rng, 4, &SampleBudget::default()).unwrap();
            assert_eq!(t4.height(), 4);
        }
    }

    #[test]
    fn survivor_every_level_has_survivor() {
        let p = preset("super-binary");
        let s = SurvivorSampler::new(&p).unwrap();
        let mut rng = stream(4, 0);
        for _ in 0..500 {
            let sample = s.sample(&mut rng, 4, &SampleBudget::default()).unwrap();
            for lvl in &sample.survivor_type {
                assert!(lvl.iter().any(|&b| b));
            }
            assert_eq!(sample.tree.widths().len(), 5);
        }
    }

    #[test]
    fn condensation_single_infinite_node() {
        let p = preset("sub-binary");
        let s = CondensationSampler::new(&p).unwrap();
        let mut rng = stream(8, 0);
        let n = 20_000;
        let mut at_root = 0;
        for _ in 0..n {
            let c = s.sample(&mut rng, 4, &SampleBudget::default()).unwrap();
            assert!(c.tree.infinite_nodes().len() <= 1);
            if c.infinite_depth <= 4 && c.infinite_node.infinity_norm() <= 4 {
                assert_eq!(c.tree.infinite_nodes().len(), 1);
            }
            if c.infinite_depth == 0 {
                at_root += 1;
                assert_eq!(c.tree.base().root_degree(), 4);
            }
        }
        assert!(within_3_sigma(at_root, n, 0.2));
    }

    #[test]
    fn immigration_critical_binary() {
        let p = preset("critical-binary");
        let mut rng = stream(3, 0);
        for _ in 0..200 {
            let z = sample_immigration(&p, &mut rng, 5).unwrap();
            assert_eq!(z[0], 0);
            assert_eq!(z[1], 1);
        }
    }

    #[test]
    fn conditioned_examples() {
        let p = preset("critical-binary");
        let mut rng = stream(6, 0);
        let b = SampleBudget::default();
        let t = sample_conditioned(&p, &FunctionalSpec::Size, Window::new(1, Some(2)).unwrap(), &mut rng, &b).unwrap();
        assert_eq!(t, FiniteTree::singleton());
        let t = sample_conditioned(&p, &FunctionalSpec::Size, Window::exact(3), &mut rng, &b).unwrap();
        assert_eq!(t.encode(), &[2, 0, 0]);
        for _ in 0..200 {
            let t = sample_conditioned(&p, &FunctionalSpec::Leaves(DegreeSet::leaves()), Window::exact(3), &mut rng, &b).unwrap();
            assert_eq!(t.leaves().len(), 3);
            let t = sample_conditioned_restricted(&p, &FunctionalSpec::Height, Window::at_least(3), Some(2), &mut rng, &b).unwrap();
            assert_eq!(t.height(), 2);
        }
    }

    #[test]
    fn determinism_per_stream() {
        let p = preset("aperiodic-critical");
        let b = SampleBudget::default();
        let a: Vec<FiniteTree> = {
            let mut r = stream(42, 7);
            (0..50).map(|_| sample_gw(&p, &mut r, &b).unwrap()).collect()
        };
        let c: Vec<FiniteTree> = {
            let mut r = stream(42, 7);
            (0..50).map(|_| sample_gw(&p, &mut r, &b).unwrap()).collect()
        };
        assert_eq!(a, c);
    }
}
