//! Tree-by-tree enumeration of GW laws.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;


use super::{OracleError, Scalar, TreeLaw, DEFAULT_MAX_ENTRIES};
use crate::offspring::OffspringDistribution;
use crate::tree::FiniteTree;

type Entries<W> = Vec<(Vec<u32>, W)>;

struct SizeEnumerator<W> {
    masses: Vec<W>,
    trees: Vec<Rc<Entries<W>>>,
    forests: HashMap<(usize, usize), Rc<Entries<W>>>,
    stored: usize,
    limit: usize,
}

impl<W: Scalar> SizeEnumerator<W> {
    fn bump(&mut self, n: usize) -> Result<(), OracleError> {
        self.stored += n;
        if self.stored > self.limit {
            return Err(OracleError::SupportTooLarge(self.limit));
        }
        Ok(())
    }

    /// Ordered forests of `j` trees with `m` nodes in total.
    fn forest(&mut self, j: usize, m: usize) -> Result<Rc<Entries<W>>, OracleError> {
        if j == 0 {
            return Ok(Rc::new(if m == 0 { vec![(Vec::new(), W::one())] } else { Vec::new() }));
        }
        if m < j {
            return Ok(Rc::new(Vec::new()));
        }
        if j == 1 {
            return Ok(self.trees[m].clone());
        }
        if let Some(f) = self.forests.get(&(j, m)) {
            return Ok(f.clone());
        }
        let mut out = Vec::new();
        for s in 1..=m - (j - 1) {
            let first = self.trees[s].clone();
            if first.is_empty() {
                continue;
            }
            let rest = self.forest(j - 1, m - s)?;
            for (a, wa) in first.iter() {
                for (b, wb) in rest.iter() {
                    let mut enc = Vec::with_capacity(a.len() + b.len());
                    enc.extend_from_slice(a);
                    enc.extend_from_slice(b);
                    out.push((enc, wa.clone() * wb.clone()));
                }
            }
        }
        self.bump(out.len())?;
        let rc = Rc::new(out);
        self.forests.insert((j, m), rc.clone());
        Ok(rc)
    }

    fn grow(&mut self, n: usize) -> Result<(), OracleError> {
        let mut out = Vec::new();
        for k in 0..n.min(self.masses.len()) {
            if self.masses[k].is_zero() {
                continue;
            }
            let pk = self.masses[k].clone();
            let f = self.forest(k, n - 1)?;
            for (enc, w) in f.iter() {
                let mut e = Vec::with_capacity(n);
                e.push(k as u32);
                e.extend_from_slice(enc);
                out.push((e, pk.clone() * w.clone()));
            }
        }
        self.bump(out.len())?;
        self.trees.push(Rc::new(out));
        Ok(())
    }
}

/// `P(τ = t)` for every `t` with `|t| ≤ size_cap`.
pub fn enumerate_law<W: Scalar>(
    p: &OffspringDistribution,
    size_cap: usize,
) -> Result<TreeLaw<W>, OracleError> {
    enumerate_law_limited(p, size_cap, DEFAULT_MAX_ENTRIES)
}

pub fn enumerate_law_limited<W: Scalar>(
    p: &OffspringDistribution,
    size_cap: usize,
    max_entries: usize,
) -> Result<TreeLaw<W>, OracleError> {
    let mut e = SizeEnumerator {
        masses: W::masses(p, size_cap.max(1))?,
        trees: vec![Rc::new(Vec::new())],
        forests: HashMap::new(),
        stored: 0,
        limit: max_entries,
    };
    for n in 1..=size_cap {
        e.grow(n)?;
    }
    let mut support = BTreeMap::new();
    for level in &e.trees {
        for (enc, w) in level.iter() {
            support.insert(FiniteTree::from_encoding_unchecked(enc.clone()), w.clone());
        }
    }
    Ok(TreeLaw::from_support(support))
}

fn finite_masses<W: Scalar>(p: &OffspringDistribution) -> Result<Vec<W>, OracleError> {
    let max = p.support_max().ok_or(OracleError::InfiniteSupport)?;
    W::masses(p, max + 1)
}

/// `P(τ = t)` for every `t` with `H(t) ≤ max_height`; finite support only.
pub fn enumerate_by_height<W: Scalar>(
    p: &OffspringDistribution,
    max_height: usize,
    max_entries: usize,
) -> Result<TreeLaw<W>, OracleError> {
    let masses = finite_masses::<W>(p)?;
    let mut stored = 0usize;
    let mut prev: Rc<Entries<W>> = Rc::new(vec![(vec![0], masses[0].clone())]);
    if masses[0].is_zero() {
        prev = Rc::new(Vec::new());
    }
    for _ in 0..max_height {
        let mut cur: Entries<W> = Vec::new();
        for (k, pk) in masses.iter().enumerate() {
            if pk.is_zero() {
                continue;
            }
            // all k-tuples of trees of height < current
            let mut partial: Entries<W> = vec![(vec![k as u32], pk.clone())];
            for _ in 0..k {
                let size = partial.len().saturating_mul(prev.len());
                if stored.saturating_add(size) > max_entries {
                    return Err(OracleError::SupportTooLarge(max_entries));
                }
                let mut next = Vec::with_capacity(size);
                for (a, wa) in &partial {
                    for (b, wb) in prev.iter() {
                        let mut e = a.clone();
                        e.extend_from_slice(b);
                        next.push((e, wa.clone() * wb.clone()));
                    }
                }
                stored += next.len();
                if stored > max_entries {
                    return Err(OracleError::SupportTooLarge(max_entries));
                }
                partial = next;
            }
            cur.extend(partial);
        }
        prev = Rc::new(cur);
    }
    let support = prev
        .iter()
        .map(|(e, w)| (FiniteTree::from_encoding_unchecked(e.clone()), w.clone()))
        .collect();
    Ok(TreeLaw::from_support(support))
}

/// Expands every node of the last generation; `spine` marks the special
/// node, whose degree is size-biased and whose chosen child is recorded.
struct LevelState<W> {
    levels: Vec<Vec<u32>>,
    spine: Option<usize>,
    w: W,
}

fn expand_levels<W: Scalar>(
    masses: &[W],
    mean: Option<&W>,
    h: usize,
    max_entries: usize,
) -> Result<BTreeMap<FiniteTree, W>, OracleError> {
    let start_spine = mean.map(|_| 0);
    let mut states = vec![LevelState {
        levels: vec![],
        spine: start_spine,
        w: W::one(),
    }];
    let mut width = vec![1usize];
    for _ in 0..h {
        let mut next_states = Vec::new();
        let mut next_width = Vec::new();
        for (st, &wd) in states.into_iter().zip(&width) {
            if wd == 0 {
                next_states.push(st);
                next_width.push(0);
                continue;
            }
            // (degrees so far, weight, children so far, special child index)
            let mut partial: Vec<(Vec<u32>, W, usize, Option<usize>)> =
                vec![(Vec::with_capacity(wd), st.w.clone(), 0, None)];
            for i in 0..wd {
                let mut grown = Vec::new();
                for (degs, w, off, sp) in &partial {
                    for (k, pk) in masses.iter().enumerate() {
                        if pk.is_zero() {
                            continue;
                        }
                        if st.spine == Some(i) {
                            let m = mean.expect("spine implies mean");
                            for j in 0..k {
                                let mut d = degs.clone();
                                d.push(k as u32);
                                grown.push((d, w.clone() * pk.clone() / m.clone(), off + k, Some(off + j)));
                            }
                        } else {
                            let mut d = degs.clone();
                            d.push(k as u32);
                            grown.push((d, w.clone() * pk.clone(), off + k, *sp));
                        }
                    }
                }
                if grown.len() > max_entries {
                    return Err(OracleError::SupportTooLarge(max_entries));
                }
                partial = grown;
            }
            for (degs, w, total, sp) in partial {
                let mut levels = st.levels.clone();
                levels.push(degs);
                next_states.push(LevelState { levels, spine: sp, w });
                next_width.push(total);
            }
            if next_states.len() > max_entries {
                return Err(OracleError::SupportTooLarge(max_entries));
            }
        }
        states = next_states;
        width = next_width;
    }
    let mut out: BTreeMap<FiniteTree, W> = BTreeMap::new();
    for (mut st, wd) in states.into_iter().zip(width) {
        st.levels.push(vec![0; wd]);
        let trimmed: Vec<Vec<u32>> = {
            let mut l = st.levels;
            while l.len() > 1 && l.last().is_some_and(Vec::is_empty) {
                l.pop();
            }
            l
        };
        let t = FiniteTree::from_levels(&trimmed).expect("consistent generations");
        let e = out.entry(t).or_insert_with(W::zero);
        *e = e.clone() + st.w;
    }
    Ok(out)
}

/// Law of `r_h(τ)`; finite support only.
pub fn restriction_law<W: Scalar>(
    p: &OffspringDistribution,
    h: usize,
    max_entries: usize,
) -> Result<TreeLaw<W>, OracleError> {
    let masses = finite_masses::<W>(p)?;
    Ok(TreeLaw::from_support(expand_levels(&masses, None, h, max_entries)?))
}

/// Law of `r_h(τ*)` built from the spine construction: the special node has
/// degree law `p*` and a uniformly chosen special child.
pub fn kesten_restriction_law<W: Scalar>(
    p: &OffspringDistribution,
    h: usize,
    max_entries: usize,
) -> Result<TreeLaw<W>, OracleError> {
    let masses = finite_masses::<W>(p)?;
    let m = W::mean_of(p)?;
    if m.is_zero() {
        return Err(crate::offspring::OffspringError::ZeroOrInfiniteMean.into());
    }
    Ok(TreeLaw::from_support(expand_levels(&masses, Some(&m), h, max_entries)?))
}
