//! Rooted ordered trees in Neveu's labelling.
//!
//! A node is a finite word over the positive integers; child `i` of `u` is
//! `ui`. A finite tree is stored by its canonical encoding: the child counts
//! `k_u` listed in lexicographic (= preorder) order of the labels. The
//! encoding is unique per tree, which makes trees usable as map keys.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::functional::DegreeSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("malformed child-count sequence: {0}")]
    MalformedSequence(String),
    #[error("node {0} is not a leaf")]
    NotALeaf(NodeLabel),
    #[error("node {0} does not belong to the tree")]
    NoSuchNode(NodeLabel),
    #[error("infinite node {node} sits at depth < {level}; use restrict_star")]
    CannotRestrict { node: NodeLabel, level: usize },
    #[error("tree is materialized to level {materialized}, level {requested} requested")]
    InsufficientMaterialization { materialized: usize, requested: usize },
    #[error("invalid node label: {0}")]
    InvalidLabel(String),
}

/// A node of the Ulam-Harris-Neveu universe: a finite sequence of positive
/// integers, the empty sequence being the root.
///
/// The derived ordering is the lexicographic order on labels: an ancestor
/// precedes its descendants and siblings compare by index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeLabel(Vec<u32>);

impl NodeLabel {
    pub fn root() -> Self {
        NodeLabel(Vec::new())
    }

    pub fn new(path: Vec<u32>) -> Result<Self, TreeError> {
        if path.contains(&0) {
            return Err(TreeError::InvalidLabel(format!("{path:?} contains 0")));
        }
        Ok(NodeLabel(path))
    }

    pub fn path(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: u32) -> Self {
        assert!(i >= 1, "children are numbered from 1");
        let mut p = self.0.clone();
        p.push(i);
        NodeLabel(p)
    }

    pub fn parent(&self) -> Option<Self> {
        if self.0.is_empty() {
            None
        } else {
            Some(NodeLabel(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// `self ≺ other`: `self` is a proper prefix of `other`.
    pub fn is_ancestor_of(&self, other: &NodeLabel) -> bool {
        self.0.len() < other.0.len() && other.0.starts_with(&self.0)
    }

    /// The ancestor set `A_u` (proper prefixes), root first.
    pub fn ancestors(&self) -> Vec<NodeLabel> {
        (0..self.0.len()).map(|n| NodeLabel(self.0[..n].to_vec())).collect()
    }

    pub fn concat(&self, other: &NodeLabel) -> Self {
        let mut p = self.0.clone();
        p.extend_from_slice(&other.0);
        NodeLabel(p)
    }

    /// `|u|_∞ = max(|u|, max_i u_i)`.
    pub fn infinity_norm(&self) -> usize {
        self.0
            .iter()
            .map(|&i| i as usize)
            .max()
            .unwrap_or(0)
            .max(self.0.len())
    }

    /// Most recent common ancestor, taken as the longest common prefix.
    pub fn mrca<'a, I>(labels: I) -> Option<NodeLabel>
    where
        I: IntoIterator<Item = &'a NodeLabel>,
    {
        let mut iter = labels.into_iter();
        let first = iter.next()?;
        let mut len = first.0.len();
        for l in iter {
            len = len.min(
                first
                    .0
                    .iter()
                    .zip(&l.0)
                    .take_while(|(a, b)| a == b)
                    .count(),
            );
        }
        Some(NodeLabel(first.0[..len].to_vec()))
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// Per-node structural data computed from the preorder encoding.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub depth: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    /// 1-based position among siblings (0 for the root).
    pub child_index: Vec<u32>,
    /// Exclusive end of the preorder block holding the subtree.
    pub end: Vec<usize>,
}

/// A finite rooted ordered tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteTree {
    k: Vec<u32>,
}

impl FiniteTree {
    /// The single-node tree `{∅}`.
    pub fn singleton() -> Self {
        FiniteTree { k: vec![0] }
    }

    /// Decodes a preorder child-count sequence.
    pub fn decode(seq: &[u32]) -> Result<Self, TreeError> {
        if seq.is_empty() {
            return Err(TreeError::MalformedSequence("empty sequence".into()));
        }
        let mut open: u64 = 1;
        for (i, &k) in seq.iter().enumerate() {
            if open == 0 {
                return Err(TreeError::MalformedSequence(format!(
                    "walk terminates at position {i} of {}",
                    seq.len()
                )));
            }
            open = open - 1 + k as u64;
        }
        if open != 0 {
            return Err(TreeError::MalformedSequence(format!(
                "{open} child slot(s) left unfilled"
            )));
        }
        Ok(FiniteTree { k: seq.to_vec() })
    }

    /// Builds a tree from child counts listed generation by generation, each
    /// generation in lexicographic order.
    pub fn from_levels(levels: &[Vec<u32>]) -> Result<Self, TreeError> {
        if levels.first().map(Vec::len) != Some(1) {
            return Err(TreeError::MalformedSequence("level 0 must hold the root only".into()));
        }
        for d in 0..levels.len() {
            let expected: u64 = levels[d].iter().map(|&k| k as u64).sum();
            let got = levels.get(d + 1).map_or(0, |l| l.len() as u64);
            if expected != got {
                return Err(TreeError::MalformedSequence(format!(
                    "generation {} has {got} nodes, {expected} expected",
                    d + 1
                )));
            }
        }
        let mut cursor = vec![0usize; levels.len()];
        let mut k = Vec::with_capacity(levels.iter().map(Vec::len).sum());
        let mut stack = vec![0usize];
        while let Some(d) = stack.pop() {
            let deg = levels[d][cursor[d]];
            cursor[d] += 1;
            k.push(deg);
            stack.extend(std::iter::repeat_n(d + 1, deg as usize));
        }
        Ok(FiniteTree { k })
    }

    /// Trusted constructor for encodings produced by enumeration.
    pub(crate) fn from_encoding_unchecked(k: Vec<u32>) -> Self {
        debug_assert!(FiniteTree::decode(&k).is_ok());
        FiniteTree { k }
    }

    /// Canonical encoding: child counts in preorder.
    pub fn encode(&self) -> &[u32] {
        &self.k
    }

    pub fn into_encoding(self) -> Vec<u32> {
        self.k
    }

    /// Number of nodes `|t|`.
    pub fn size(&self) -> usize {
        self.k.len()
    }

    pub fn root_degree(&self) -> u32 {
        self.k[0]
    }

    pub(crate) fn layout(&self) -> Layout {
        let n = self.k.len();
        let mut depth = vec![0; n];
        let mut parent = vec![None; n];
        let mut child_index = vec![0; n];
        let mut stack: Vec<(usize, u32)> = Vec::new();
        for i in 0..n {
            while matches!(stack.last(), Some(&(_, 0))) {
                stack.pop();
            }
            if let Some(top) = stack.last_mut() {
                parent[i] = Some(top.0);
                child_index[i] = self.k[top.0] - top.1 + 1;
                top.1 -= 1;
                depth[i] = depth[top.0] + 1;
            }
            stack.push((i, self.k[i]));
        }
        let mut end = vec![0; n];
        let mut sizes: Vec<usize> = Vec::new();
        for i in (0..n).rev() {
            let mut size = 1;
            for _ in 0..self.k[i] {
                size += sizes.pop().expect("valid encoding");
            }
            sizes.push(size);
            end[i] = i + size;
        }
        Layout {
            depth,
            parent,
            child_index,
            end,
        }
    }

    /// Node labels in preorder (= lexicographic order).
    pub fn labels(&self) -> Vec<NodeLabel> {
        let layout = self.layout();
        let mut labels: Vec<NodeLabel> = Vec::with_capacity(self.k.len());
        for i in 0..self.k.len() {
            let l = match layout.parent[i] {
                None => NodeLabel::root(),
                Some(p) => labels[p].child(layout.child_index[i]),
            };
            labels.push(l);
        }
        labels
    }

    pub(crate) fn index_with(&self, layout: &Layout, label: &NodeLabel) -> Option<usize> {
        let mut idx = 0;
        for &c in label.path() {
            if c == 0 || c > self.k[idx] {
                return None;
            }
            let mut child = idx + 1;
            for _ in 1..c {
                child = layout.end[child];
            }
            idx = child;
        }
        Some(idx)
    }

    /// Preorder index of a label, if the node belongs to the tree.
    pub fn index_of(&self, label: &NodeLabel) -> Option<usize> {
        self.index_with(&self.layout(), label)
    }

    pub fn contains(&self, label: &NodeLabel) -> bool {
        self.index_of(label).is_some()
    }

    /// `k_u(t)`, or `None` when `u ∉ t`.
    pub fn degree_of(&self, label: &NodeLabel) -> Option<u32> {
        self.index_of(label).map(|i| self.k[i])
    }

    pub fn leaves(&self) -> Vec<NodeLabel> {
        self.labels()
            .into_iter()
            .zip(&self.k)
            .filter(|(_, &k)| k == 0)
            .map(|(l, _)| l)
            .collect()
    }

    pub fn height(&self) -> usize {
        self.layout().depth.into_iter().max().unwrap_or(0)
    }

    /// Generation sizes `z_0, …, z_H`.
    pub fn widths(&self) -> Vec<usize> {
        let layout = self.layout();
        let h = layout.depth.iter().copied().max().unwrap_or(0);
        let mut z = vec![0; h + 1];
        for d in layout.depth {
            z[d] += 1;
        }
        z
    }

    /// `z_h(t)` for any level (zero above the height).
    pub fn width_at(&self, h: usize) -> usize {
        self.widths().get(h).copied().unwrap_or(0)
    }

    pub fn max_out_degree(&self) -> u32 {
        self.k.iter().copied().max().unwrap_or(0)
    }

    pub fn count_degrees_in(&self, set: &DegreeSet) -> usize {
        self.k.iter().filter(|&&k| set.contains(k)).count()
    }

    pub fn stats(&self, set: &DegreeSet) -> TreeStats {
        let widths = self.widths();
        TreeStats {
            height: widths.len() - 1,
            size: self.k.len(),
            largest_generation: widths.iter().copied().max().unwrap_or(1),
            widths,
            max_out_degree: self.max_out_degree(),
            leaf_type_count: self.count_degrees_in(set),
        }
    }

    /// `r_h(t)`: nodes of depth at most `h`.
    pub fn restrict(&self, h: usize) -> FiniteTree {
        let layout = self.layout();
        let k = self
            .k
            .iter()
            .zip(&layout.depth)
            .filter(|(_, &d)| d <= h)
            .map(|(&k, &d)| if d == h { 0 } else { k })
            .collect();
        FiniteTree { k }
    }

    /// The subtree `S_u(t)` above `u`.
    pub fn subtree(&self, u: &NodeLabel) -> Result<FiniteTree, TreeError> {
        let layout = self.layout();
        let i = self
            .index_with(&layout, u)
            .ok_or_else(|| TreeError::NoSuchNode(u.clone()))?;
        Ok(FiniteTree {
            k: self.k[i..layout.end[i]].to_vec(),
        })
    }

    /// Replaces the subtree above `u` by a single leaf.
    pub fn prune_at(&self, u: &NodeLabel) -> Result<FiniteTree, TreeError> {
        let layout = self.layout();
        let i = self
            .index_with(&layout, u)
            .ok_or_else(|| TreeError::NoSuchNode(u.clone()))?;
        let mut k = Vec::with_capacity(self.k.len());
        k.extend_from_slice(&self.k[..i]);
        k.push(0);
        k.extend_from_slice(&self.k[layout.end[i]..]);
        Ok(FiniteTree { k })
    }

    /// `t ⊛_x t'`: grafts `other` on the leaf `x`.
    pub fn graft(&self, x: &NodeLabel, other: &FiniteTree) -> Result<FiniteTree, TreeError> {
        let i = self
            .index_of(x)
            .ok_or_else(|| TreeError::NoSuchNode(x.clone()))?;
        if self.k[i] != 0 {
            return Err(TreeError::NotALeaf(x.clone()));
        }
        let mut k = Vec::with_capacity(self.k.len() + other.k.len() - 1);
        k.extend_from_slice(&self.k[..i]);
        k.extend_from_slice(&other.k);
        k.extend_from_slice(&self.k[i + 1..]);
        Ok(FiniteTree { k })
    }

    /// Membership of `s` in the graft set `T(t, x)`.
    ///
    /// `s ∈ T(t, x)` iff `x ∈ s` and pruning `s` at `x` gives back `t`.
    pub fn graft_set_contains(&self, x: &NodeLabel, s: &FiniteTree) -> bool {
        match s.prune_at(x) {
            Ok(pruned) => pruned == *self && self.degree_of(x) == Some(0),
            Err(_) => false,
        }
    }

    /// Child counts grouped by generation, each level in lexicographic order.
    pub(crate) fn level_degrees(&self) -> Vec<Vec<u32>> {
        let layout = self.layout();
        let mut levels: Vec<Vec<u32>> = Vec::new();
        for (i, &d) in layout.depth.iter().enumerate() {
            if levels.len() <= d {
                levels.resize(d + 1, Vec::new());
            }
            levels[d].push(self.k[i]);
        }
        levels
    }

    /// `sup{h : r_h(t) = r_h(t')}`, or `None` when the trees are equal.
    ///
    /// `r_h` is determined by the child counts of the nodes of depth `< h`,
    /// so the supremum is the first generation whose child counts differ.
    pub fn agreement_level(&self, other: &FiniteTree) -> Option<usize> {
        if self == other {
            return None;
        }
        let a = self.level_degrees();
        let b = other.level_degrees();
        let levels = a.len().max(b.len());
        let empty = Vec::new();
        (0..levels).find(|&l| a.get(l).unwrap_or(&empty) != b.get(l).unwrap_or(&empty))
    }

    /// The ultrametric `d(t, t') = 2^{-sup{h : r_h(t) = r_h(t')}}`.
    pub fn distance(&self, other: &FiniteTree) -> f64 {
        match self.agreement_level(other) {
            None => 0.0,
            Some(h) => (-(h as f64)).exp2(),
        }
    }

    /// Minami's leaf tree: its nodes are the leaves of `self`.
    ///
    /// The left-most leaf becomes the root; the left-most leaves of the
    /// subtrees hanging off the left-most branch become its children (in
    /// lexicographic order of those leaves), and so on recursively.
    pub fn minami_map(&self) -> FiniteTree {
        let layout = self.layout();
        let mut out = Vec::new();
        let mut work = vec![0usize];
        while let Some(v) = work.pop() {
            let mut path = Vec::new();
            let mut w = v;
            while self.k[w] > 0 {
                path.push(w);
                w += 1;
            }
            let mut hanging = Vec::new();
            for &w in path.iter().rev() {
                let mut c = layout.end[w + 1];
                for _ in 1..self.k[w] {
                    hanging.push(c);
                    c = layout.end[c];
                }
            }
            out.push(hanging.len() as u32);
            work.extend(hanging.into_iter().rev());
        }
        FiniteTree { k: out }
    }

    /// All plane trees with exactly `n` nodes (Catalan(n-1) of them).
    pub fn all_of_size(n: usize) -> Vec<FiniteTree> {
        assert!(n >= 1);
        fn forests(n: usize, k: usize, memo: &mut Vec<Vec<Option<Vec<Vec<u32>>>>>) -> Vec<Vec<u32>> {
            if let Some(v) = &memo[n][k] {
                return v.clone();
            }
            let res = if k == 0 {
                if n == 0 {
                    vec![Vec::new()]
                } else {
                    Vec::new()
                }
            } else {
                let mut res = Vec::new();
                for first in 1..=n.saturating_sub(k - 1) {
                    let heads = trees(first, memo);
                    let tails = forests(n - first, k - 1, memo);
                    for h in &heads {
                        for t in &tails {
                            let mut v = h.clone();
                            v.extend_from_slice(t);
                            res.push(v);
                        }
                    }
                }
                res
            };
            memo[n][k] = Some(res.clone());
            res
        }
        fn trees(n: usize, memo: &mut Vec<Vec<Option<Vec<Vec<u32>>>>>) -> Vec<Vec<u32>> {
            let mut res = Vec::new();
            for k in 0..n {
                for f in forests(n - 1, k, memo) {
                    let mut v = vec![k as u32];
                    v.extend(f);
                    res.push(v);
                }
            }
            res
        }
        let mut memo = vec![vec![None; n + 1]; n + 1];
        trees(n, &mut memo)
            .into_iter()
            .map(|k| FiniteTree { k })
            .collect()
    }

    /// All plane trees with at most `n` nodes, by increasing size.
    pub fn all_up_to(n: usize) -> Vec<FiniteTree> {
        (1..=n).flat_map(FiniteTree::all_of_size).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TreeJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, TreeError> {
        let j: TreeJson =
            serde_json::from_str(s).map_err(|e| TreeError::MalformedSequence(e.to_string()))?;
        if j.inf.as_ref().is_some_and(|v| !v.is_empty()) {
            return Err(TreeError::MalformedSequence(
                "tree has infinite nodes; parse it as an extended tree".into(),
            ));
        }
        FiniteTree::decode(&j.k)
    }
}

impl fmt::Display for FiniteTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.k.iter().map(|k| k.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Statistics of a finite tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    pub height: usize,
    pub size: usize,
    /// `z_h` for `h = 0..=height`.
    pub widths: Vec<usize>,
    pub max_out_degree: u32,
    /// `max_h z_h`.
    pub largest_generation: usize,
    /// Number of nodes whose out-degree lies in the requested set.
    pub leaf_type_count: usize,
}

/// JSON form shared by finite and extended trees.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeJson {
    pub k: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inf: Option<Vec<Vec<u32>>>,
}

impl From<&FiniteTree> for TreeJson {
    fn from(t: &FiniteTree) -> Self {
        TreeJson {
            k: t.k.clone(),
            inf: None,
        }
    }
}

/// A tree that may carry nodes with infinitely many children.
///
/// Only a finite window is stored: every node of depth at most `level` is
/// present, and each infinite node of depth `< level` has its first `level`
/// children materialized. The restrictions `r_n^∞` with `n ≤ level` are the
/// observable part.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtendedTree {
    base: FiniteTree,
    infinite: BTreeSet<NodeLabel>,
    level: usize,
}

impl ExtendedTree {
    /// A finite tree seen as an extended tree (fully materialized).
    pub fn from_finite(t: FiniteTree) -> Self {
        ExtendedTree {
            base: t,
            infinite: BTreeSet::new(),
            level: usize::MAX,
        }
    }

    pub fn new(
        base: FiniteTree,
        infinite: BTreeSet<NodeLabel>,
        level: usize,
    ) -> Result<Self, TreeError> {
        let layout = base.layout();
        for u in &infinite {
            let i = base
                .index_with(&layout, u)
                .ok_or_else(|| TreeError::NoSuchNode(u.clone()))?;
            if u.depth() < level && (base.k[i] as usize) < level {
                return Err(TreeError::InsufficientMaterialization {
                    materialized: base.k[i] as usize,
                    requested: level,
                });
            }
        }
        Ok(ExtendedTree {
            base,
            infinite,
            level,
        })
    }

    pub fn base(&self) -> &FiniteTree {
        &self.base
    }

    pub fn infinite_nodes(&self) -> &BTreeSet<NodeLabel> {
        &self.infinite
    }

    pub fn materialized_level(&self) -> usize {
        self.level
    }

    /// `r_h` of the underlying tree; refused when an infinite node lies
    /// strictly below level `h`.
    pub fn restrict(&self, h: usize) -> Result<FiniteTree, TreeError> {
        if let Some(u) = self.infinite.iter().find(|u| u.depth() < h) {
            return Err(TreeError::CannotRestrict {
                node: u.clone(),
                level: h,
            });
        }
        if h > self.level {
            return Err(TreeError::InsufficientMaterialization {
                materialized: self.level,
                requested: h,
            });
        }
        Ok(self.base.restrict(h))
    }

    /// `r_n^∞`: the nodes `u` with `|u|_∞ ≤ n`.
    pub fn restrict_star(&self, n: usize) -> Result<FiniteTree, TreeError> {
        if n > self.level {
            return Err(TreeError::InsufficientMaterialization {
                materialized: self.level,
                requested: n,
            });
        }
        Ok(restrict_star_finite(&self.base, n))
    }

    /// `d_∞` between two extended trees, compared up to the common
    /// materialization level.
    pub fn distance_star(&self, other: &ExtendedTree) -> Result<f64, TreeError> {
        if self == other {
            return Ok(0.0);
        }
        let top = self.level.min(other.level);
        let bound = if top == usize::MAX {
            let b = |t: &FiniteTree| t.height().max(t.max_out_degree() as usize);
            b(&self.base).max(b(&other.base)) + 1
        } else {
            top
        };
        for n in 0..=bound {
            if self.restrict_star(n)? != other.restrict_star(n)? {
                return Ok((1.0 - n as f64).exp2());
            }
        }
        if top == usize::MAX {
            Ok(0.0)
        } else {
            Err(TreeError::InsufficientMaterialization {
                materialized: top,
                requested: top + 1,
            })
        }
    }

    pub fn to_json(&self) -> String {
        let j = TreeJson {
            k: self.base.k.clone(),
            inf: Some(self.infinite.iter().map(|u| u.path().to_vec()).collect()),
        };
        serde_json::to_string(&j).expect("serializable")
    }
}

/// `r_n^∞` on a finite tree.
pub fn restrict_star_finite(t: &FiniteTree, n: usize) -> FiniteTree {
    let layout = t.layout();
    let mut keep = vec![false; t.k.len()];
    let mut k = Vec::new();
    for i in 0..t.k.len() {
        keep[i] = match layout.parent[i] {
            None => true,
            Some(p) => keep[p] && layout.depth[i] <= n && layout.child_index[i] as usize <= n,
        };
        if keep[i] {
            k.push(if layout.depth[i] == n {
                0
            } else {
                t.k[i].min(n as u32)
            });
        }
    }
    FiniteTree { k }
}

/// How two graft sets `T(t1, x1)` and `T(t2, x2)` intersect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraftIntersection {
    /// The intersection is the graft set `T(t, x)`.
    GraftSet(FiniteTree, NodeLabel),
    /// The intersection is the single tree `t1 ∪ t2`.
    Singleton(FiniteTree),
    Empty,
}

/// Four-case classification of the intersection of two graft sets.
pub fn graft_intersection(
    t1: &FiniteTree,
    x1: &NodeLabel,
    t2: &FiniteTree,
    x2: &NodeLabel,
) -> GraftIntersection {
    if x1 == x2 {
        return if t1 == t2 {
            GraftIntersection::GraftSet(t1.clone(), x1.clone())
        } else {
            GraftIntersection::Empty
        };
    }
    if x2.is_ancestor_of(x1) {
        return if t2.graft_set_contains(x2, t1) {
            GraftIntersection::GraftSet(t1.clone(), x1.clone())
        } else {
            GraftIntersection::Empty
        };
    }
    if x1.is_ancestor_of(x2) {
        return if t1.graft_set_contains(x1, t2) {
            GraftIntersection::GraftSet(t2.clone(), x2.clone())
        } else {
            GraftIntersection::Empty
        };
    }
    match (t1.prune_at(x2), t2.prune_at(x1)) {
        (Ok(c1), Ok(c2)) if c1 == c2 => {
            let part = t2.subtree(x1).expect("x1 ∈ t2");
            match t1.graft(x1, &part) {
                Ok(u) => GraftIntersection::Singleton(u),
                Err(_) => GraftIntersection::Empty,
            }
        }
        _ => GraftIntersection::Empty,
    }
}
