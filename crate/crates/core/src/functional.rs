//! Tree functionals used for conditioning.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::FiniteTree;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunctionalError {
    #[error("cannot parse functional '{0}'")]
    Parse(String),
    #[error("degree set must be non-empty")]
    EmptySet,
    #[error("empty window")]
    EmptyWindow,
}

/// A set `𝒜 ⊂ ℕ` of out-degrees: finite, or of the form `{j, j+1, …}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DegreeSet {
    Finite(BTreeSet<u32>),
    AtLeast(u32),
}

impl DegreeSet {
    pub fn single(k: u32) -> Self {
        DegreeSet::Finite([k].into())
    }

    pub fn leaves() -> Self {
        Self::single(0)
    }

    pub fn all() -> Self {
        DegreeSet::AtLeast(0)
    }

    pub fn finite<I: IntoIterator<Item = u32>>(it: I) -> Result<Self, FunctionalError> {
        let s: BTreeSet<u32> = it.into_iter().collect();
        if s.is_empty() {
            return Err(FunctionalError::EmptySet);
        }
        Ok(DegreeSet::Finite(s))
    }

    pub fn contains(&self, k: u32) -> bool {
        match self {
            DegreeSet::Finite(s) => s.contains(&k),
            DegreeSet::AtLeast(j) => k >= *j,
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0)
    }

    /// Largest element when finite.
    pub fn max(&self) -> Option<u32> {
        match self {
            DegreeSet::Finite(s) => s.iter().next_back().copied(),
            DegreeSet::AtLeast(_) => None,
        }
    }

    pub fn is_everything(&self) -> bool {
        matches!(self, DegreeSet::AtLeast(0))
    }
}

impl fmt::Display for DegreeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeSet::Finite(s) => {
                let parts: Vec<String> = s.iter().map(|k| k.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
            DegreeSet::AtLeast(j) => write!(f, "{j}+"),
        }
    }
}

impl FromStr for DegreeSet {
    type Err = FunctionalError;

    /// `0`, `0,2,5` or `3+`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}');
        if let Some(j) = s.strip_suffix('+') {
            return j
                .trim()
                .parse()
                .map(DegreeSet::AtLeast)
                .map_err(|_| FunctionalError::Parse(s.into()));
        }
        let mut set = BTreeSet::new();
        for part in s.split(',') {
            let k: u32 = part
                .trim()
                .parse()
                .map_err(|_| FunctionalError::Parse(s.into()))?;
            set.insert(k);
        }
        Ok(DegreeSet::Finite(set))
    }
}

/// The functionals `H`, `|·|`, `L_𝒜`, `M` and `𝒵`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctionalSpec {
    Height,
    Size,
    Leaves(DegreeSet),
    MaxOutDegree,
    LargestGeneration,
}

impl FunctionalSpec {
    pub fn eval(&self, t: &FiniteTree) -> u64 {
        match self {
            FunctionalSpec::Height => t.height() as u64,
            FunctionalSpec::Size => t.size() as u64,
            FunctionalSpec::Leaves(a) => t.count_degrees_in(a) as u64,
            FunctionalSpec::MaxOutDegree => t.max_out_degree() as u64,
            FunctionalSpec::LargestGeneration => {
                t.widths().into_iter().max().unwrap_or(1) as u64
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            FunctionalSpec::Height => "height".into(),
            FunctionalSpec::Size => "size".into(),
            FunctionalSpec::Leaves(a) => format!("leaves:{a}"),
            FunctionalSpec::MaxOutDegree => "maxdeg".into(),
            FunctionalSpec::LargestGeneration => "maxgen".into(),
        }
    }
}

impl fmt::Display for FunctionalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl FromStr for FunctionalSpec {
    type Err = FunctionalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "height" | "H" => Ok(FunctionalSpec::Height),
            "size" => Ok(FunctionalSpec::Size),
            "maxdeg" | "max-out-degree" => Ok(FunctionalSpec::MaxOutDegree),
            "maxgen" | "largest-generation" => Ok(FunctionalSpec::LargestGeneration),
            "leaves" => Ok(FunctionalSpec::Leaves(DegreeSet::leaves())),
            _ => match s.strip_prefix("leaves:") {
                Some(rest) => Ok(FunctionalSpec::Leaves(rest.parse()?)),
                None => Err(FunctionalError::Parse(s.into())),
            },
        }
    }
}

/// The conditioning window `[lo, hi)`; `hi = None` is the tail `[lo, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: u64,
    pub hi: Option<u64>,
}

impl Window {
    pub fn new(lo: u64, hi: Option<u64>) -> Result<Self, FunctionalError> {
        if hi.is_some_and(|h| h <= lo) {
            return Err(FunctionalError::EmptyWindow);
        }
        Ok(Window { lo, hi })
    }

    pub fn exact(n: u64) -> Self {
        Window { lo: n, hi: Some(n + 1) }
    }

    /// `[n, n + n1)`.
    pub fn span(n: u64, n1: u64) -> Result<Self, FunctionalError> {
        Self::new(n, Some(n + n1))
    }

    pub fn at_least(n: u64) -> Self {
        Window { lo: n, hi: None }
    }

    pub fn contains(&self, v: u64) -> bool {
        v >= self.lo && self.hi.is_none_or(|h| v < h)
    }

    pub fn is_tail(&self) -> bool {
        self.hi.is_none()
    }

    /// `{v : v + d ∈ self}`, or `None` when that set is empty.
    pub fn shift_down(&self, d: u64) -> Option<Window> {
        match self.hi {
            Some(h) if h <= d => None,
            hi => Some(Window {
                lo: self.lo.saturating_sub(d),
                hi: hi.map(|h| h - d),
            }),
        }
    }

    /// Largest value whose probability is needed to evaluate the window.
    pub fn reach(&self) -> u64 {
        match self.hi {
            Some(h) => h - 1,
            None => self.lo,
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(h) => write!(f, "{}:{}", self.lo, h - self.lo),
            None => write!(f, "{}+", self.lo),
        }
    }
}

impl FromStr for Window {
    type Err = FunctionalError;

    /// `n` (the single value), `n:n1` for `[n, n + n1)`, or `n+`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || FunctionalError::Parse(s.into());
        if let Some(n) = s.strip_suffix('+') {
            return Ok(Window::at_least(n.trim().parse().map_err(|_| bad())?));
        }
        match s.split_once(':') {
            Some((n, n1)) => Window::span(
                n.trim().parse().map_err(|_| bad())?,
                n1.trim().parse().map_err(|_| bad())?,
            ),
            None => Ok(Window::exact(s.parse().map_err(|_| bad())?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in ["height", "size", "leaves:0", "leaves:0,2", "leaves:3+", "maxdeg", "maxgen"] {
            let f: FunctionalSpec = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("leaves:x".parse::<FunctionalSpec>().is_err());
        assert!("depth".parse::<FunctionalSpec>().is_err());
    }

    #[test]
    fn eval_on_small_tree() {
        let t = FiniteTree::decode(&[2, 1, 0, 0]).unwrap();
        assert_eq!(FunctionalSpec::Height.eval(&t), 2);
        assert_eq!(FunctionalSpec::Size.eval(&t), 4);
        assert_eq!(FunctionalSpec::Leaves(DegreeSet::leaves()).eval(&t), 2);
        assert_eq!(FunctionalSpec::Leaves(DegreeSet::AtLeast(1)).eval(&t), 2);
        assert_eq!(FunctionalSpec::MaxOutDegree.eval(&t), 2);
        assert_eq!(FunctionalSpec::LargestGeneration.eval(&t), 2);
    }

    #[test]
    fn windows() {
        let w: Window = "5:2".parse().unwrap();
        assert_eq!(w, Window { lo: 5, hi: Some(7) });
        assert!(w.contains(6) && !w.contains(7));
        assert_eq!(w.shift_down(2), Some(Window { lo: 3, hi: Some(5) }));
        assert_eq!(w.shift_down(7), None);
        assert_eq!("4+".parse::<Window>().unwrap(), Window::at_least(4));
        assert_eq!("3".parse::<Window>().unwrap().to_string(), "3:1");
        assert!("3:0".parse::<Window>().is_err());
    }
}
