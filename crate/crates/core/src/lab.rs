//! Experiment drivers: local-limit convergence tables, ratio tables,
//! Kesten–Stigum Monte Carlo, condensation geometry and graft property
//! probes.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use num_traits::Zero;
use thiserror::Error;

use crate::functional::{DegreeSet, FunctionalSpec, Window};
use crate::offspring::{
    extinction_probability, genericity, Criticality, Genericity, OffspringDistribution,
    OffspringError,
};
use crate::oracle::{
    conditioned_restriction_law, eq_tmp_ratio, kesten_restriction_law, window_prob, OracleError,
    TreeLaw, TvDistance, DEFAULT_MAX_ENTRIES,
};
use crate::sampler::{
    sample_conditioned_restricted, sample_process, CondensationSampler, KestenSampler,
    SampleBudget, SampleError,
};
use crate::stats::{chi_square, empirical, replicate_from, MeanEstimate};
use crate::tree::{restrict_star_finite, FiniteTree, NodeLabel};
use crate::weight::{rational_to_string, Rational, Weight};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Offspring(#[from] OffspringError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("distribution is generic for {0}; no condensation tree")]
    NotNonGeneric(DegreeSet),
    #[error("{0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Mc,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Mc => "mc",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "mc" => Ok(Mode::Mc),
            _ => Err(LabError::InvalidInput(format!("unknown mode {s}"))),
        }
    }
}

/// Knobs shared by the experiments.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Largest tree size enumerated by the oracle when no closed route
    /// applies.
    pub size_cap: usize,
    /// Monte Carlo replicates per window (and for sampled targets).
    pub reps: usize,
    pub seed: u64,
    pub budget: SampleBudget,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            size_cap: 15,
            reps: 10_000,
            seed: 0,
            budget: SampleBudget::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    Kesten,
    Condensation,
}

/// The limit law of the conditioned trees and why it was chosen.
#[derive(Debug, Clone)]
pub struct Target {
    pub kind: TargetKind,
    pub distribution: OffspringDistribution,
    pub routing: String,
}

/// Picks the local limit of `τ` given `A(τ) ∈ 𝔸_n`.
pub fn target_for(p: &OffspringDistribution, f: &FunctionalSpec) -> Result<Target, LabError> {
    p.require_nondegenerate()?;
    let kesten = |routing: &str| Target {
        kind: TargetKind::Kesten,
        distribution: p.clone(),
        routing: routing.into(),
    };
    match (p.criticality(), f) {
        (Criticality::Super, _) => Err(LabError::InvalidInput(
            "super-critical distribution: condition the conjugate law instead".into(),
        )),
        (Criticality::Critical, _) => Ok(kesten("critical: Kesten tree of p")),
        (Criticality::Sub, FunctionalSpec::Height) => Ok(kesten("sub-critical height: Kesten tree of p")),
        (Criticality::Sub, FunctionalSpec::Size | FunctionalSpec::Leaves(_)) => {
            let set = match f {
                FunctionalSpec::Leaves(a) => a.clone(),
                _ => DegreeSet::all(),
            };
            let report = genericity(p, &set)?;
            Ok(match report.classification {
                Genericity::Generic { theta_c, .. } => Target {
                    kind: TargetKind::Kesten,
                    distribution: report.distribution,
                    routing: format!("sub-critical generic for {set} (theta_c = {theta_c}): Kesten tree of the critical tilt"),
                },
                Genericity::NonGeneric { theta_star } => Target {
                    kind: TargetKind::Condensation,
                    distribution: report.distribution,
                    routing: format!("sub-critical non-generic for {set} (theta* = {theta_star}): condensation tree"),
                },
            })
        }
        (Criticality::Sub, _) => Err(LabError::InvalidInput(format!(
            "functional {f} needs a critical distribution"
        ))),
    }
}

/// A law on restricted trees, in the best arithmetic available.
#[derive(Debug, Clone)]
enum Law {
    Exact(TreeLaw<Rational>),
    Float(TreeLaw<f64>),
    Sampled(BTreeMap<FiniteTree, f64>),
}

impl Law {
    fn to_f64(&self) -> TreeLaw<f64> {
        match self {
            Law::Exact(l) => l.to_f64(),
            Law::Float(l) => l.clone(),
            Law::Sampled(m) => TreeLaw::new(m.clone(), 0.0),
        }
    }

    fn push_forward<F: Fn(&FiniteTree) -> FiniteTree>(&self, f: F) -> Law {
        match self {
            Law::Exact(l) => Law::Exact(l.push_forward(f)),
            Law::Float(l) => Law::Float(l.push_forward(f)),
            Law::Sampled(m) => {
                let mut out = BTreeMap::new();
                for (t, w) in m {
                    *out.entry(f(t)).or_insert(0.0) += w;
                }
                Law::Sampled(out)
            }
        }
    }

    fn tv(&self, other: &Law) -> (TvDistance<f64>, bool) {
        if let (Law::Exact(a), Law::Exact(b)) = (self, other) {
            let d = a.tv(b);
            let exact = d.is_exact();
            return (
                TvDistance {
                    point: d.point.approx(),
                    lower: d.lower.approx(),
                    upper: d.upper.approx(),
                },
                exact,
            );
        }
        (self.to_f64().tv(&other.to_f64()), false)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub window: Window,
    pub tv: f64,
    pub tv_lower: f64,
    pub tv_upper: f64,
    /// Whether the TV value is an exact rational converted to float.
    pub tv_exact: bool,
    /// Monte Carlo standard error scale of the TV estimate.
    pub tv_sigma: Option<f64>,
    /// `P(𝔸_{n+1}) / P(𝔸_n)` with `𝔸_{n+1}` the window shifted by one.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualRow {
    pub window: Window,
    pub tree: String,
    pub leaf: String,
    pub d: u64,
    pub n0: u64,
    pub residual: f64,
    pub residual_exact: Option<String>,
    pub zero: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub functional: String,
    pub h: usize,
    pub mode: Mode,
    pub target: TargetKind,
    pub routing: String,
    pub rows: Vec<ConvergenceRow>,
    pub residuals: Vec<ResidualRow>,
}

impl ConvergenceReport {
    /// TV point values are non-increasing along the windows.
    pub fn tv_non_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].tv <= w[0].tv)
    }

    pub fn residuals_vanish(&self) -> bool {
        self.residuals.iter().all(|r| r.zero)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("window,tv,tv_lower,tv_upper,tv_exact,tv_sigma,ratio\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.window,
                r.tv,
                r.tv_lower,
                r.tv_upper,
                r.tv_exact,
                r.tv_sigma.map_or(String::new(), |s| s.to_string()),
                r.ratio.map_or(String::new(), |s| s.to_string()),
            ));
        }
        out
    }
}

fn use_exact(p: &OffspringDistribution) -> bool {
    p.is_exact()
}

/// Beyond this height, exact iterates of `g` have denominators too large to
/// be useful and floats are used instead.
const EXACT_HEIGHT_LIMIT: u64 = 14;

fn exact_window(p: &OffspringDistribution, f: &FunctionalSpec, w: &Window) -> bool {
    use_exact(p) && !(matches!(f, FunctionalSpec::Height) && w.reach() > EXACT_HEIGHT_LIMIT)
}

/// `P(A ∈ w)` as float together with its exact value when available.
fn prob_any(
    p: &OffspringDistribution,
    f: &FunctionalSpec,
    w: &Window,
) -> Result<(f64, Option<Rational>), OracleError> {
    if exact_window(p, f, w) {
        match window_prob::<Rational>(p, f, w) {
            Ok(r) => return Ok((r.approx(), Some(r))),
            Err(OracleError::NotExact(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((window_prob::<f64>(p, f, w)?, None))
}

fn shift_up(w: &Window, s: u64) -> Window {
    Window {
        lo: w.lo + s,
        hi: w.hi.map(|h| h + s),
    }
}

fn window_ratio(p: &OffspringDistribution, f: &FunctionalSpec, w: &Window, step: u64) -> Option<f64> {
    let (den, _) = prob_any(p, f, w).ok()?;
    let (num, _) = prob_any(p, f, &shift_up(w, step)).ok()?;
    (den > 0.0).then(|| num / den)
}

fn exact_conditioned(
    p: &OffspringDistribution,
    f: &FunctionalSpec,
    w: &Window,
    h: usize,
    size_cap: usize,
) -> Result<Law, OracleError> {
    if exact_window(p, f, w) {
        match conditioned_restriction_law::<Rational>(p, f, w, h, size_cap) {
            Ok(l) => return Ok(Law::Exact(l)),
            Err(OracleError::NotExact(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(Law::Float(conditioned_restriction_law::<f64>(p, f, w, h, size_cap)?))
}

fn sample_law<F>(seed: u64, first: u64, reps: usize, f: F) -> Result<Law, SampleError>
where
    F: Fn(&mut crate::rng::StreamRng) -> Result<FiniteTree, SampleError> + Sync,
{
    let trees: Result<Vec<FiniteTree>, SampleError> = replicate_from(seed, first, reps, f).into_iter().collect();
    Ok(Law::Sampled(empirical(&trees?)))
}

/// Stream block reserved for target sampling.
const TARGET_STREAMS: u64 = 1 << 48;

fn target_law(target: &Target, h: usize, cfg: &ExperimentConfig) -> Result<Law, LabError> {
    let q = &target.distribution;
    match target.kind {
        TargetKind::Kesten if q.support_max().is_some() => {
            if q.is_exact() {
                Ok(Law::Exact(kesten_restriction_law::<Rational>(q, h, DEFAULT_MAX_ENTRIES)?))
            } else {
                Ok(Law::Float(kesten_restriction_law::<f64>(q, h, DEFAULT_MAX_ENTRIES)?))
            }
        }
        TargetKind::Kesten => {
            let s = KestenSampler::new(q)?;
            Ok(sample_law(cfg.seed, TARGET_STREAMS, cfg.reps, |r| s.sample(r, h, &cfg.budget))?)
        }
        TargetKind::Condensation => {
            let s = CondensationSampler::new(q)?;
            Ok(sample_law(cfg.seed, TARGET_STREAMS, cfg.reps, |r| {
                let c = s.sample(r, h, &cfg.budget)?;
                Ok(c.tree.restrict_star(h).expect("materialized to level h"))
            })?)
        }
    }
}

fn tv_sigma(law: &Law, reps: usize) -> Option<f64> {
    match law {
        Law::Sampled(m) => Some(
            m.values()
                .map(|p| (p * (1.0 - p) / reps as f64).sqrt())
                .sum::<f64>()
                / 2.0,
        ),
        _ => None,
    }
}

fn residual_rows(
    p: &OffspringDistribution,
    f: &FunctionalSpec,
    w: &Window,
    size_cap: usize,
) -> Vec<ResidualRow> {
    let mut rows = Vec::new();
    for t in FiniteTree::all_up_to(3) {
        for x in t.leaves() {
            let row = if exact_window(p, f, w) {
                eq_tmp_ratio::<Rational>(p, f, &t, &x, w, size_cap).map(|e| {
                    let r = e.residual();
                    (e.d, e.n0, r.approx(), Some(rational_to_string(&r)), r.is_zero())
                })
            } else {
                eq_tmp_ratio::<f64>(p, f, &t, &x, w, size_cap).map(|e| {
                    let r = e.residual();
                    (e.d, e.n0, r, None, r.abs() < 1e-12)
                })
            };
            if let Ok((d, n0, residual, residual_exact, zero)) = row {
                if w.lo >= n0 {
                    rows.push(ResidualRow {
                        window: *w,
                        tree: t.to_string(),
                        leaf: x.to_string(),
                        d,
                        n0,
                        residual,
                        residual_exact,
                        zero,
                    });
                }
            }
        }
    }
    rows
}

/// TV distance between the laws of `r_h(τ_n)` and of the restriction of the
/// local limit, for each conditioning window.
///
/// Exact mode uses the enumeration oracle (and exact `eq_tmp` residuals for
/// additive functionals); Monte Carlo mode uses rejection sampling with
/// `cfg.reps` draws per window. Condensation targets are always sampled and
/// compared through `r_h^∞`.
pub fn convergence_experiment(
    p: &OffspringDistribution,
    f: &FunctionalSpec,
    windows: &[Window],
    h: usize,
    mode: Mode,
    cfg: &ExperimentConfig,
) -> Result<ConvergenceReport, LabError> {
    let target = target_for(p, f)?;
    let mut tl = target_law(&target, h, cfg)?;
    let star = target.kind == TargetKind::Condensation;
    if star {
        tl = tl.push_forward(|t| restrict_star_finite(t, h));
    }
    let rows: Result<Vec<(ConvergenceRow, Vec<ResidualRow>)>, LabError> = windows
        .par_iter()
        .enumerate()
        .map(|(i, w)| {
            let mut law = match mode {
                Mode::Exact => exact_conditioned(p, f, w, h, cfg.size_cap)?,
                Mode::Mc => sample_law(cfg.seed, (i * cfg.reps) as u64, cfg.reps, |r| {
                    sample_conditioned_restricted(p, f, *w, Some(h), r, &cfg.budget)
                })?,
            };
            if star {
                law = law.push_forward(|t| restrict_star_finite(t, h));
            }
            let (d, exact) = law.tv(&tl);
            let sigma = match (tv_sigma(&law, cfg.reps), tv_sigma(&tl, cfg.reps)) {
                (None, None) => None,
                (a, b) => Some(a.unwrap_or(0.0) + b.unwrap_or(0.0)),
            };
            let residuals = match (mode, f) {
                (Mode::Exact, FunctionalSpec::Size | FunctionalSpec::Height | FunctionalSpec::Leaves(_)) => {
                    residual_rows(p, f, w, cfg.size_cap)
                }
                _ => Vec::new(),
            };
            Ok((
                ConvergenceRow {
                    window: *w,
                    tv: d.point,
                    tv_lower: d.lower,
                    tv_upper: d.upper,
                    tv_exact: exact,
                    tv_sigma: sigma,
                    ratio: window_ratio(p, f, w, 1),
                },
                residuals,
            ))
        })
        .collect();
    let (rows, residuals): (Vec<_>, Vec<_>) = rows?.into_iter().unzip();
    Ok(ConvergenceReport {
        functional: f.name(),
        h,
        mode,
        target: target.kind,
        routing: target.routing,
        rows,
        residuals: residuals.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub n: u64,
    pub ratio: Option<f64>,
    pub exact: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioTable {
    pub functional: String,
    /// Window width; `None` for tails.
    pub n1: Option<u64>,
    pub step: u64,
    /// `m` for height, 1 for size and leaf counts at criticality.
    pub limit: Option<f64>,
    pub rows: Vec<RatioRow>,
}

impl RatioTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,ratio,exact,limit\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.n,
                r.ratio.map_or("undefined".into(), |v| v.to_string()),
                r.exact.clone().unwrap_or_default(),
                self.limit.map_or(String::new(), |v| v.to_string()),
            ));
        }
        out
    }
}

/// `P(𝔸_{n+step}) / P(𝔸_n)` with `𝔸_n = {A(τ) ∈ [n, n + n1)}` (a tail when
/// `n1` is `None`). A vanishing denominator gives an undefined row. For a
/// periodic distribution pass the period as `step` to follow one residue
/// class.
pub fn ratio_table(
    p: &OffspringDistribution,
    f: &FunctionalSpec,
    ns: &[u64],
    n1: Option<u64>,
    step: u64,
) -> Result<RatioTable, LabError> {
    if step == 0 {
        return Err(LabError::InvalidInput("step must be positive".into()));
    }
    let window = |n: u64| -> Result<Window, LabError> {
        match n1 {
            Some(w) => Window::span(n, w).map_err(|e| LabError::InvalidInput(e.to_string())),
            None => Ok(Window::at_least(n)),
        }
    };
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let (den, den_x) = prob_any(p, f, &window(n)?)?;
        let (num, num_x) = prob_any(p, f, &window(n + step)?)?;
        let exact = match (num_x, den_x) {
            (Some(a), Some(b)) if !b.is_zero() => Some(rational_to_string(&(a / b))),
            _ => None,
        };
        rows.push(RatioRow {
            n,
            ratio: (den > 0.0).then(|| num / den),
            exact,
        });
    }
    let critical = p.criticality() == Criticality::Critical;
    let limit = match f {
        FunctionalSpec::Height if p.criticality() != Criticality::Super => Some(p.mean()),
        FunctionalSpec::Size | FunctionalSpec::Leaves(_) if critical => Some(1.0),
        _ => None,
    };
    Ok(RatioTable {
        functional: f.name(),
        n1,
        step,
        limit,
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KestenStigumReport {
    pub n: usize,
    pub reps: usize,
    pub mean_w: MeanEstimate,
    pub ci: (f64, f64),
    pub eps: f64,
    /// Fraction of runs with `W_n < ε`.
    pub frac_below_eps: MeanEstimate,
    /// Fraction of runs with `Z_n = 0`.
    pub frac_extinct: MeanEstimate,
    pub q: f64,
    /// `E[ζ log⁺ ζ]` over the stored masses.
    pub x_log_x: f64,
    pub finite_support: bool,
    /// `E[W_n] = 1` and `P(Z_n = 0) ≈ q` within three standard errors, which
    /// is what `P(W = 0) = q` predicts when `E[ζ log⁺ ζ] < ∞`.
    pub consistent: bool,
}

/// Monte Carlo of `W_n = Z_n / mⁿ`, one RNG stream per replicate.
pub fn kesten_stigum_mc(
    p: &OffspringDistribution,
    n: usize,
    reps: usize,
    seed: u64,
    eps: f64,
) -> Result<KestenStigumReport, LabError> {
    p.require_nondegenerate()?;
    if p.criticality() != Criticality::Super {
        return Err(OffspringError::NotSuperCritical(p.mean()).into());
    }
    if reps < 2 {
        return Err(LabError::InvalidInput("need at least two replicates".into()));
    }
    let paths = replicate_from(seed, 0, reps, |r| {
        let path = sample_process(p, r, n);
        (path.w[n], path.z[n])
    });
    let ws: Vec<f64> = paths.iter().map(|x| x.0).collect();
    let mean_w = MeanEstimate::from_samples(&ws);
    let below = ws.iter().filter(|&&w| w < eps).count();
    let extinct = paths.iter().filter(|x| x.1 == 0).count();
    let q = extinction_probability(p)?.q;
    let x_log_x = p
        .probs()
        .iter()
        .enumerate()
        .skip(2)
        .map(|(k, pk)| pk * k as f64 * (k as f64).ln())
        .sum();
    let frac_extinct = MeanEstimate::proportion(extinct, reps);
    let sigma_q = (q * (1.0 - q) / reps as f64).sqrt();
    let consistent = mean_w.within(1.0, 3.0) && (frac_extinct.mean - q).abs() <= 3.0 * sigma_q;
    Ok(KestenStigumReport {
        n,
        reps,
        ci: mean_w.ci(1.96),
        mean_w,
        eps,
        frac_below_eps: MeanEstimate::proportion(below, reps),
        frac_extinct,
        q,
        x_log_x,
        finite_support: p.support_max().is_some(),
        consistent,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CondensationReport {
    pub mean: f64,
    pub reps: usize,
    pub depth_cap: usize,
    /// Counts of depths `0..=depth_cap`, then the count of larger depths.
    pub depth_counts: Vec<usize>,
    /// `(1 − m) mᵏ` for the same cells.
    pub expected: Vec<f64>,
    pub tv: f64,
    pub chi_square: f64,
    pub chi_df: usize,
    pub depth0: MeanEstimate,
    /// Samples whose materialized tree carries the single infinite node
    /// exactly when that node lies inside the window.
    pub one_infinite: usize,
}

/// Materialization level used for the structural check.
const CONDENSATION_LEVEL: usize = 3;

/// Depth of the infinite node of the condensation tree of `p` against
/// `Geom(1 − m) − 1`.
pub fn condensation_experiment(
    p: &OffspringDistribution,
    reps: usize,
    depth_cap: usize,
    seed: u64,
) -> Result<CondensationReport, LabError> {
    let s = CondensationSampler::new(p)?;
    let budget = SampleBudget::default();
    let samples: Result<Vec<(usize, bool)>, SampleError> = replicate_from(seed, 0, reps, |r| {
        let c = s.sample(r, CONDENSATION_LEVEL, &budget)?;
        let inside = c.tree.base().contains(&c.infinite_node);
        let marked = c.tree.infinite_nodes();
        let ok = if inside {
            marked.len() == 1 && marked.contains(&c.infinite_node)
        } else {
            marked.is_empty()
        };
        Ok((c.infinite_depth, ok))
    })
    .into_iter()
    .collect();
    let samples = samples?;
    let m = p.mean();
    let mut counts = vec![0usize; depth_cap + 2];
    for (d, _) in &samples {
        counts[(*d).min(depth_cap + 1)] += 1;
    }
    let mut expected: Vec<f64> = (0..=depth_cap).map(|k| (1.0 - m) * m.powi(k as i32)).collect();
    expected.push(m.powi(depth_cap as i32 + 1));
    let n = reps as f64;
    let tv = counts
        .iter()
        .zip(&expected)
        .map(|(c, e)| (*c as f64 / n - e).abs())
        .sum::<f64>()
        / 2.0;
    let (chi, df) = chi_square(&counts, &expected);
    Ok(CondensationReport {
        mean: m,
        reps,
        depth_cap,
        depth0: MeanEstimate::proportion(counts[0], reps),
        depth_counts: counts,
        expected,
        tv,
        chi_square: chi,
        chi_df: df,
        one_infinite: samples.iter().filter(|s| s.1).count(),
    })
}

/// [`condensation_experiment`] on `p̃^(*)`, the extremal tilt of `p` for
/// `set`; fails when `p` is generic for `set`.
pub fn condensation_for_set(
    p: &OffspringDistribution,
    set: &DegreeSet,
    reps: usize,
    depth_cap: usize,
    seed: u64,
) -> Result<CondensationReport, LabError> {
    let report = genericity(p, set)?;
    if report.is_generic() {
        return Err(LabError::NotNonGeneric(set.clone()));
    }
    condensation_experiment(&report.distribution, reps, depth_cap, seed)
}

/// Graft properties, from the weakest to the strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum PropertyClass {
    None,
    Monotonicity,
    Additivity,
    Identity,
}

/// Closed forms recognized for `D(t, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DRule {
    Zero,
    /// `|t| − 1`.
    SizeMinusOne,
    /// `|x|`.
    LeafDepth,
    /// `L_𝒜(t) − 1_{0 ∈ 𝒜}`.
    DegreeCount,
    /// Constant per `(t, x)` without a recognized closed form.
    Witnessed,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeWitness {
    pub tree: String,
    pub leaf: String,
    pub value: u64,
    pub d: u64,
    pub n0: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub functional: String,
    pub class: PropertyClass,
    pub d_rule: Option<DRule>,
    pub max_size: usize,
    pub pairs: usize,
    /// One entry per `(t, x)` for the accepted rule.
    pub witnesses: Vec<ProbeWitness>,
}

struct Case {
    t: FiniteTree,
    x: NodeLabel,
    a_t: u64,
    /// `(A(t ⊛_x t'), A(t'))` over all `t'`.
    pairs: Vec<(u64, u64)>,
}

/// Smallest `n0 ≥ 1` with `A(t ⊛_x t') = A(t') + d` whenever
/// `A(t ⊛_x t') ≥ n0`.
fn threshold(pairs: &[(u64, u64)], d: u64) -> u64 {
    pairs
        .iter()
        .filter(|(s, t)| *s != t + d)
        .map(|(s, _)| s + 1)
        .max()
        .unwrap_or(1)
        .max(1)
}

fn rule_value(rule: DRule, f: &FunctionalSpec, case: &Case) -> Option<u64> {
    match rule {
        DRule::Zero => Some(0),
        DRule::SizeMinusOne => Some(case.t.size() as u64 - 1),
        DRule::LeafDepth => Some(case.x.depth() as u64),
        DRule::DegreeCount => match f {
            FunctionalSpec::Leaves(a) => {
                (case.t.count_degrees_in(a) as u64).checked_sub(u64::from(a.contains_zero()))
            }
            _ => None,
        },
        DRule::Witnessed => case
            .pairs
            .iter()
            .max_by_key(|(s, _)| *s)
            .and_then(|(s, t)| s.checked_sub(*t)),
    }
}

/// The rule holds when every `(t, x)` has a threshold no larger than
/// `A(t) + 1`, so that the identity is never vacuous on the probed range.
fn check_rule(rule: DRule, f: &FunctionalSpec, cases: &[Case]) -> Option<Vec<ProbeWitness>> {
    let mut out = Vec::with_capacity(cases.len());
    for c in cases {
        let d = rule_value(rule, f, c)?;
        let n0 = threshold(&c.pairs, d);
        if n0 > c.a_t + 1 {
            return None;
        }
        out.push(ProbeWitness {
            tree: c.t.to_string(),
            leaf: c.x.to_string(),
            value: c.a_t,
            d,
            n0,
        });
    }
    Some(out)
}

/// Exhaustive check of the graft properties of `f` over all pairs of trees
/// with at most `max_size` nodes and all leaves of the first tree.
pub fn property_probe(f: &FunctionalSpec, max_size: usize) -> ProbeReport {
    let trees = FiniteTree::all_up_to(max_size);
    let values: Vec<u64> = trees.iter().map(|t| f.eval(t)).collect();
    let cases: Vec<Case> = trees
        .par_iter()
        .flat_map_iter(|t| {
            let a_t = f.eval(t);
            let trees = &trees;
            let values = &values;
            t.leaves().into_iter().map(move |x| Case {
                pairs: trees
                    .iter()
                    .zip(values)
                    .map(|(u, &a_u)| {
                        let s = t.graft(&x, u).expect("x is a leaf of t");
                        (f.eval(&s), a_u)
                    })
                    .collect(),
                t: t.clone(),
                x,
                a_t,
            })
        })
        .collect();
    let pairs = cases.iter().map(|c| c.pairs.len()).sum();
    let report = |class, d_rule, witnesses| ProbeReport {
        functional: f.name(),
        class,
        d_rule,
        max_size,
        pairs,
        witnesses,
    };
    if let Some(w) = check_rule(DRule::Zero, f, &cases) {
        return report(PropertyClass::Identity, Some(DRule::Zero), w);
    }
    for rule in [DRule::SizeMinusOne, DRule::LeafDepth, DRule::DegreeCount, DRule::Witnessed] {
        if let Some(w) = check_rule(rule, f, &cases) {
            return report(PropertyClass::Additivity, Some(rule), w);
        }
    }
    if cases.iter().all(|c| c.pairs.iter().all(|(s, t)| s >= t)) {
        return report(PropertyClass::Monotonicity, None, Vec::new());
    }
    report(PropertyClass::None, None, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preset(n: &str) -> OffspringDistribution {
        OffspringDistribution::preset(n).unwrap()
    }

    #[test]
    fn routing() {
        let t = target_for(&preset("critical-binary"), &FunctionalSpec::MaxOutDegree).unwrap();
        assert_eq!(t.kind, TargetKind::Kesten);
        let sub = preset("sub-binary");
        let t = target_for(&sub, &FunctionalSpec::Leaves(DegreeSet::leaves())).unwrap();
        assert_eq!(t.kind, TargetKind::Kesten);
        assert!((t.distribution.prob(0) - 0.5).abs() < 1e-12);
        assert!(target_for(&sub, &FunctionalSpec::LargestGeneration).is_err());
        assert!(target_for(&preset("super-binary"), &FunctionalSpec::Size).is_err());
    }

    #[test]
    fn threshold_rule() {
        assert_eq!(threshold(&[(3, 3), (2, 1), (2, 2)], 0), 3);
        assert_eq!(threshold(&[(3, 2), (4, 3)], 1), 1);
    }

    #[test]
    fn probe_small() {
        let r = property_probe(&FunctionalSpec::Size, 4);
        assert_eq!((r.class, r.d_rule), (PropertyClass::Additivity, Some(DRule::SizeMinusOne)));
        let r = property_probe(&FunctionalSpec::MaxOutDegree, 4);
        assert_eq!(r.class, PropertyClass::Identity);
    }

    #[test]
    fn height_ratio_sub_critical() {
        let p = preset("sub-binary");
        let ns: Vec<u64> = (1..=40).collect();
        let t = ratio_table(&p, &FunctionalSpec::Height, &ns, Some(1), 1).unwrap();
        assert!(t.rows[0].exact.is_some());
        let last = t.rows.last().unwrap().ratio.unwrap();
        assert!((last - 0.8).abs() < 1e-3, "{last}");
        assert_eq!(t.limit, Some(0.8));
    }
}
