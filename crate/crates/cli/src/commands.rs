use anyhow::{anyhow, bail, Context, Result};
use gwforge::lab::{self, ExperimentConfig, Mode};
use gwforge::offspring::{
    condensation_offspring, conjugate, extinction_probability, genericity, leaf_offspring,
    size_biased, survivor_joint, tilt, tilt_exact, Criticality, Genericity, OffspringError,
};
use gwforge::oracle::{
    conditioned_law, conditioned_restriction_law, dwass_check, enumerate_law, functional_law,
    kesten_restriction_law, restriction_law, Pmf, Scalar, TreeLaw,
};
use gwforge::sampler::{
    sample_conditioned_restricted, sample_gw, sample_gw_restricted, sample_process,
    CondensationSampler, ImmigrationSampler, KestenSampler, SampleBudget, SampleError,
    SurvivorSampler,
};
use gwforge::tree::TreeJson;
use gwforge::weight::{parse_rational, Weight};
use gwforge::{stats, DegreeSet, FiniteTree, FunctionalSpec, OffspringDistribution, Rational, Window};
use serde_json::{json, Value};

use crate::args::{Budget, Command, DerivedLaw, Format, LawKind, SampleKind};
use crate::output::Output;

pub fn run(cmd: &Command, format: Option<Format>) -> Result<Output> {
    match cmd {
        Command::Solve { dist } => solve(&distribution(&dist.dist)?),
        Command::Derive { dist, law } => derive(&distribution(&dist.dist)?, *law),
        Command::Tilt { dist, set, theta } => {
            let p = distribution(&dist.dist)?;
            let set = degree_set(set)?;
            let t = parse_rational(theta).with_context(|| format!("invalid theta {theta:?}"))?;
            let q = if p.is_exact() {
                tilt_exact(&p, &set, &t)?
            } else {
                tilt(&p, &set, f64_of(&t))?
            };
            Ok(pmf_table(&q))
        }
        Command::Classify { dist, set } => classify(&distribution(&dist.dist)?, &degree_set(set)?),
        Command::Sample { dist, kind, h, n, functional, window, seed, reps, budget } => {
            let p = distribution(&dist.dist)?;
            let spec = SampleSpec {
                kind: *kind,
                h: *h,
                n: *n,
                functional: functional_spec(functional)?,
                window: window.as_deref().map(parse_window).transpose()?,
            };
            sample(&p, &spec, *seed, *reps, &sample_budget(budget), format)
        }
        Command::Law { dist, kind, h, functional, window, mode, cap_size } => {
            let p = distribution(&dist.dist)?;
            let req = LawRequest {
                kind: *kind,
                h: *h,
                functional: functional_spec(functional)?,
                window: window.as_deref().map(parse_window).transpose()?,
                cap: *cap_size,
            };
            match mode.parse::<Mode>()? {
                Mode::Exact => law::<Rational>(&p, &req),
                Mode::Mc => law::<f64>(&p, &req),
            }
        }
        Command::Dwass { dist, n } => dwass(&distribution(&dist.dist)?, *n),
        Command::Ratio { dist, functional, ns, n1, step } => {
            let p = distribution(&dist.dist)?;
            let t = lab::ratio_table(&p, &functional_spec(functional)?, &parse_ns(ns)?, *n1, *step)?;
            Ok(Output::Table { csv: t.to_csv(), json: serde_json::to_value(&t)?, notes: vec![] })
        }
        Command::Converge { dist, functional, window, h, mode, seed, reps, budget } => {
            let p = distribution(&dist.dist)?;
            let windows: Vec<Window> = window.iter().map(|w| parse_window(w)).collect::<Result<_>>()?;
            let cfg = ExperimentConfig {
                size_cap: budget.cap_size.unwrap_or(ExperimentConfig::default().size_cap),
                reps: *reps,
                seed: *seed,
                budget: sample_budget(budget),
            };
            let r = lab::convergence_experiment(&p, &functional_spec(functional)?, &windows, *h, mode.parse()?, &cfg)?;
            let notes = vec![format!("target {:?} ({})", r.target, r.routing)];
            Ok(Output::Table { csv: r.to_csv(), json: serde_json::to_value(&r)?, notes })
        }
        Command::KestenStigum { dist, n, reps, seed, eps } => {
            let r = lab::kesten_stigum_mc(&distribution(&dist.dist)?, *n, *reps, *seed, *eps)?;
            Ok(Output::record(
                vec![
                    ("n", json!(r.n)),
                    ("reps", json!(r.reps)),
                    ("mean_w", json!(r.mean_w.mean)),
                    ("mean_w_se", json!(r.mean_w.std_err)),
                    ("frac_extinct", json!(r.frac_extinct.mean)),
                    ("frac_below_eps", json!(r.frac_below_eps.mean)),
                    ("q", json!(r.q)),
                    ("x_log_x", number(r.x_log_x)),
                ],
                Some(if r.consistent { "CONSISTENT" } else { "INCONSISTENT" }),
            ))
        }
        Command::Condense { dist, set, reps, depth_cap, seed } => {
            let p = distribution(&dist.dist)?;
            let r = match set {
                Some(s) => lab::condensation_for_set(&p, &degree_set(s)?, *reps, *depth_cap, *seed)?,
                None => lab::condensation_experiment(&p, *reps, *depth_cap, *seed)?,
            };
            let mut csv = String::from("depth,count,expected\n");
            for (k, (c, e)) in r.depth_counts.iter().zip(&r.expected).enumerate() {
                let depth = if k == r.depth_cap + 1 { format!(">{}", r.depth_cap) } else { k.to_string() };
                csv.push_str(&format!("{depth},{c},{e}\n"));
            }
            let notes = vec![format!(
                "mean {} tv {} chi_square {} df {} one_infinite {}/{}",
                r.mean, r.tv, r.chi_square, r.chi_df, r.one_infinite, r.reps
            )];
            Ok(Output::Table { csv, json: serde_json::to_value(&r)?, notes })
        }
    }
}

fn distribution(spec: &str) -> Result<OffspringDistribution> {
    Ok(OffspringDistribution::parse_spec(spec)?)
}

fn degree_set(s: &str) -> Result<DegreeSet> {
    Ok(s.parse()?)
}

fn functional_spec(s: &str) -> Result<FunctionalSpec> {
    Ok(s.parse()?)
}

fn parse_window(s: &str) -> Result<Window> {
    Ok(s.parse()?)
}

/// `10,20,40`, `1..=9` or a mix.
fn parse_ns(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..=") {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
                if a > b {
                    bail!("empty range {part}");
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().with_context(|| format!("invalid n {part:?}"))?),
        }
    }
    if out.is_empty() {
        bail!("no values in --ns");
    }
    Ok(out)
}

fn sample_budget(b: &Budget) -> SampleBudget {
    let d = SampleBudget::default();
    SampleBudget {
        max_nodes: b.cap_size.unwrap_or(d.max_nodes),
        max_height: b.cap_height.unwrap_or(d.max_height),
        max_rejections: b.max_rejections,
    }
}

fn f64_of(r: &Rational) -> f64 {
    r.approx()
}

fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!(x.to_string())
    }
}

fn exact_or_float(exact: Option<&Rational>, x: f64) -> Value {
    match exact {
        Some(r) => json!(r.to_string()),
        None => number(x),
    }
}

fn criticality_name(c: Criticality) -> &'static str {
    match c {
        Criticality::Sub => "sub-critical",
        Criticality::Critical => "critical",
        Criticality::Super => "super-critical",
    }
}

fn solve(p: &OffspringDistribution) -> Result<Output> {
    let (q, q_exact, degenerate) = match extinction_probability(p) {
        Ok(e) => (exact_or_float(e.exact.as_ref(), e.q), e.exact.is_some(), None),
        Err(OffspringError::DegenerateDistribution { case, q }) => (json!(q), true, Some(format!("{case:?}"))),
        Err(e) => return Err(e.into()),
    };
    let m_exact = p.exact_mean();
    let mut fields = vec![
        ("q", q),
        ("q_exact", json!(q_exact)),
        ("m", exact_or_float(m_exact.as_ref(), p.mean())),
        ("period", json!(p.period())),
        ("radius", number(p.radius())),
    ];
    if let Some(d) = degenerate {
        fields.push(("degenerate", json!(d)));
    }
    Ok(Output::record(fields, Some(criticality_name(p.criticality()))))
}

fn pmf_table(p: &OffspringDistribution) -> Output {
    let (csv, json, notes) = pmf_parts(p);
    Output::Table { csv, json, notes }
}

fn pmf_parts(p: &OffspringDistribution) -> (String, Value, Vec<String>) {
    let len = p.support_max().map_or(p.probs().len(), |m| m + 1);
    let exact = p.exact_prefix(len);
    let mut csv = String::from("k,probability,exact\n");
    for k in 0..len {
        let e = exact.as_ref().and_then(|v| v.get(k)).map(|r| r.to_string()).unwrap_or_default();
        csv.push_str(&format!("{k},{},{e}\n", p.prob(k)));
    }
    let notes = vec![format!("mean {} tail_bound {}", p.mean(), p.tail_bound())];
    (csv, p.to_json(), notes)
}

fn derive(p: &OffspringDistribution, law: DerivedLaw) -> Result<Output> {
    match law {
        DerivedLaw::Conjugate => Ok(pmf_table(&conjugate(p)?)),
        DerivedLaw::SizeBiased => Ok(pmf_table(&size_biased(p)?)),
        DerivedLaw::Leaf => {
            let l = leaf_offspring(p)?;
            let (csv, json, mut notes) = pmf_parts(&l.distribution);
            notes.push(format!("leaf mean {} input critical {}", l.mean, l.critical));
            let json = json!({ "distribution": json, "mean": l.mean, "critical": l.critical });
            Ok(Output::Table { csv, json, notes })
        }
        DerivedLaw::Survivor => {
            let j = survivor_joint(p)?;
            let exact = j.exact_entries();
            let mut csv = String::from("s,e,probability,exact\n");
            let mut rows = Vec::new();
            for (&(s, e), &w) in j.entries() {
                let ex = exact.and_then(|m| m.get(&(s, e))).map(|r| r.to_string());
                csv.push_str(&format!("{s},{e},{w},{}\n", ex.clone().unwrap_or_default()));
                rows.push(json!({ "s": s, "e": e, "probability": w, "exact": ex }));
            }
            let backbone = j.backbone()?;
            let notes = vec![format!("q {} backbone {}", j.extinction(), backbone.to_json())];
            let json = json!({ "q": j.extinction(), "joint": rows, "backbone": backbone.to_json() });
            Ok(Output::Table { csv, json, notes })
        }
        DerivedLaw::Condensation => {
            let c = condensation_offspring(p)?;
            let exact = c.exact_finite_part();
            let mut csv = String::from("k,probability,exact\n");
            let mut rows = Vec::new();
            for (k, &w) in c.finite_part().iter().enumerate() {
                let ex = exact.and_then(|v| v.get(k)).map(|r| r.to_string());
                csv.push_str(&format!("{k},{w},{}\n", ex.clone().unwrap_or_default()));
                rows.push(json!({ "k": k, "probability": w, "exact": ex }));
            }
            let atom_exact = c.exact_atom().map(|r| r.to_string());
            csv.push_str(&format!("inf,{},{}\n", c.atom_at_infinity(), atom_exact.clone().unwrap_or_default()));
            let json = json!({
                "finite": rows,
                "infinity": { "probability": c.atom_at_infinity(), "exact": atom_exact },
                "tail_bound": c.tail_bound(),
            });
            Ok(Output::Table { csv, json, notes: vec![format!("tail_bound {}", c.tail_bound())] })
        }
    }
}

fn classify(p: &OffspringDistribution, set: &DegreeSet) -> Result<Output> {
    let r = genericity(p, set)?;
    let mut fields = vec![
        ("set", json!(set.to_string())),
        ("interval_inf", number(r.interval_inf)),
        ("interval_sup", number(r.interval_sup)),
        ("sup_attained", json!(r.sup_attained)),
        ("radius_case", json!(format!("{:?}", r.radius_case))),
    ];
    let verdict = match &r.classification {
        Genericity::Generic { theta_c, exact } => {
            fields.push(("theta_c", exact_or_float(exact.as_ref(), *theta_c)));
            "generic"
        }
        Genericity::NonGeneric { theta_star } => {
            fields.push(("theta_star", number(*theta_star)));
            "non-generic"
        }
    };
    fields.push(("tilted_mean", json!(r.distribution.mean())));
    fields.push(("distribution", r.distribution.to_json()));
    Ok(Output::record(fields, Some(verdict)))
}

struct SampleSpec {
    kind: SampleKind,
    h: Option<usize>,
    n: usize,
    functional: FunctionalSpec,
    window: Option<Window>,
}

fn tree_value(t: &FiniteTree) -> Value {
    serde_json::to_value(TreeJson::from(t)).expect("serializable")
}

fn sample(
    p: &OffspringDistribution,
    spec: &SampleSpec,
    seed: u64,
    reps: usize,
    budget: &SampleBudget,
    format: Option<Format>,
) -> Result<Output> {
    let need_h = || spec.h.ok_or_else(|| anyhow!("--h is required for {:?} samples", spec.kind));
    let items: Vec<Value> = match spec.kind {
        SampleKind::Gw => collect(stats::replicate(seed, reps, |r| {
            let t = match spec.h {
                Some(h) => sample_gw_restricted(p, r, h, budget)?,
                None => sample_gw(p, r, budget)?,
            };
            Ok(tree_value(&t))
        }))?,
        SampleKind::Kesten => {
            let h = need_h()?;
            let s = KestenSampler::new(p)?;
            collect(stats::replicate(seed, reps, |r| {
                let (t, spine) = s.sample_with_spine(r, h, budget)?;
                Ok(json!({ "k": t.encode(), "spine": spine.path() }))
            }))?
        }
        SampleKind::Conditioned => {
            let w = spec.window.ok_or_else(|| anyhow!("--window is required for conditioned samples"))?;
            collect(stats::replicate(seed, reps, |r| {
                let t = sample_conditioned_restricted(p, &spec.functional, w, spec.h, r, budget)?;
                Ok(tree_value(&t))
            }))?
        }
        SampleKind::Condensation => {
            let h = need_h()?;
            let s = CondensationSampler::new(p)?;
            collect(stats::replicate(seed, reps, |r| {
                let c = s.sample(r, h, budget)?;
                let tree: Value = serde_json::from_str(&c.tree.to_json()).expect("tree json");
                Ok(json!({ "tree": tree, "infinite_node": c.infinite_node.path(), "depth": c.infinite_depth }))
            }))?
        }
        SampleKind::Survivor => {
            let h = need_h()?;
            let s = SurvivorSampler::new(p)?;
            collect(stats::replicate(seed, reps, |r| {
                let x = s.sample(r, h, budget)?;
                Ok(json!({ "k": x.tree.encode(), "survivor": x.survivor_type, "root_split": [x.root_split.0, x.root_split.1] }))
            }))?
        }
        SampleKind::Process => {
            let paths = stats::replicate(seed, reps, |r| sample_process(p, r, spec.n));
            let mut csv = String::from("rep,n,z,w\n");
            let mut json_rows = Vec::new();
            for (i, path) in paths.iter().enumerate() {
                for (k, (z, w)) in path.z.iter().zip(&path.w).enumerate() {
                    csv.push_str(&format!("{i},{k},{z},{w}\n"));
                }
                json_rows.push(json!({ "z": path.z, "w": path.w }));
            }
            return Ok(match format {
                Some(Format::Json) => Output::Lines { json: json_rows, csv: None },
                _ => Output::Table { csv, json: json!(json_rows), notes: vec![] },
            });
        }
        SampleKind::Immigration => {
            let s = ImmigrationSampler::new(p)?;
            stats::replicate(seed, reps, |r| json!(s.sample(r, spec.n)))
        }
    };
    let csv = items
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{i},\"{}\"\n", v.to_string().replace('"', "\"\"")))
        .collect::<String>();
    Ok(Output::Lines { json: items, csv: Some(format!("rep,sample\n{csv}")) })
}

fn collect(v: Vec<Result<Value, SampleError>>) -> Result<Vec<Value>> {
    Ok(v.into_iter().collect::<Result<Vec<_>, _>>()?)
}

struct LawRequest {
    kind: LawKind,
    h: Option<usize>,
    functional: FunctionalSpec,
    window: Option<Window>,
    cap: usize,
}

fn tree_law_output<W: Scalar>(law: &TreeLaw<W>) -> Output {
    let rows: Vec<Value> = law
        .iter()
        .map(|(t, w)| json!({ "k": t.encode(), "probability": w.approx(), "exact": W::EXACT.then(|| w.csv_cells().replace(',', "/")) }))
        .collect();
    let notes = vec![
        format!("{} arithmetic", if W::EXACT { "exact" } else { "floating-point" }),
        format!("unaccounted mass {}", law.complement_bound().approx()),
    ];
    Output::Table { csv: law.to_csv(), json: json!({ "support": rows, "complement": law.complement_bound().approx() }), notes }
}

fn pmf_output<W: Scalar>(pmf: &Pmf<W>) -> Output {
    let rows: Vec<Value> = pmf
        .values()
        .iter()
        .map(|(v, w)| json!({ "value": v, "probability": w.approx(), "exact": pmf.is_exact_at(*v) }))
        .collect();
    let notes = vec![
        format!("{} arithmetic, exact up to {:?}", if W::EXACT { "exact" } else { "floating-point" }, pmf.exact_upto()),
        format!("unaccounted mass {}", pmf.complement_bound().approx()),
    ];
    Output::Table { csv: pmf.to_csv(), json: json!({ "values": rows, "complement": pmf.complement_bound().approx() }), notes }
}

fn law<W: Scalar>(p: &OffspringDistribution, req: &LawRequest) -> Result<Output> {
    const MAX_ENTRIES: usize = 1 << 22;
    let need_h = || req.h.ok_or_else(|| anyhow!("--h is required for {:?} laws", req.kind));
    Ok(match req.kind {
        LawKind::Tree => tree_law_output(&enumerate_law::<W>(p, req.cap)?),
        LawKind::Restriction => tree_law_output(&restriction_law::<W>(p, need_h()?, MAX_ENTRIES)?),
        LawKind::Kesten => tree_law_output(&kesten_restriction_law::<W>(p, need_h()?, MAX_ENTRIES)?),
        LawKind::Conditioned => {
            let w = req.window.ok_or_else(|| anyhow!("--window is required for conditioned laws"))?;
            match req.h {
                Some(h) => tree_law_output(&conditioned_restriction_law::<W>(p, &req.functional, &w, h, req.cap)?),
                None => tree_law_output(&conditioned_law::<W>(p, &req.functional, &w, req.cap)?),
            }
        }
        LawKind::Functional => pmf_output(&functional_law::<W>(p, &req.functional, req.cap)?),
    })
}

fn dwass(p: &OffspringDistribution, n: usize) -> Result<Output> {
    let (lhs, rhs, ok) = if p.is_exact() {
        let (a, b) = dwass_check::<Rational>(p, n)?;
        (json!(a.to_string()), json!(b.to_string()), a == b)
    } else {
        let (a, b) = dwass_check::<f64>(p, n)?;
        (json!(a), json!(b), (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300))
    };
    Ok(Output::record(vec![("n", json!(n)), ("lhs", lhs), ("rhs", rhs)], Some(if ok { "OK" } else { "MISMATCH" })))
}
