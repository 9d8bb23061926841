use gwforge::functional::{DegreeSet, FunctionalSpec, Window};
use gwforge::lab::{
    condensation_experiment, condensation_for_set, convergence_experiment, kesten_stigum_mc,
    property_probe, ratio_table, target_for, DRule, ExperimentConfig, LabError, Mode,
    PropertyClass, TargetKind,
};
use gwforge::weight::{parse_rational, rat};
use gwforge::OffspringDistribution;

fn preset(n: &str) -> OffspringDistribution {
    OffspringDistribution::preset(n).unwrap()
}

#[test]
fn height_tail_matches_kesten_at_level_one() {
    let p = preset("critical-binary");
    let windows: Vec<Window> = (1..=6).map(Window::at_least).collect();
    let r = convergence_experiment(&p, &FunctionalSpec::Height, &windows, 1, Mode::Exact, &ExperimentConfig::default())
        .unwrap();
    assert_eq!(r.target, TargetKind::Kesten);
    for row in &r.rows {
        assert!(row.tv_exact);
        assert_eq!(row.tv, 0.0, "{:?}", row.window);
    }
    assert!(r.residuals_vanish());
    assert!(!r.residuals.is_empty());
}

#[test]
fn size_windows_tv_decreases() {
    let p = preset("critical-binary");
    let windows: Vec<Window> = [5, 9, 13].iter().map(|&n| Window::span(n, 2).unwrap()).collect();
    let cfg = ExperimentConfig { size_cap: 15, ..Default::default() };
    let r = convergence_experiment(&p, &FunctionalSpec::Size, &windows, 2, Mode::Exact, &cfg).unwrap();
    assert!(r.rows.iter().all(|row| row.tv_exact && row.tv > 0.0 && row.tv <= 1.0));
    assert!(r.tv_non_increasing(), "{:?}", r.rows);
    assert!(r.rows[2].tv < r.rows[0].tv);
    assert!(r.residuals_vanish());
}

#[test]
fn sub_critical_leaves_route_to_critical_tilt() {
    let p = OffspringDistribution::from_rationals(vec![rat(3, 5), rat(0, 1), rat(2, 5)]).unwrap();
    let t = target_for(&p, &FunctionalSpec::Leaves(DegreeSet::leaves())).unwrap();
    assert_eq!(t.kind, TargetKind::Kesten);
    assert!((t.distribution.prob(0) - 0.5).abs() < 1e-12);
    assert!((t.distribution.prob(2) - 0.5).abs() < 1e-12);
    assert!(t.routing.contains("generic"));
}

#[test]
fn monte_carlo_mode_is_close_to_exact() {
    let p = preset("critical-binary");
    let windows = [Window::exact(9)];
    let cfg = ExperimentConfig { reps: 4000, seed: 11, ..Default::default() };
    let exact = convergence_experiment(&p, &FunctionalSpec::Size, &windows, 2, Mode::Exact, &cfg).unwrap();
    let mc = convergence_experiment(&p, &FunctionalSpec::Size, &windows, 2, Mode::Mc, &cfg).unwrap();
    let sigma = mc.rows[0].tv_sigma.unwrap();
    assert!((mc.rows[0].tv - exact.rows[0].tv).abs() <= 4.0 * sigma + 0.02, "{:?} {:?}", mc.rows, exact.rows);
    let again = convergence_experiment(&p, &FunctionalSpec::Size, &windows, 2, Mode::Mc, &cfg).unwrap();
    assert_eq!(mc.rows[0].tv, again.rows[0].tv);
}

/// `P(H ≥ n)` for the critical binary law from `c_j = (1 + c_{j−1}²) / 2`.
fn binary_height_tail(n: u64) -> f64 {
    let mut c = 0.5;
    for _ in 1..n {
        c = (1.0 + c * c) / 2.0;
    }
    if n == 0 {
        1.0
    } else {
        1.0 - c
    }
}

#[test]
fn ratio_tables() {
    let p = preset("critical-binary");
    let ns = [10, 20, 40];
    let t = ratio_table(&p, &FunctionalSpec::Height, &ns, None, 1).unwrap();
    assert_eq!(t.limit, Some(1.0));
    for (row, n) in t.rows.iter().zip(ns) {
        let expect = binary_height_tail(n + 1) / binary_height_tail(n);
        assert!((row.ratio.unwrap() - expect).abs() < 1e-12, "{n}");
    }
    assert!(t.rows[0].exact.is_some());
    let gaps: Vec<f64> = t.rows.iter().map(|r| 1.0 - r.ratio.unwrap()).collect();
    assert!(gaps.windows(2).all(|w| 0.0 < w[1] && w[1] < w[0]));
    assert!(gaps[2] < 0.05);

    // P(|τ| = n + 2) / P(|τ| = n) = n / (n + 3) for odd n
    let odd: Vec<u64> = (1..40).step_by(2).collect();
    let t = ratio_table(&p, &FunctionalSpec::Size, &odd, Some(1), 2).unwrap();
    for row in &t.rows {
        let exact = parse_rational(row.exact.as_deref().unwrap()).unwrap();
        assert_eq!(exact, rat(row.n as i64, row.n as i64 + 3));
    }
    let t = ratio_table(&p, &FunctionalSpec::Size, &[2, 4], Some(1), 1).unwrap();
    assert!(t.rows.iter().all(|r| r.ratio.is_none()));
}

#[test]
fn kesten_stigum_dichotomy() {
    let p = preset("super-binary");
    let r = kesten_stigum_mc(&p, 10, 20_000, 5, 1e-9).unwrap();
    assert!(r.mean_w.within(1.0, 3.0), "{:?}", r.mean_w);
    assert!((r.q - 1.0 / 3.0).abs() < 1e-12);
    assert!(r.consistent);
    assert!(r.finite_support);
    assert!(kesten_stigum_mc(&preset("critical-binary"), 5, 10, 0, 0.1).is_err());
    let dead = OffspringDistribution::from_rationals(vec![rat(1, 1)]).unwrap();
    assert!(kesten_stigum_mc(&dead, 5, 10, 0, 0.1).is_err());
}

#[test]
fn condensation_geometry() {
    let p = preset("sub-binary");
    let r = condensation_experiment(&p, 20_000, 8, 3).unwrap();
    assert_eq!(r.one_infinite, r.reps);
    assert!(r.depth0.within(0.2, 3.0), "{:?}", r.depth0);
    assert!(r.tv < 0.02, "{}", r.tv);
    assert_eq!(r.depth_counts.iter().sum::<usize>(), r.reps);
    let err = condensation_for_set(&p, &DegreeSet::leaves(), 10, 8, 0).unwrap_err();
    assert!(matches!(err, LabError::NotNonGeneric(_)));
}

#[test]
fn property_classes() {
    let size = property_probe(&FunctionalSpec::Size, 6);
    assert_eq!((size.class, size.d_rule), (PropertyClass::Additivity, Some(DRule::SizeMinusOne)));

    let height = property_probe(&FunctionalSpec::Height, 6);
    assert_eq!((height.class, height.d_rule), (PropertyClass::Additivity, Some(DRule::LeafDepth)));
    assert!(height.witnesses.iter().all(|w| w.n0 <= w.value + 1));

    let m = property_probe(&FunctionalSpec::MaxOutDegree, 6);
    assert_eq!(m.class, PropertyClass::Identity);
    assert!(m.witnesses.iter().all(|w| w.n0 <= w.value + 1));
    assert!(m.witnesses.iter().any(|w| w.n0 == w.value + 1));

    let z = property_probe(&FunctionalSpec::LargestGeneration, 6);
    assert_eq!(z.class, PropertyClass::Monotonicity);

    let l = property_probe(&FunctionalSpec::Leaves(DegreeSet::leaves()), 6);
    assert_eq!((l.class, l.d_rule), (PropertyClass::Additivity, Some(DRule::DegreeCount)));
    let l = property_probe(&FunctionalSpec::Leaves(DegreeSet::finite([1, 3]).unwrap()), 5);
    assert_eq!((l.class, l.d_rule), (PropertyClass::Additivity, Some(DRule::DegreeCount)));
}
