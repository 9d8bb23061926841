use std::collections::BTreeMap;
use std::sync::OnceLock;

use gwforge::offspring::{conjugate, tilt_exact};
use gwforge::oracle::kesten_restriction_law;
use gwforge::sampler::{KestenSampler, SampleBudget};
use gwforge::tree::{graft_intersection, GraftIntersection};
use gwforge::weight::rat;
use gwforge::{stats, DegreeSet, FiniteTree, NodeLabel, OffspringDistribution, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::sample::Index;

fn trees() -> &'static [FiniteTree] {
    static T: OnceLock<Vec<FiniteTree>> = OnceLock::new();
    T.get_or_init(|| FiniteTree::all_up_to(7))
}

fn small() -> &'static [FiniteTree] {
    static T: OnceLock<Vec<FiniteTree>> = OnceLock::new();
    T.get_or_init(|| FiniteTree::all_up_to(4))
}

fn leaf(t: &FiniteTree, i: Index) -> NodeLabel {
    let leaves = t.leaves();
    leaves[i.index(leaves.len())].clone()
}

fn in_both(t1: &FiniteTree, x1: &NodeLabel, t2: &FiniteTree, x2: &NodeLabel, s: &FiniteTree) -> bool {
    t1.graft_set_contains(x1, s) && t2.graft_set_contains(x2, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn distance_is_an_ultrametric(a: Index, b: Index, c: Index) {
        let t = trees();
        let (a, b, c) = (&t[a.index(t.len())], &t[b.index(t.len())], &t[c.index(t.len())]);
        prop_assert_eq!(a.distance(b), b.distance(a));
        prop_assert_eq!(a.distance(b) == 0.0, a == b);
        prop_assert!(a.distance(c) <= a.distance(b).max(b.distance(c)));
    }

    #[test]
    fn balls_are_restriction_classes(a: Index, b: Index, h in 0usize..8) {
        let t = trees();
        let (a, b) = (&t[a.index(t.len())], &t[b.index(t.len())]);
        let close = a.distance(b) <= (-(h as f64)).exp2();
        prop_assert_eq!(close, a.restrict(h) == b.restrict(h));
    }

    #[test]
    fn graft_lands_in_graft_set(a: Index, x: Index, b: Index) {
        let s = small();
        let (t, u) = (&s[a.index(s.len())], &s[b.index(s.len())]);
        let x = leaf(t, x);
        let g = t.graft(&x, u).unwrap();
        prop_assert_eq!(g.size(), t.size() + u.size() - 1);
        prop_assert!(t.graft_set_contains(&x, &g));
        prop_assert_eq!(g.subtree(&x).unwrap(), u.clone());
        prop_assert_eq!(g.prune_at(&x).unwrap(), t.clone());
    }

    #[test]
    fn graft_intersection_matches_brute_force(a: Index, x: Index, b: Index, y: Index) {
        let s = small();
        let (t1, t2) = (&s[a.index(s.len())], &s[b.index(s.len())]);
        let (x1, x2) = (leaf(t1, x), leaf(t2, y));
        let both: Vec<&FiniteTree> = trees().iter().filter(|u| in_both(t1, &x1, t2, &x2, u)).collect();
        match graft_intersection(t1, &x1, t2, &x2) {
            GraftIntersection::Empty => prop_assert!(both.is_empty()),
            GraftIntersection::Singleton(u) => {
                prop_assert!(in_both(t1, &x1, t2, &x2, &u));
                prop_assert!(both.iter().all(|v| **v == u));
            }
            GraftIntersection::GraftSet(t, x) => {
                for u in trees() {
                    prop_assert_eq!(t.graft_set_contains(&x, u), in_both(t1, &x1, t2, &x2, u));
                }
            }
        }
    }

    #[test]
    fn conjugate_is_a_sub_critical_pmf(w in prop::collection::vec(0i64..8, 2..6), w0 in 1i64..8) {
        let mut weights = vec![rat(w0, 1)];
        weights.extend(w.iter().map(|&k| rat(k, 1)));
        let total: Rational = weights.iter().sum();
        let pmf: Vec<Rational> = weights.iter().map(|k| k / &total).collect();
        let p = OffspringDistribution::from_rationals(pmf).unwrap();
        prop_assume!(p.mean() > 1.0 + 1e-9);
        let c = conjugate(&p).unwrap();
        prop_assert!(c.mean() < 1.0);
        match c.exact_support() {
            Some(ex) => prop_assert!(ex.iter().sum::<Rational>().is_one()),
            None => {
                let s: f64 = (0..c.support_max().unwrap() + 1).map(|k| c.prob(k)).sum();
                prop_assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tilts_sum_to_one(w in prop::collection::vec(0i64..8, 2..6), w0 in 1i64..8, num in 1i64..20, den in 1i64..20) {
        prop_assume!(num <= den);
        let mut weights = vec![rat(w0, 1)];
        weights.extend(w.iter().map(|&k| rat(k, 1)));
        let total: Rational = weights.iter().sum();
        let p = OffspringDistribution::from_rationals(weights.iter().map(|k| k / &total).collect()).unwrap();
        prop_assume!(p.prob(0) < 1.0);
        let t = tilt_exact(&p, &DegreeSet::leaves(), &rat(num, den)).unwrap();
        let ex = t.exact_support().unwrap();
        prop_assert!(ex.iter().sum::<Rational>().is_one());
        prop_assert!(ex.iter().all(|x| *x >= Rational::zero()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn kesten_sampler_matches_oracle(seed in 0u64..1000, name in prop::sample::select(vec!["critical-binary", "aperiodic-critical", "sub-binary"])) {
        let p = OffspringDistribution::preset(name).unwrap();
        let h = 2;
        let law = kesten_restriction_law::<f64>(&p, h, 1 << 20).unwrap();
        prop_assert!(*law.complement_bound() < 1e-12);
        let sampler = KestenSampler::new(&p).unwrap();
        let budget = SampleBudget::default();
        let samples = stats::replicate(seed, 20_000, |r| sampler.sample(r, h, &budget).unwrap());
        let emp = stats::empirical(&samples);
        let exact: BTreeMap<FiniteTree, f64> = law.iter().map(|(t, w)| (t.clone(), *w)).collect();
        let d = stats::tv(&emp, &exact);
        prop_assert!(d < 0.03, "{name}: {d}");
    }
}
