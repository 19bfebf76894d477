//! Randomized invariants of the transforms, subdifferentials and formats.

use econvex::funcmodel::make_uniform_grid;
use econvex::io::{function_csv, function_json, FunctionSpec};
use econvex::subdiff::{e_subdiff_interval, e_subdiff_membership, PointCloud};
use econvex::transform::{e_conjugate_brute, e_conjugate_fast};
use econvex::verify::fenchel_young_gap;
use econvex::{ErrorFunction, ExtReal, Function, SampledFunction};
use proptest::prelude::*;

fn values(n: usize, inf: bool) -> impl Strategy<Value = Vec<ExtReal>> {
    let finite = (-10.0f64..10.0).prop_map(ExtReal::of);
    let cell = if inf {
        prop_oneof![9 => finite, 1 => Just(ExtReal::POS_INF)].boxed()
    } else {
        finite.boxed()
    };
    prop::collection::vec(cell, n).prop_filter("proper", |v| v.iter().any(|x| x.is_finite()))
}

fn sampled(n: usize, inf: bool) -> impl Strategy<Value = SampledFunction> {
    values(n, inf).prop_map(move |v| SampledFunction::new(make_uniform_grid(-2.0, 2.0, n).unwrap(), v).unwrap())
}

fn kernel() -> impl Strategy<Value = ErrorFunction> {
    prop_oneof![
        Just(ErrorFunction::Zero),
        (0.1f64..4.0).prop_map(|c| ErrorFunction::quadratic(c).unwrap()),
        (0.1f64..4.0).prop_map(|l| ErrorFunction::scaled_distance(l).unwrap()),
    ]
}

fn same(a: ExtReal, b: ExtReal, tol: f64) -> bool {
    a == b || (a.value() - b.value()).abs() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_equals_brute(f in sampled(33, true), e in kernel(), y in -2.0f64..2.0) {
        let dual = make_uniform_grid(-30.0, 30.0, 97).unwrap();
        let a = e_conjugate_fast(&f, &e, y, &dual).unwrap();
        let b = e_conjugate_brute(&f, &e, y, &dual).unwrap();
        for (p, q) in a.values.iter().zip(&b.values) {
            prop_assert!(same(*p, *q, 1e-12), "{p} vs {q}");
        }
    }

    #[test]
    fn conjugate_is_convex_in_the_slope(f in sampled(25, true), e in kernel(), y in -2.0f64..2.0) {
        let dual = make_uniform_grid(-20.0, 20.0, 81).unwrap();
        let t = e_conjugate_fast(&f, &e, y, &dual).unwrap();
        for w in t.values.windows(3) {
            prop_assert!(w[0].value() - 2.0 * w[1].value() + w[2].value() >= -1e-9);
        }
    }

    #[test]
    fn fenchel_young_gap_is_nonnegative(f in sampled(25, false), e in kernel(), i in 0usize..25, s in -20.0f64..20.0) {
        let x = f.point(i);
        prop_assert!(fenchel_young_gap(&f, &e, x, s).unwrap().value() >= -1e-12);
    }

    #[test]
    fn interval_agrees_with_membership(f in sampled(21, false), e in kernel(), i in 0usize..21, s in -40.0f64..40.0) {
        let x = f.point(i);
        let iv = e_subdiff_interval(&f, &e, x).unwrap();
        let near = |b: ExtReal| b.is_finite() && (b.value() - s).abs() <= 1e-9 * s.abs().max(1.0);
        prop_assume!(!near(iv.lower) && !near(iv.upper));
        let cloud = PointCloud::from_sampled(&f, &e).unwrap();
        prop_assert_eq!(e_subdiff_membership(&cloud, &[x], &[s]).unwrap(), iv.contains(s));
    }

    #[test]
    fn interval_grows_with_the_budget(f in sampled(21, true), i in 0usize..21, c1 in 0.0f64..3.0, dc in 0.0f64..3.0) {
        let x = f.point(i);
        let small = e_subdiff_interval(&f, &ErrorFunction::quadratic(c1).unwrap(), x).unwrap();
        let large = e_subdiff_interval(&f, &ErrorFunction::quadratic(c1 + dc).unwrap(), x).unwrap();
        if !small.empty {
            prop_assert!(!large.empty);
            prop_assert!(large.lower <= small.lower && small.upper <= large.upper);
        }
    }

    #[test]
    fn sampled_spec_round_trips(f in sampled(17, true)) {
        let spec: FunctionSpec = serde_json::from_str(&function_json(&f)).unwrap();
        let Function::Sampled(back) = spec.to_function().unwrap() else { panic!("closed form") };
        prop_assert_eq!(&back, &f);

        let csv = function_csv(&f);
        for (line, (x, v)) in csv.lines().skip(1).zip(f.grid().points().iter().zip(f.values())) {
            let (a, b) = line.split_once(',').unwrap();
            prop_assert_eq!(a.parse::<f64>().unwrap(), *x);
            prop_assert_eq!(b.parse::<ExtReal>().unwrap(), *v);
        }
    }
}
