use genmeans::compare::{
    global_condition_iii, min_eigenvalue, power_generator, quasiarith_compare, semidefinite_status, Definiteness,
    GlobalOptions, QuasiArithmeticOptions, Status, Tolerances, Witness,
};
use genmeans::scalarfn::delta_gini;
use genmeans::{ChebyshevPair, Execution, GeneralizedMean, Interval, MeanFamily, PairTransform, ProbabilityMeasure};
use proptest::prelude::*;

fn weights(raw: &[f64]) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    raw.iter().map(|w| w / s).collect()
}

fn coordinate_mean(p: f64, q: f64, raw: &[f64]) -> GeneralizedMean {
    let w = weights(raw);
    let atoms = w.iter().enumerate().map(|(i, &wi)| (vec![(i + 1) as f64], wi)).collect();
    GeneralizedMean::gini(
        p,
        q,
        MeanFamily::coordinates(raw.len()).unwrap(),
        ProbabilityMeasure::atoms(atoms).unwrap(),
    )
    .unwrap()
}

fn exponent() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn point_and_weights() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..=4).prop_flat_map(|d| {
        (
            prop::collection::vec(0.1..10.0f64, d),
            prop::collection::vec(0.05..1.0f64, d),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mean_value_property(p in exponent(), q in exponent(), (x, w) in point_and_weights()) {
        let m = coordinate_mean(p, q, &w).eval_implicit(&x).unwrap();
        let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo * (1.0 - 1e-12) <= m && m <= hi * (1.0 + 1e-12), "{m} outside [{lo}, {hi}]");
    }

    #[test]
    fn reflexive(p in exponent(), q in exponent(), v in 0.1..10.0f64, w in prop::collection::vec(0.05..1.0f64, 3)) {
        let m = coordinate_mean(p, q, &w).eval_implicit(&[v, v, v]).unwrap();
        prop_assert!((m - v).abs() <= 1e-12 * v, "{m} vs {v}");
    }

    #[test]
    fn gini_means_are_homogeneous(p in exponent(), q in exponent(), (x, w) in point_and_weights(), s in 0.1..10.0f64) {
        let m = coordinate_mean(p, q, &w);
        let scaled: Vec<f64> = x.iter().map(|v| v * s).collect();
        let (a, b) = (m.eval_implicit(&scaled).unwrap(), s * m.eval_implicit(&x).unwrap());
        prop_assert!((a - b).abs() <= 1e-11 * b, "{a} vs {b}");
    }

    #[test]
    fn gini_means_increase_with_both_exponents(
        p in exponent(), q in exponent(), dp in 0.0..2.0f64, dq in 0.0..2.0f64, (x, w) in point_and_weights()
    ) {
        let small = coordinate_mean(p, q, &w).eval_implicit(&x).unwrap();
        let large = coordinate_mean(p + dp, q + dq, &w).eval_implicit(&x).unwrap();
        prop_assert!(small <= large * (1.0 + 1e-12), "{small} > {large}");
    }

    #[test]
    fn implicit_matches_explicit(p in exponent(), q in exponent(), (x, w) in point_and_weights()) {
        let m = coordinate_mean(p, q, &w);
        let (a, b) = (m.eval_implicit(&x).unwrap(), m.eval_explicit(&x).unwrap());
        prop_assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
    }

    #[test]
    fn invariant_under_pair_transforms(
        p in exponent(), q in exponent(), (x, w) in point_and_weights(),
        t in prop::array::uniform4(-2.0..2.0f64)
    ) {
        let tr = PairTransform::new(t[0], t[1], t[2], t[3]);
        prop_assume!(tr.determinant().abs() > 0.05);
        let m = coordinate_mean(p, q, &w);
        let moved = m.with_pair(m.pair().apply_transform(&tr).unwrap()).unwrap();
        let (a, b) = (m.eval_implicit(&x).unwrap(), moved.eval_implicit(&x).unwrap());
        prop_assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
    }

    #[test]
    fn delta_is_symmetric_and_vanishes_at_one(p in exponent(), q in exponent(), t in 0.01..100.0f64) {
        prop_assert_eq!(delta_gini(p, q, 1.0).unwrap(), 0.0);
        let (a, b) = (delta_gini(p, q, t).unwrap(), delta_gini(q, p, t).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn gram_matrices_are_semidefinite(b in prop::collection::vec(-3.0..3.0f64, 9)) {
        let m: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| (0..3).map(|k| b[3 * i + k] * b[3 * j + k]).sum()).collect())
            .collect();
        let scale = m.iter().flatten().fold(1.0f64, |s, v| s.max(v.abs()));
        let status = semidefinite_status(&m, 1e-10 * scale).unwrap();
        prop_assert_ne!(status, Definiteness::Indefinite);
        let shifted: Vec<Vec<f64>> = m
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().enumerate().map(|(j, v)| if i == j { v - 1.0 - min_eigenvalue(&m).unwrap() } else { *v }).collect())
            .collect();
        prop_assert_eq!(semidefinite_status(&shifted, 1e-10 * scale).unwrap(), Definiteness::Indefinite);
    }

    #[test]
    fn power_generator_conditions_agree(p in -2.0..2.0f64, q in -2.0..2.0f64) {
        let r = quasiarith_compare(
            &power_generator(p),
            &power_generator(q),
            &Interval::new(0.1, 10.0).unwrap(),
            &QuasiArithmeticOptions { x_grid: 65, uv_grid: 17, ..Default::default() },
            &Tolerances::default(),
        )
        .unwrap();
        let expected = if p <= q { Status::Holds } else { Status::Fails };
        prop_assert_eq!(r.curvature.status, expected);
        prop_assert_eq!(r.tangent.status, expected);
        prop_assert_eq!(r.convexity.status, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn global_verdict_is_transform_invariant_and_witnessed(
        p in -2i32..=2, q in -2i32..=2, r in -2i32..=2, s in -2i32..=2,
        t in prop::array::uniform4(-2.0..2.0f64)
    ) {
        let tr = PairTransform::new(t[0], t[1], t[2], t[3]);
        prop_assume!(tr.determinant() > 0.05);
        let fam = MeanFamily::coordinates(2).unwrap();
        let opts = GlobalOptions { x_grid: 7, uv_grid: 9, exec: Execution::Sequential, ..Default::default() };
        let tol = Tolerances::default();
        let (pm, pn) = (ChebyshevPair::gini(p as f64, q as f64), ChebyshevPair::gini(r as f64, s as f64));
        let base = global_condition_iii(&pm, &pn, &fam, &Interval::positive(), &opts, &tol).unwrap();
        let moved = global_condition_iii(&pm.apply_transform(&tr).unwrap(), &pn, &fam, &Interval::positive(), &opts, &tol)
            .unwrap();
        prop_assert_eq!(base.status, moved.status);
        if base.status == Status::Fails {
            let Some(Witness::Pair { u, v, .. }) = base.witness else { panic!("missing witness") };
            let left = pm.normalized_determinant(u, v).unwrap();
            let right = pn.normalized_determinant(u, v).unwrap();
            prop_assert!(left > right);
        }
    }
}
