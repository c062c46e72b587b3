use fup_core::cantor::*;
use fup_core::{FupError, IntervalUnion};
use num_rational::Ratio;
use proptest::prelude::*;

#[test]
fn iterate_examples() {
    assert_eq!(build_iterate(&CantorSpec::mid_third(0, 1.0)).unwrap().intervals(), &[(0.0, 1.0)]);
    let c1 = build_iterate(&CantorSpec::mid_third(1, 1.0)).unwrap();
    assert_eq!(c1.len(), 2);
    assert!((c1.intervals()[0].1 - 1.0 / 3.0).abs() < 1e-15 && (c1.intervals()[1].0 - 2.0 / 3.0).abs() < 1e-15);
    assert!((c1.measure() - 2.0 / 3.0).abs() < 1e-15);
    let c2 = build_iterate(&CantorSpec::mid_third(2, 1.0)).unwrap();
    assert_eq!(c2.len(), 4);
    assert!(c2.intervals().iter().all(|&(a, b)| (b - a - 1.0 / 9.0).abs() < 1e-15));
    assert!(matches!(CantorSpec::new(3, vec![0, 1, 2], 1, 1.0), Err(FupError::InvalidSpec(_))));
    assert!(matches!(CantorSpec::new(3, vec![], 1, 1.0), Err(FupError::InvalidSpec(_))));
}

#[test]
fn discrete_examples() {
    assert_eq!(discrete_iterate(&CantorSpec::mid_third(1, 1.0)).unwrap(), vec![0, 2]);
    assert_eq!(discrete_iterate(&CantorSpec::mid_third(2, 1.0)).unwrap(), vec![0, 2, 6, 8]);
    assert_eq!(discrete_iterate(&CantorSpec::new(2, vec![1], 3, 1.0).unwrap()).unwrap(), vec![7]);
    assert!(matches!(discrete_iterate(&CantorSpec::new(10, vec![0, 9], 40, 1.0).unwrap()), Err(FupError::Range(_))));
}

#[test]
fn function_examples() {
    let s = CantorSpec::mid_third(5, 1.0);
    assert_eq!(cantor_function(&s, -1.0), 0.0);
    assert_eq!(cantor_function(&s, 1.0), 1.0);
    assert!((cantor_function(&CantorSpec::mid_third(1, 1.0), 0.5) - 0.5).abs() < 1e-15);
}

#[test]
fn radial_examples() {
    let s0 = RadialCantorSpec::new(1, 1.3, 3, vec![0, 2], 0).unwrap();
    assert_eq!(radial_slice(&s0).unwrap().intervals(), &[(0.0, 1.3f64.powi(2))]);
    assert!((s0.volume() - std::f64::consts::PI * 1.69).abs() < 1e-14);
    let s1 = RadialCantorSpec::new(1, 1.0, 3, vec![0, 2], 1).unwrap();
    assert_eq!(radial_slice(&s1).unwrap().len(), 2);
    assert!((s1.volume() - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-14);
    assert!(!s1.contains(&[0.5f64.sqrt(), 0.0]));
    assert!(s1.contains(&[0.1, 0.1]));
    let s2 = RadialCantorSpec::new(2, 1.0, 3, vec![0, 2], 0).unwrap();
    assert!((s2.volume() - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-14);
}

#[test]
fn growth_examples() {
    let i3 = GrowthCondition::new(GrowthKind::Increasing, 1.0, 1.0, 3).unwrap();
    let samples: Vec<(u32, f64)> = (0..10).map(|n| (n, 3f64.powf(n as f64 / 2.0))).collect();
    assert!(check_growth(&i3, &samples).pass);
    let g = check_growth(&i3, &[(2, 2.9)]);
    assert!(!g.pass && g.first_violation.unwrap().n == 2);
    let d3 = GrowthCondition::new(GrowthKind::Radius, 1.0, 2.0, 3).unwrap();
    assert!(check_growth(&d3, &[(2, 5.0)]).pass);
    assert!(GrowthCondition::new(GrowthKind::Radius, 2.0, 1.0, 3).is_err());
}

#[test]
fn exact_mode_matches_rational_formula() {
    for (m, a) in [(3u32, vec![0u32, 2]), (5, vec![0, 1, 4]), (4, vec![1, 2])] {
        for n in 0..=8 {
            let spec = CantorSpec::with_length(m, a.clone(), n, Length::rational(7, 5).unwrap()).unwrap();
            let exact = build_iterate_exact(&spec, 16).unwrap().unwrap();
            let want = Ratio::new((a.len() as i128).pow(n) * 7, (m as i128).pow(n) * 5);
            assert_eq!(exact.measure(), want);
            assert_eq!(spec.expected_measure_exact(), Some(want));
        }
    }
    let over = CantorSpec::with_length(3, vec![0, 2], 17, Length::rational(1, 1).unwrap()).unwrap();
    assert!(build_iterate_exact(&over, 16).unwrap().is_none());
}

fn spec_strategy() -> impl Strategy<Value = CantorSpec> {
    (2u32..=5, 0u32..=7, 0.1f64..5.0)
        .prop_flat_map(|(m, n, l)| {
            (Just(m), proptest::sample::subsequence((0..m).collect::<Vec<_>>(), 1..m as usize), Just(n), Just(l))
        })
        .prop_map(|(m, a, n, l)| CantorSpec::new(m, a, n, l).unwrap())
}

proptest! {
    #[test]
    fn measure_identity(spec in spec_strategy()) {
        let set = build_iterate(&spec).unwrap();
        let want = spec.expected_measure();
        prop_assert!((set.measure() - want).abs() <= 1e-12 * want);
        prop_assert!(set.len() <= spec.alphabet.len().pow(spec.n));
    }

    #[test]
    fn nesting(spec in spec_strategy()) {
        let a = build_iterate(&spec).unwrap();
        let b = build_iterate(&spec.with_n(spec.n + 1)).unwrap();
        prop_assert!(b.is_subset_of(&a, 1e-12 * spec.l()));
    }

    #[test]
    fn function_matches_interval_measure(spec in spec_strategy(), t in 0.0f64..1.0) {
        let set = build_iterate(&spec).unwrap();
        let x = t * spec.l();
        let lhs = cantor_function(&spec, x) * spec.expected_measure();
        prop_assert!((lhs - set.measure_in(0.0, x)).abs() <= 1e-12 * spec.l());
    }

    #[test]
    fn discrete_matches_continuous(spec in spec_strategy()) {
        let cell = spec.cell();
        let raw: Vec<(f64, f64)> = discrete_iterate(&spec).unwrap().iter().map(|&k| (k as f64 * cell, (k + 1) as f64 * cell)).collect();
        let from_digits = IntervalUnion::from_intervals(raw);
        let set = build_iterate(&spec).unwrap();
        prop_assert_eq!(from_digits.len(), set.len());
        prop_assert!(from_digits.max_endpoint_distance(&set).unwrap_or(0.0) <= 1e-12 * spec.l());
    }

    #[test]
    fn function_is_monotone(spec in spec_strategy(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (x, y) = (a.min(b) * spec.l(), a.max(b) * spec.l());
        let (fx, fy) = (cantor_function(&spec, x), cantor_function(&spec, y));
        prop_assert!(fx <= fy + 1e-15 && (0.0..=1.0).contains(&fx) && (0.0..=1.0).contains(&fy));
    }
}
