use fup_core::bounds::optimized_density_bound;
use fup_core::cantor::{ball_volume, ScaleRule};
use fup_core::nyquist::*;
use fup_core::{build_iterate, cantor_function, radial_slice, CantorSpec, GrowthCondition, GrowthKind};
use fup_core::{IntervalUnion, ProductCantor, RadialCantorSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Maximum of `|Ω ∩ [a, a + x]|` over a grid of window starts.
fn grid_oracle(set: &IntervalUnion, x: f64, step: f64) -> f64 {
    let (s0, s1) = set.span().unwrap();
    let mut best: f64 = 0.0;
    let mut a = s0 - x;
    while a <= s1 {
        best = best.max(set.measure_in(a, a + x));
        a += step;
    }
    best
}

#[test]
fn exact_examples() {
    let c1 = build_iterate(&CantorSpec::mid_third(1, 1.0)).unwrap();
    let r = rho_exact_1d(&c1, 1.0 / 3.0).unwrap();
    assert!((r.value - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(r.kind, DensityKind::Exact);
    assert!((rho_exact_1d(&c1, 5.0).unwrap().value - 2.0 / 3.0).abs() < 1e-15);
    let c2 = build_iterate(&CantorSpec::mid_third(2, 1.0)).unwrap();
    assert!((rho_exact_1d(&c2, 1.0 / 9.0).unwrap().value - 1.0 / 9.0).abs() < 1e-15);
    assert!(rho_exact_1d(&c2, 0.0).is_err());
}

#[test]
fn exact_matches_grid_oracle() {
    for (m, a) in [(3u32, vec![0u32, 2]), (4, vec![0, 3]), (5, vec![1, 2, 4])] {
        for n in 0..=5 {
            let spec = CantorSpec::new(m, a.clone(), n, 1.0).unwrap();
            let set = build_iterate(&spec).unwrap();
            let step = (m as f64).powi(-(n as i32)) / 64.0;
            for k in [1u32, 7, 30, 64, 100, 200, 500] {
                let x = k as f64 * step;
                let got = rho_exact_1d(&set, x).unwrap();
                let want = grid_oracle(&set, x, step);
                assert!((got.value - want).abs() < 1e-10, "M={m} n={n} x={x}: {} vs {want}", got.value);
                assert!(got.respects_cap(1e-15));
            }
        }
    }
}

#[test]
fn product_examples() {
    let c1 = build_iterate(&CantorSpec::mid_third(1, 1.0)).unwrap();
    let r = rho_product_bound(&[c1.clone(), c1.clone()], 1.0 / 6.0).unwrap();
    assert!((r.value - 1.0 / 9.0).abs() < 1e-15);
    assert_eq!(r.kind, DensityKind::UpperBound);
    let solid = IntervalUnion::single(0.0, 1.0);
    for &rr in &[0.1, 0.3, 0.7] {
        let v = rho_product_bound(&[solid.clone(), solid.clone()], rr).unwrap().value;
        assert!((v - (2.0 * rr).min(1.0).powi(2)).abs() < 1e-15);
    }
    assert!((rho_product_bound(&[c1.clone(), c1], 100.0).unwrap().value - 4.0 / 9.0).abs() < 1e-15);
}

#[test]
fn porous_bound_examples() {
    let v = rho_porous_bound(1.0 / 9.0, 1.0, 1).unwrap();
    assert!((v - (80.0 / 81.0) * std::f64::consts::PI).abs() < 1e-12);
    assert!((v - 3.1028).abs() < 1e-4);
    assert!(rho_porous_bound(0.999999, 1.0, 2).unwrap() < 1e-4);
    assert!((rho_porous_bound(1e-6, 1.0, 2).unwrap() - ball_volume(2, 1.0)).abs() < 1e-9);
    assert!(rho_porous_bound(1.0, 1.0, 1).is_err());
}

#[test]
fn monte_carlo_is_below_upper_bounds() {
    let none = rho_monte_carlo(|_: &[f64]| false, 0.5, &[(0.0, 1.0), (0.0, 1.0)], 16, 500, 1).unwrap();
    assert_eq!(none.value, 0.0);
    assert_eq!(none.kind, DensityKind::MonteCarloLowerBound);

    let ball = rho_monte_carlo(|p: &[f64]| p[0] * p[0] + p[1] * p[1] <= 1.0, 1.0, &[(0.0, 0.0), (0.0, 0.0)], 1, 100_000, 5)
        .unwrap();
    assert!((ball.value / std::f64::consts::PI - 1.0).abs() < 0.01);

    let c1 = build_iterate(&CantorSpec::mid_third(1, 1.0)).unwrap();
    let f = c1.clone();
    let lb = rho_monte_carlo(move |p: &[f64]| f.contains(p[0]) && f.contains(p[1]), 0.2, &[(0.0, 1.0), (0.0, 1.0)], 64, 4000, 9)
        .unwrap();
    let ub = rho_product_bound(&[c1.clone(), c1], 0.2).unwrap();
    assert!(lb.value > 0.0 && lb.value <= ub.value);
}

#[test]
fn radial_bound_dominates_monte_carlo() {
    let spec = RadialCantorSpec::new(1, 9f64.sqrt().sqrt(), 3, vec![0, 2], 4).unwrap();
    let slice = radial_slice(&spec).unwrap();
    let up = rho_radial_bound(&spec, 1.0, 4.0, None).unwrap();
    assert!(up.respects_cap(1e-12));
    let lb = rho_monte_carlo(
        move |p: &[f64]| slice.contains(p[0] * p[0] + p[1] * p[1]),
        1.0,
        &[(-2.0, 2.0), (-2.0, 2.0)],
        128,
        3000,
        3,
    )
    .unwrap();
    assert!(lb.value <= up.value, "{} > {}", lb.value, up.value);
    // small windows shrink the bound
    assert!(rho_radial_bound(&spec, 1e-3, 4.0, None).unwrap().value <= ball_volume(1, 1e-3) * (1.0 + 1e-12));
    assert!(rho_radial_bound(&spec, 1.0, 1.0, None).is_err());
    let full = RadialCantorSpec::new(1, 0.5, 3, vec![0, 2], 0).unwrap();
    let v = rho_radial_bound(&full, 1.0, 4.0, None).unwrap().value;
    assert!(v <= ball_volume(1, 0.5).min(ball_volume(1, 1.0)) * (1.0 + 1e-12));
    let gamma = optimized_density_bound(up.value, 1.0, 1) / (2.0f64 / 3.0).powi(2);
    assert!(gamma.is_finite() && gamma > 0.0);
}

#[test]
fn subadditivity_examples() {
    let spec = CantorSpec::mid_third(2, 1.0);
    let r = check_weak_subadditivity(&spec, &[(0.3, 0.3), (2.0 / 3.0, 1.0)]).unwrap();
    assert!(r.pass);
    let lhs = cantor_function(&spec, 1.0) - cantor_function(&spec, 2.0 / 3.0);
    assert!((lhs - 0.5).abs() < 1e-12);
    assert!((cantor_function(&spec.canonical(), 1.0 / 3.0) - 0.5).abs() < 1e-12);
    assert!(check_weak_subadditivity(&spec, &[(0.5, 0.2)]).is_err());
}

#[test]
fn subadditivity_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for a in [vec![0u32, 2], vec![0, 1], vec![1, 2]] {
        for n in 0..=6 {
            let spec = CantorSpec::new(3, a.clone(), n, 1.0).unwrap();
            let pairs: Vec<(f64, f64)> = (0..10_000)
                .map(|_| {
                    let (x, y): (f64, f64) = (rng.gen(), rng.gen());
                    (x.min(y), x.max(y))
                })
                .collect();
            let r = check_weak_subadditivity(&spec, &pairs).unwrap();
            assert!(r.pass, "A={a:?} n={n}: {:?}", r.first_violation);
            assert_eq!(r.checked, 10_000);
        }
    }
}

#[test]
fn scaled_fixture_is_caught() {
    let spec = CantorSpec::mid_third(3, 1.0);
    let r = check_weak_subadditivity_scaled(&spec, &[(0.0, 1.0)], 0.5).unwrap();
    assert!(!r.pass && r.first_violation.is_some());
}

#[test]
fn decay_examples() {
    let base = CantorSpec::mid_third(0, 1.0);
    let cond = GrowthCondition::new(GrowthKind::Increasing, 1.0, 1.0, 3).unwrap();
    let ns: Vec<u32> = (0..=12).collect();
    let rep = check_density_decay(&base, ScaleRule::new(1.0, 3.0), &ns, 1.0, &cond).unwrap();
    assert!(rep.pass, "slope {}", rep.slope);
    assert!((rep.rows[0].measure - 1.0).abs() < 1e-15);
    for row in &rep.rows {
        assert!(row.ratio <= rep.gamma);
        let s = base.with_n(row.n).with_l(row.length);
        assert!((row.measure - measure_below(&s, 1.0).unwrap()).abs() < 1e-12);
    }
    let broken = check_density_decay(&base, ScaleRule::new(1.0, 4.0), &ns, 1.0, &cond);
    assert!(broken.is_err());
}

proptest! {
    #[test]
    fn translation_invariance(n in 0u32..5, x in 0.01f64..1.5, t in -10.0f64..10.0) {
        let set = build_iterate(&CantorSpec::mid_third(n, 1.0)).unwrap();
        let a = rho_exact_1d(&set, x).unwrap().value;
        let b = rho_exact_1d(&set.translate(t), x).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_window(n in 0u32..6, x1 in 0.001f64..1.0, dx in 0.0f64..1.0) {
        let set = build_iterate(&CantorSpec::mid_third(n, 1.0)).unwrap();
        let a = rho_exact_1d(&set, x1).unwrap();
        let b = rho_exact_1d(&set, x1 + dx).unwrap();
        prop_assert!(a.value <= b.value + 1e-15);
        prop_assert!(a.respects_cap(1e-15) && b.respects_cap(1e-15));
    }

    #[test]
    fn multiple_subadditivity_holds(n in 0u32..6, x in 0.0f64..0.5, m in 0.1f64..6.0) {
        let (lhs, rhs) = multiple_subadditivity(&CantorSpec::mid_third(n, 1.0), x, m);
        prop_assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn product_of_factors_dominates_grid(n in 0u32..4, r in 0.05f64..0.6) {
        let p = ProductCantor::power(&CantorSpec::mid_third(n, 1.0), 2);
        let up = rho_product_bound_spec(&p, r).unwrap();
        prop_assert!(up.respects_cap(1e-15));
        let f = build_iterate(&CantorSpec::mid_third(n, 1.0)).unwrap();
        // window of side 2r at the argmax is the largest axis-aligned square mass
        let c = up.argmax.clone().unwrap();
        let sq = f.measure_in(c[0] - r, c[0] + r) * f.measure_in(c[1] - r, c[1] + r);
        prop_assert!((sq - up.value).abs() < 1e-12);
    }
}
