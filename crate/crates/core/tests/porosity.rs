use fup_core::cantor::{build_iterate, CantorSpec, ProductCantor};
use fup_core::porosity::*;
use fup_core::{FupError, IntervalUnion};
use proptest::prelude::*;

fn third() -> IntervalUnion {
    IntervalUnion::from_intervals(vec![(0.0, 1.0 / 3.0), (2.0 / 3.0, 1.0)])
}

/// Longest open sub-interval of `[x − r, x + r]` missing the set.
fn free_length(set: &IntervalUnion, x: f64, r: f64) -> f64 {
    let (lo, hi) = (x - r, x + r);
    let mut best: f64 = 0.0;
    let mut cur = lo;
    for &(a, b) in set.intervals() {
        if b < lo {
            continue;
        }
        if a > hi {
            break;
        }
        best = best.max(a.min(hi) - cur);
        cur = cur.max(b);
    }
    best.max(hi - cur)
}

fn brute_refutes(set: &IntervalUnion, nu: f64, r: f64) -> bool {
    let (s0, s1) = set.span().unwrap();
    let steps = 4000;
    (0..=steps).any(|i| {
        let x = s0 - r + (s1 - s0 + 2.0 * r) * i as f64 / steps as f64;
        free_length(set, x, r) < 2.0 * nu * r * (1.0 - 1e-9)
    })
}

#[test]
fn verify_examples() {
    assert!(verify_porosity_1d(&third(), 1.0 / 9.0, 1.0 / 3.0, 10.0).unwrap().is_verified());
    let solid = verify_porosity_1d(&IntervalUnion::single(0.0, 1.0), 0.5, 0.1, 0.2).unwrap();
    assert!(!solid.is_verified());
    let c = solid.counterexample.unwrap();
    assert!(free_length(&IntervalUnion::single(0.0, 1.0), c.center[0], c.radius) < 2.0 * 0.5 * c.radius);
    assert!(!verify_porosity_1d(&third(), 0.4, 1.0 / 3.0, 1.0 / 3.0).unwrap().is_verified());
    assert!(verify_porosity_1d(&IntervalUnion::empty(), 0.3, 0.1, 1.0).unwrap().is_verified());
    assert!(matches!(verify_porosity_1d(&third(), 1.0, 0.1, 1.0), Err(FupError::InvalidParameter(_))));
}

#[test]
fn certificate_examples() {
    let w = certify_cantor_porosity(&CantorSpec::mid_third(3, 1.0)).unwrap();
    assert!(w.is_verified());
    assert!((w.nu - 1.0 / 9.0).abs() < 1e-15 && (w.alpha_min - 1.0 / 9.0).abs() < 1e-15);
    assert!(w.alpha_max.is_infinite());
    let w = certify_cantor_porosity(&CantorSpec::new(2, vec![0], 2, 1.0).unwrap()).unwrap();
    assert!(w.is_verified());
    assert!((w.nu - 0.25).abs() < 1e-15 && (w.alpha_min - 0.5).abs() < 1e-15);
}

#[test]
fn thicken_examples() {
    assert_eq!(thicken_1d(&IntervalUnion::single(0.0, 1.0), 0.0).unwrap().intervals(), &[(0.0, 1.0)]);
    let t = thicken_1d(&third(), 1.0 / 6.0).unwrap();
    assert_eq!(t.len(), 1);
    assert!((t.intervals()[0].0 + 1.0 / 6.0).abs() < 1e-15 && (t.intervals()[0].1 - 7.0 / 6.0).abs() < 1e-15);
    let t = thicken_1d(&third(), 1.0 / 12.0).unwrap();
    let want = [(-1.0 / 12.0, 5.0 / 12.0), (7.0 / 12.0, 13.0 / 12.0)];
    for (g, w) in t.intervals().iter().zip(want) {
        assert!((g.0 - w.0).abs() < 1e-15 && (g.1 - w.1).abs() < 1e-15);
    }
    assert!(thicken_1d(&third(), -0.1).is_err());
}

#[test]
fn thickened_porosity_examples() {
    assert_eq!(thickened_porosity(0.1, 0.0, 0.5, 1.0).unwrap().0, 0.1);
    assert!((thickened_porosity(0.1, 0.01, 0.5, 1.0).unwrap().0 - 0.08).abs() < 1e-15);
    assert!(matches!(thickened_porosity(0.1, 0.06, 0.5, 1.0), Err(FupError::InvalidParameter(_))));
}

#[test]
fn thickened_sets_stay_porous() {
    for n in 2..=5 {
        let spec = CantorSpec::mid_third(n, 1.0);
        let set = build_iterate(&spec).unwrap();
        let nu = 1.0 / 9.0;
        let amin = 3f64.powi(1 - n as i32);
        for &r in &[0.0, 0.1 * amin * nu, 0.3 * amin * nu, 0.01] {
            for &big in &[amin, 2.0 * amin, 0.5, 1.0] {
                if let Ok((nu2, (lo, hi))) = thickened_porosity(nu, r, big, 3.0) {
                    let lo = lo.max(amin);
                    let t = thicken_1d(&set, r).unwrap();
                    let w = verify_porosity_1d(&t, nu2, lo, hi).unwrap();
                    assert!(w.is_verified(), "n={n} r={r} R={big} nu'={nu2}");
                }
            }
        }
    }
}

#[test]
fn product_sampling() {
    let p = ProductCantor::power(&CantorSpec::mid_third(2, 1.0), 2);
    let nu = 1.0 / (9.0 * 2f64.sqrt() * 2.0);
    let w = sample_porosity_product(&p, nu, 1.0 / 3.0, 3.0, 1000, 42).unwrap();
    assert!(w.is_verified());
    assert_eq!((w.trials, w.seed), (Some(1000), Some(42)));
    // per-axis argument: nu = 1/9 itself holds for products
    assert!(sample_porosity_product(&p, 1.0 / 9.0, 1.0 / 3.0, 3.0, 1000, 7).unwrap().is_verified());
    let solid = ProductCantor::power(&CantorSpec::mid_third(0, 1.0), 2);
    assert!(!sample_porosity_product(&solid, 0.3, 0.05, 0.1, 200, 1).unwrap().is_verified());
    assert!(!sample_porosity_product(&p, 0.99, 0.05, 1.0, 200, 1).unwrap().is_verified());
    let three = ProductCantor::power(&CantorSpec::mid_third(1, 1.0), 3);
    assert!(matches!(sample_porosity_product(&three, 0.1, 0.1, 1.0, 10, 1), Err(FupError::Unsupported(_))));
}

#[test]
fn sweep_agrees_with_brute_force_oracle() {
    for (m, a) in [(3u32, vec![0u32, 2]), (4, vec![0, 3]), (5, vec![0, 2, 3])] {
        for n in 1..=3 {
            let set = build_iterate(&CantorSpec::new(m, a.clone(), n, 1.0).unwrap()).unwrap();
            for &nu in &[0.02, 0.05, 1.0 / (m * m) as f64, 0.15, 0.3] {
                for k in 0..12 {
                    let r = 0.02 * 1.4f64.powi(k);
                    let fast = verify_porosity_1d(&set, nu, r, r).unwrap().is_verified();
                    assert_eq!(fast, !brute_refutes(&set, nu, r), "M={m} n={n} nu={nu} r={r}");
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn thicken_composes(r1 in 0.0f64..0.3, r2 in 0.0f64..0.3, n in 0u32..5) {
        let s = build_iterate(&CantorSpec::mid_third(n, 1.0)).unwrap();
        let a = thicken_1d(&thicken_1d(&s, r1).unwrap(), r2).unwrap();
        let b = thicken_1d(&s, r1 + r2).unwrap();
        prop_assert_eq!(a.len(), b.len());
        prop_assert!(a.max_endpoint_distance(&b).unwrap_or(0.0) < 1e-12);
    }

    #[test]
    fn porosity_monotone_in_nu(n in 1u32..6, frac in 0.05f64..1.0) {
        let set = build_iterate(&CantorSpec::mid_third(n, 1.0)).unwrap();
        let amin = 3f64.powi(1 - n as i32);
        let nu0 = 1.0 / 9.0;
        prop_assert!(verify_porosity_1d(&set, nu0, amin, 3.0).unwrap().is_verified());
        prop_assert!(verify_porosity_1d(&set, nu0 * frac, amin, 3.0).unwrap().is_verified());
    }

    #[test]
    fn certificate_matches_sweep(m in 2u32..6, n in 1u32..6, seed in 0u64..1000) {
        let mut digits: Vec<u32> = (0..m).filter(|d| (seed >> d) & 1 == 1).collect();
        if digits.is_empty() || digits.len() == m as usize {
            digits = vec![0];
        }
        let spec = CantorSpec::new(m, digits, n, 1.0).unwrap();
        let cert = certify_cantor_porosity(&spec).unwrap();
        let set = build_iterate(&spec).unwrap();
        let sweep = verify_porosity_1d(&set, cert.nu, cert.alpha_min, 10.0).unwrap();
        prop_assert!(cert.is_verified());
        prop_assert_eq!(cert.is_verified(), sweep.is_verified());
    }
}
