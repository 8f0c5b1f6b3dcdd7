mod common;

use common::*;
use proptest::prelude::*;
use radial_core::{canonicalize, ExtendedValue, Point};
use rand::Rng;

#[test]
fn midpoint_convexity_on_every_instance() {
    for p in bounded_instances() {
        let mut rng = rng(11);
        for _ in 0..1000 {
            let a = sample_domain(&mut rng, &p, 3.0);
            let b = sample_domain(&mut rng, &p, 3.0);
            let fm = value(&p, &midpoint(&a, &b));
            let avg = 0.5 * (value(&p, &a) + value(&p, &b));
            assert!(fm <= avg + 1e-9, "{}: f(mid) = {fm} > {avg}", p.id());
        }
    }
}

#[test]
fn origin_is_strictly_feasible() {
    for p in bounded_instances().into_iter().chain([unbounded_lp()]) {
        let f0 = p.evaluate(&p.origin()).unwrap();
        assert!(f0.finite().unwrap() < 0.0, "{}", p.id());
    }
}

/// Boundary points of the epigraph: `(x, f(x))` for interior `x`, plus
/// points on the edge of the domain at heights above `f`.
fn boundary_points(p: &radial_core::ProblemInstance, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<(Vec<f64>, f64)> {
    let mut out = Vec::new();
    for _ in 0..60 {
        let x = sample_domain(rng, p, 3.0);
        out.push((x.clone(), value(p, &x)));
    }
    let mut attempts = 0;
    while out.len() < 100 && attempts < 10_000 {
        attempts += 1;
        let dir = sample_box(rng, p.dimension(), 1.0);
        let (mut lo, mut hi) = (0.0, 1.0);
        while p
            .evaluate(&dir.iter().map(|d| d * hi).collect::<Vec<_>>())
            .unwrap()
            .is_finite()
        {
            hi *= 2.0;
            if hi > 1e6 {
                break;
            }
        }
        if hi > 1e6 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let x: Vec<f64> = dir.iter().map(|d| d * mid).collect();
            if p.evaluate(&x).unwrap().is_finite() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x: Vec<f64> = dir.iter().map(|d| d * lo).collect();
        let fx = value(p, &x);
        out.push((x, fx + rng.gen_range(0.0..2.0)));
    }
    out
}

#[test]
fn normals_support_the_epigraph() {
    for p in bounded_instances() {
        let mut rng = rng(12);
        for (x, t) in boundary_points(&p, &mut rng) {
            let n = p.boundary_normal(&x, t).unwrap();
            assert!(n.delta() <= 0.0);
            for _ in 0..100 {
                let u = sample_domain(&mut rng, &p, 3.0);
                let s = value(&p, &u) + rng.gen_range(0.0..3.0);
                let lhs: f64 = n
                    .zeta()
                    .iter()
                    .zip(u.iter().zip(&x))
                    .map(|(g, (a, b))| g * (a - b))
                    .sum::<f64>()
                    + n.delta() * (s - t);
                let scale = n.zeta().norm() + n.delta().abs();
                assert!(lhs <= 1e-9 * scale.max(1.0), "{}: {lhs} at x = {x:?}, t = {t}", p.id());
            }
        }
    }
}

#[test]
fn canonicalized_ball_matches_shifted_raw_values() {
    let raw = ball();
    let x0 = Point::new(vec![0.4, 0.1]).unwrap();
    let h = 0.25;
    let canon = canonicalize(raw.objective().clone(), &x0, h).unwrap();
    assert_eq!(canon.value_at_origin(), -h);
    let f_x0 = value(&raw, x0.as_slice());
    let mut rng = rng(13);
    for _ in 0..200 {
        let x = sample_box(&mut rng, 2, 1.5);
        let shifted: Vec<f64> = x.iter().zip(x0.iter()).map(|(a, b)| a + b).collect();
        match (canon.evaluate(&x).unwrap(), raw.evaluate(&shifted).unwrap()) {
            (ExtendedValue::PosInfinity, ExtendedValue::PosInfinity) => {}
            (ExtendedValue::Finite(c), ExtendedValue::Finite(r)) => {
                assert!((c - (r - f_x0 - h)).abs() <= 1e-12)
            }
            other => panic!("domain mismatch at {x:?}: {other:?}"),
        }
    }
}

proptest! {
    #[test]
    fn extended_scale_preserves_sign_and_infinity(v in -1e6f64..1e6, s in 1e-6f64..1e6) {
        let e = ExtendedValue::from_f64(v).unwrap();
        let scaled = e.scale(s).finite().unwrap();
        prop_assert_eq!(scaled.signum(), (v * s).signum());
        prop_assert_eq!(ExtendedValue::PosInfinity.scale(s), ExtendedValue::PosInfinity);
    }

    #[test]
    fn point_rejects_non_finite(i in 0usize..3, bad in prop::sample::select(vec![f64::NAN, f64::INFINITY, f64::NEG_INFINITY])) {
        let mut coords = vec![0.0; 3];
        coords[i] = bad;
        prop_assert!(Point::new(coords).is_err());
    }

    #[test]
    fn point_norm_is_homogeneous(v in prop::collection::vec(-1e3f64..1e3, 1..6), s in -10f64..10.0) {
        let p = Point::new(v).unwrap();
        let lhs = p.scaled(s).norm();
        prop_assert!((lhs - s.abs() * p.norm()).abs() <= 1e-9 * (1.0 + lhs));
    }
}
