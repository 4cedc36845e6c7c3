use std::f64::consts::PI;

use betahand::geometry::{convex_hausdorff, convex_hull, distance_to_convex_polygon, hausdorff};
use betahand::ifs::{compose_maps, ifs_maps, transform_object, Direction};
use betahand::kinematics::evaluate_complex;
use betahand::model::{from_complex, to_complex};
use betahand::reach::{enumerate_reachable, hull_vertices_2pi3, hutchinson_iterate, HutchinsonOptions};
use betahand::{Circle, ControlSequence, Digit, FingerSpec, Vec2};
use num_complex::Complex64;
use proptest::prelude::*;

const W3: f64 = 2.0 * PI / 3.0;

/// Endpoints of all `4^len` control sequences by direct evaluation.
fn brute_force(spec: &FingerSpec, len: usize) -> Vec<Vec2> {
    (0..(1u32 << (2 * len)))
        .map(|bits| {
            let u: Vec<bool> = (0..len).map(|i| bits >> i & 1 == 1).collect();
            let v: Vec<bool> = (0..len).map(|i| bits >> (len + i) & 1 == 1).collect();
            from_complex(evaluate_complex(spec, &ControlSequence::new(u, v).unwrap()).unwrap())
        })
        .collect()
}

#[test]
fn enumeration_matches_brute_force() {
    for (rho, omega) in [(2.0, W3), (1.7, 1.1), (5f64.sqrt(), PI / 2.0)] {
        let spec = FingerSpec::canonical(rho, omega);
        for len in 0..=6 {
            let cloud = enumerate_reachable(&spec, len, 1e-9).unwrap();
            let brute = brute_force(&spec, len);
            assert!(hausdorff(&cloud.points, &brute) < 1e-8, "rho={rho} omega={omega} len={len}");
            assert!(cloud.points.len() <= brute.len());
        }
    }
}

#[test]
fn levels_are_nested() {
    // Appending a retracted, unrotated step leaves the endpoint unchanged.
    let spec = FingerSpec::canonical(2.0, W3);
    for k in 0..7 {
        let a = enumerate_reachable(&spec, k, 1e-9).unwrap();
        let b = enumerate_reachable(&spec, k + 1, 1e-9).unwrap();
        let b_hull = convex_hull(&b.points);
        assert!(a.points.iter().all(|p| distance_to_convex_polygon(p, &b_hull) < 1e-12));
        assert!(a.points.iter().all(|p| b.points.iter().any(|q| (p - q).norm() < 1e-9)));
    }
}

#[test]
fn ifs_equivalence_and_closure() {
    let spec = FingerSpec::canonical(1.8, 1.3);
    let ifs = ifs_maps(spec.rho, spec.omega).unwrap();
    for k in 0..6 {
        let level = enumerate_reachable(&spec, k, 1e-9).unwrap();
        let next = enumerate_reachable(&spec, k + 1, 1e-9).unwrap();
        let image: Vec<Vec2> = ifs
            .maps()
            .iter()
            .flat_map(|m| level.points.iter().map(move |p| from_complex(m.apply(to_complex(p)))))
            .collect();
        assert!(hausdorff(&image, &next.points) < 1e-9);
    }
}

#[test]
fn digit_words_cover_the_alphabet() {
    // every control pair is one of the four digits and every digit is a control pair
    for d in Digit::ALL {
        let c = ControlSequence::from_digits(&[d]);
        assert_eq!(c.digits(), vec![d]);
    }
    let ifs = ifs_maps(2.0, W3).unwrap();
    let zero = Complex64::new(0.0, 0.0);
    let ones = compose_maps(&ifs, &[Digit::D3, Digit::D3, Digit::D3], zero);
    assert!((ones - Complex64::new(0.875, 0.0)).norm() < 1e-15);
}

#[test]
fn hutchinson_contracts_towards_the_attractor() {
    let spec = FingerSpec::canonical(2.0, W3);
    let opts = HutchinsonOptions::default();
    let r0 = vec![Complex64::new(0.0, 0.0)];
    let r1 = hutchinson_iterate(&spec, &r0, 1, opts).unwrap();
    let pts = |s: &[Complex64]| s.iter().map(|z| from_complex(*z)).collect::<Vec<_>>();
    let h01 = hausdorff(&pts(&r0), &pts(&r1));
    for k in [7usize, 8, 9] {
        let a = hutchinson_iterate(&spec, &r0, k, opts).unwrap();
        let b = hutchinson_iterate(&spec, &r0, k + 1, opts).unwrap();
        let h = hausdorff(&pts(&a), &pts(&b));
        assert!(h <= h01 / 2f64.powi(k as i32) + 1e-9, "k={k}: {h}");
    }
    // a different seed lands on the same sets up to rho^-n |seed|
    let seed = vec![Complex64::new(0.3, -0.2)];
    for n in [4usize, 6] {
        let a = hutchinson_iterate(&spec, &seed, n, opts).unwrap();
        let b = hutchinson_iterate(&spec, &r0, n, opts).unwrap();
        assert!(hausdorff(&pts(&a), &pts(&b)) <= seed[0].norm() / 2f64.powi(n as i32) + 1e-9);
    }
}

#[test]
fn depth_ten_cloud_inside_closed_form_hull() {
    for rho in [2.0, 2.5] {
        let spec = FingerSpec::canonical(rho, W3);
        let hull = convex_hull(&hull_vertices_2pi3(rho).unwrap());
        assert_eq!(hull.len(), 4);
        let cloud = enumerate_reachable(&spec, 10, 1e-9).unwrap();
        let worst = cloud
            .points
            .iter()
            .map(|p| distance_to_convex_polygon(p, &hull))
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "rho={rho}: {worst}");
        let approx = convex_hull(&cloud.points);
        let bound = 1.0 / (rho.powi(10) * (rho - 1.0));
        assert!(convex_hausdorff(&approx, &hull) <= bound + 1e-12);
    }
}

proptest! {
    #[test]
    fn hutchinson_is_a_contraction(rho in 1.2f64..4.0, omega in 0.1f64..3.0,
        a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..20),
        b in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..20)) {
        let spec = FingerSpec::canonical(rho, omega);
        let opts = HutchinsonOptions { dedupe_tol: 1e-12, size_cap: 1000 };
        let za: Vec<Complex64> = a.iter().map(|&(x, y)| Complex64::new(x, y)).collect();
        let zb: Vec<Complex64> = b.iter().map(|&(x, y)| Complex64::new(x, y)).collect();
        let pts = |s: &[Complex64]| s.iter().map(|z| from_complex(*z)).collect::<Vec<_>>();
        let before = hausdorff(&pts(&za), &pts(&zb));
        let fa = hutchinson_iterate(&spec, &za, 1, opts).unwrap();
        let fb = hutchinson_iterate(&spec, &zb, 1, opts).unwrap();
        prop_assert!(hausdorff(&pts(&fa), &pts(&fb)) <= before / rho + 1e-9);
    }

    #[test]
    fn circle_transform_round_trip(rho in 1.2f64..4.0, omega in 0.1f64..3.0,
        digits in prop::collection::vec(1u8..=4, 0..8), cx in -1.0f64..1.0, cy in -1.0f64..1.0, r in 0.01f64..1.0) {
        let ifs = ifs_maps(rho, omega).unwrap();
        let ds: Vec<Digit> = digits.iter().map(|&d| Digit::try_from(d).unwrap()).collect();
        let c = Circle::new(Vec2::new(cx, cy), r).unwrap();
        let there = transform_object(&ifs, &c, &ds, Direction::Forward);
        prop_assert!((there.radius - r / rho.powi(ds.len() as i32)).abs() < 1e-12);
        let back = transform_object(&ifs, &there, &ds, Direction::Inverse);
        prop_assert!((back.center - c.center).norm() < 1e-9);
        prop_assert!((back.radius - r).abs() < 1e-9);
    }
}
