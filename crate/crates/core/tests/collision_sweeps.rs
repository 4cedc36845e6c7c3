use std::f64::consts::PI;

use betahand::collision::{exhaustive_sweep, hook_controls, is_self_intersecting, segments_intersect, Segment};
use betahand::kinematics::evaluate_junctions;
use betahand::{ControlSequence, FingerSpec, Vec2};
use proptest::prelude::*;

const W3: f64 = 2.0 * PI / 3.0;

/// First self-intersecting prefix in depth-first lexicographic order, by
/// evaluating every prefix from scratch.
fn first_by_brute_force(rho: f64, omega: f64, depth: usize) -> Option<(ControlSequence, (usize, usize))> {
    fn walk(
        spec: &FingerSpec,
        u: &mut Vec<bool>,
        v: &mut Vec<bool>,
        depth: usize,
    ) -> Option<(ControlSequence, (usize, usize))> {
        if u.len() == depth {
            return None;
        }
        for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
            u.push(a);
            v.push(b);
            let c = ControlSequence::new(u.clone(), v.clone()).unwrap();
            if let Some(pair) = is_self_intersecting(&evaluate_junctions(spec, &c).unwrap(), 1e-9) {
                return Some((c, pair));
            }
            if let Some(found) = walk(spec, u, v, depth) {
                return Some(found);
            }
            u.pop();
            v.pop();
        }
        None
    }
    walk(&FingerSpec::canonical(rho, omega), &mut Vec::new(), &mut Vec::new(), depth)
}

#[test]
fn safe_ratios_up_to_depth_eight() {
    for rho in [2.0, 2.25, 3.0] {
        let report = exhaustive_sweep(rho, W3, 8, 1e-9).unwrap();
        assert!(report.safe(), "rho={rho}: {:?}", report.counterexample);
    }
}

#[test]
fn sweep_agrees_with_brute_force() {
    for (rho, omega) in [(1.5, W3), (1.3, 1.0), (2.0, PI / 2.0), (2.5, W3)] {
        let report = exhaustive_sweep(rho, omega, 6, 1e-9).unwrap();
        let brute = first_by_brute_force(rho, omega, 6);
        let got = report.counterexample.map(|c| (c.controls, c.pair));
        assert_eq!(got, brute, "rho={rho} omega={omega}");
    }
}

#[test]
fn hook_family_threshold() {
    // smallest hook length that intersects at rho = 1.5, found by scanning
    let spec = FingerSpec::canonical(1.5, W3);
    let hits = |j: usize| is_self_intersecting(&evaluate_junctions(&spec, &hook_controls(j)).unwrap(), 1e-9);
    let j_star = (1..=20).find(|&j| hits(j).is_some()).unwrap();
    assert_eq!(j_star, 4);
    for j in j_star..=20 {
        assert_eq!(hits(j), Some((1, 4)));
    }
    // at rho = 2 the hook only approaches the first phalanx, with a gap of
    // order 2^-J, so it stays clear of the 1e-9 tolerance up to J = 20
    let spec2 = FingerSpec::canonical(2.0, W3);
    for j in 1..=20 {
        assert!(is_self_intersecting(&evaluate_junctions(&spec2, &hook_controls(j)).unwrap(), 1e-9).is_none());
    }
}

fn controls_strategy() -> impl Strategy<Value = ControlSequence> {
    (0usize..14).prop_flat_map(|n| {
        (prop::collection::vec(any::<bool>(), n), prop::collection::vec(any::<bool>(), n))
            .prop_map(|(u, v)| ControlSequence::new(u, v).unwrap())
    })
}

proptest! {
    #[test]
    fn rigid_placement_preserves_verdict(rho in 1.1f64..3.0, omega in 0.2f64..3.0, c in controls_strategy(),
        angle in 0.0f64..(2.0 * PI), ox in -1.0f64..1.0, oy in -1.0f64..1.0) {
        let canonical = evaluate_junctions(&FingerSpec::canonical(rho, omega), &c).unwrap();
        let spec = FingerSpec::canonical(rho, omega)
            .with_direction(Vec2::new(angle.cos(), angle.sin()))
            .with_origin(Vec2::new(ox, oy));
        let moved = evaluate_junctions(&spec, &c).unwrap();
        prop_assert_eq!(is_self_intersecting(&canonical, 1e-9), is_self_intersecting(&moved, 1e-9));
    }

    #[test]
    fn segment_test_is_symmetric(a in prop::array::uniform4(-1.0f64..1.0), b in prop::array::uniform4(-1.0f64..1.0)) {
        let s = Segment::new(Vec2::new(a[0], a[1]), Vec2::new(a[2], a[3]));
        let t = Segment::new(Vec2::new(b[0], b[1]), Vec2::new(b[2], b[3]));
        prop_assert_eq!(segments_intersect(&s, &t, 1e-9), segments_intersect(&t, &s, 1e-9));
        let rev = Segment::new(t.b, t.a);
        prop_assert_eq!(segments_intersect(&s, &t, 1e-9), segments_intersect(&s, &rev, 1e-9));
    }

    #[test]
    fn appending_retracted_steps_keeps_verdict(rho in 1.1f64..3.0, omega in 0.2f64..3.0, c in controls_strategy(), extra in 0usize..5) {
        let spec = FingerSpec::canonical(rho, omega);
        let tail = ControlSequence::new(vec![false; extra], vec![true; extra]).unwrap();
        let before = is_self_intersecting(&evaluate_junctions(&spec, &c).unwrap(), 1e-9);
        let after = is_self_intersecting(&evaluate_junctions(&spec, &c.concat(&tail)).unwrap(), 1e-9);
        prop_assert_eq!(before, after);
    }
}
