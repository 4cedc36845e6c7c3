//! Self-intersection of finger configurations.
//!
//! Retracted phalanxes have zero length and are skipped; two extended
//! phalanxes are adjacent when no other extended phalanx lies between them.
//! Adjacent phalanxes share a junction and only count as intersecting when
//! one folds back onto the other.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{point_segment_distance, segment_distance};
use crate::kinematics::evaluate_junctions;
use crate::model::{check_rho_omega, ControlSequence, Configuration, FingerSpec, Vec2, ALGEBRAIC_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment {
    pub fn new(a: Vec2, b: Vec2) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }
}

/// True iff the closed segments come within `tol` of each other.
pub fn segments_intersect(s1: &Segment, s2: &Segment, tol: f64) -> bool {
    segment_distance(&s1.a, &s1.b, &s2.a, &s2.b) <= tol
}

/// Adjacent phalanxes `prev` and `next` (with `prev.b == next.a`) overlap
/// beyond their shared junction.
fn folds_back(prev: &Segment, next: &Segment, tol: f64) -> bool {
    let (short, long, far) = if next.length() <= prev.length() {
        (next, prev, next.b)
    } else {
        (prev, next, prev.a)
    };
    short.length() > tol && point_segment_distance(&far, &long.a, &long.b) <= tol
}

/// Checks a configuration, returning the lexicographically smallest pair of
/// offending phalanx indices (1-based), or `None` if it is free of self-intersections.
pub fn is_self_intersecting(config: &Configuration, tol: f64) -> Option<(usize, usize)> {
    let phalanxes: Vec<(usize, Segment)> = config
        .extended_phalanxes()
        .map(|k| {
            let (a, b) = config.phalanx(k);
            (k, Segment::new(a, b))
        })
        .collect();
    for (i, (ki, si)) in phalanxes.iter().enumerate() {
        for (j, (kj, sj)) in phalanxes.iter().enumerate().skip(i + 1) {
            let hit = if j == i + 1 {
                folds_back(si, sj, tol)
            } else {
                segments_intersect(si, sj, tol)
            };
            if hit {
                return Some((*ki, *kj));
            }
        }
    }
    None
}

/// Whether the hand is guaranteed free of self-intersections: `omega = 2 pi / 3`
/// (interior angle `pi / 3`) and `rho >= 2`. `false` means no guarantee,
/// not that an intersection exists.
pub fn no_self_intersection_guarantee(rho: f64, omega: f64) -> bool {
    (omega - 2.0 * PI / 3.0).abs() <= ALGEBRAIC_TOL && rho >= 2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub controls: ControlSequence,
    pub pair: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rho: f64,
    pub omega: f64,
    pub depth: usize,
    /// Number of control prefixes visited.
    pub visited: u64,
    pub counterexample: Option<Counterexample>,
}

impl SweepReport {
    pub fn safe(&self) -> bool {
        self.counterexample.is_none()
    }
}

type Prefix = (Vec<bool>, Vec<bool>);

#[derive(Clone)]
struct SweepState {
    point: Vec2,
    turns: u32,
    scale: f64,
    segments: Vec<Segment>,
    u: Vec<bool>,
    v: Vec<bool>,
}

struct Sweeper {
    rho: f64,
    omega: f64,
    depth: usize,
    tol: f64,
}

impl Sweeper {
    fn step(&self, state: &SweepState, u: bool, v: bool) -> (SweepState, bool) {
        let mut next = state.clone();
        next.scale /= self.rho;
        next.turns += v as u32;
        next.u.push(u);
        next.v.push(v);
        let mut hit = false;
        if u {
            let angle = -f64::from(next.turns) * self.omega;
            let end = next.point + next.scale * Vec2::new(angle.cos(), angle.sin());
            let seg = Segment::new(next.point, end);
            if let Some((last, earlier)) = next.segments.split_last() {
                hit = folds_back(last, &seg, self.tol)
                    || earlier.iter().any(|s| segments_intersect(s, &seg, self.tol));
            }
            next.segments.push(seg);
            next.point = end;
        }
        (next, hit)
    }

    /// Depth-first search in lexicographic control order; returns the first
    /// intersecting prefix, if any.
    fn search(&self, state: &SweepState, visited: &mut u64) -> Option<Prefix> {
        if state.u.len() == self.depth {
            return None;
        }
        for (u, v) in [(false, false), (false, true), (true, false), (true, true)] {
            *visited += 1;
            let (next, hit) = self.step(state, u, v);
            if hit {
                return Some((next.u, next.v));
            }
            if let Some(found) = self.search(&next, visited) {
                return Some(found);
            }
        }
        None
    }
}

/// Exhaustively checks every control sequence of length `depth` (which covers
/// all shorter ones) for self-intersections.
pub fn exhaustive_sweep(rho: f64, omega: f64, depth: usize, tol: f64) -> Result<SweepReport> {
    check_rho_omega(rho, omega)?;
    let sweeper = Sweeper { rho, omega, depth, tol };
    let root = SweepState {
        point: Vec2::zeros(),
        turns: 0,
        scale: 1.0,
        segments: Vec::new(),
        u: Vec::new(),
        v: Vec::new(),
    };

    // Fan out over the first two control pairs; results are merged in order.
    let mut frontier = vec![(root, 0u64, None)];
    let mut interior = 0u64;
    for _ in 0..depth.min(2) {
        let mut expanded = Vec::new();
        for (state, visited, found) in frontier {
            if found.is_some() {
                expanded.push((state, visited, found));
                continue;
            }
            interior += visited;
            for (u, v) in [(false, false), (false, true), (true, false), (true, true)] {
                let (next, hit) = sweeper.step(&state, u, v);
                let found = hit.then(|| (next.u.clone(), next.v.clone()));
                expanded.push((next, 1, found));
            }
        }
        frontier = expanded;
    }
    let results: Vec<(u64, Option<Prefix>)> = frontier
        .into_par_iter()
        .map(|(state, mut visited, found)| {
            if found.is_some() {
                return (visited, found);
            }
            let found = sweeper.search(&state, &mut visited);
            (visited, found)
        })
        .collect();

    let visited = interior + results.iter().map(|r| r.0).sum::<u64>();
    let first = results.into_iter().find_map(|r| r.1);
    let counterexample = match first {
        None => None,
        Some((u, v)) => {
            let controls = ControlSequence::new(u, v)?;
            let config = evaluate_junctions(&FingerSpec::canonical(rho, omega), &controls)?;
            let pair = is_self_intersecting(&config, tol)
                .expect("sweep and configuration check agree on the offending prefix");
            Some(Counterexample { controls, pair })
        }
    };
    Ok(SweepReport {
        rho,
        omega,
        depth,
        visited,
        counterexample,
    })
}

/// Controls `u = 1...1`, `v = (0, 1, 1, 0, ..., 0)` of length `len`: the
/// family that self-intersects when `rho < 2` at `omega = 2 pi / 3`.
pub fn hook_controls(len: usize) -> ControlSequence {
    let u = vec![true; len];
    let v = (1..=len).map(|j| j == 2 || j == 3).collect();
    ControlSequence::new(u, v).expect("equal lengths")
}
