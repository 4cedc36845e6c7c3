//! Reachable sets of a finger: exact enumeration at finite depth, Hutchinson
//! iteration towards the attractor, and the closed-form hull for `omega = 2 pi / 3`.
//!
//! Point sets are deduplicated by snapping to a square grid of pitch
//! `dedupe_tol`, so set semantics are approximate at that scale.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::convex_hull;
use crate::ifs::{ifs_maps, Ifs};
use crate::model::{from_complex, FingerSpec, Vec2, GEOMETRIC_TOL};

pub const DEFAULT_DEPTH_CAP: usize = 16;
pub const DEFAULT_SIZE_CAP: usize = 10_000_000;
pub const DEFAULT_DEDUPE_TOL: f64 = GEOMETRIC_TOL;

/// Endpoints reachable with exactly `depth` control pairs, in the finger's plane coordinates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReachableCloud {
    pub points: Vec<Vec2>,
    pub depth: usize,
    pub spec: FingerSpec,
    pub dedupe_tol: f64,
}

/// Grid-snapping point set that keeps first-seen order.
struct SnapSet {
    pitch: f64,
    seen: FxHashSet<(i64, i64)>,
    points: Vec<Complex64>,
}

impl SnapSet {
    fn with_capacity(pitch: f64, n: usize) -> Self {
        let mut seen = FxHashSet::default();
        seen.reserve(n);
        SnapSet {
            pitch,
            seen,
            points: Vec::with_capacity(n),
        }
    }

    fn insert(&mut self, z: Complex64) {
        let key = ((z.re / self.pitch).round() as i64, (z.im / self.pitch).round() as i64);
        if self.seen.insert(key) {
            self.points.push(z);
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidGeometry(format!("dedupe tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// One Hutchinson step `S -> f_1(S) u ... u f_4(S)` with deduplication.
fn hutchinson_step(ifs: &Ifs, set: &[Complex64], pitch: f64, cap: usize) -> Result<Vec<Complex64>> {
    let mut next = SnapSet::with_capacity(pitch, (4 * set.len()).min(cap));
    for map in ifs.maps() {
        for &z in set {
            next.insert(map.apply(z));
            if next.points.len() > cap {
                return Err(Error::SizeCapExceeded { size: next.points.len(), cap });
            }
        }
    }
    Ok(next.points)
}

#[derive(Clone, Copy, Debug)]
pub struct HutchinsonOptions {
    pub dedupe_tol: f64,
    pub size_cap: usize,
}

impl Default for HutchinsonOptions {
    fn default() -> Self {
        HutchinsonOptions {
            dedupe_tol: DEFAULT_DEDUPE_TOL,
            size_cap: DEFAULT_SIZE_CAP,
        }
    }
}

/// `F^n(seed)` for the Hutchinson operator of the finger's maps (canonical frame).
pub fn hutchinson_iterate(
    spec: &FingerSpec,
    seed: &[Complex64],
    iterations: usize,
    opts: HutchinsonOptions,
) -> Result<Vec<Complex64>> {
    check_tol(opts.dedupe_tol)?;
    let ifs = ifs_maps(spec.rho, spec.omega)?;
    let mut set = seed.to_vec();
    for _ in 0..iterations {
        set = hutchinson_step(&ifs, &set, opts.dedupe_tol, opts.size_cap)?;
    }
    Ok(set)
}

/// All endpoints of control sequences of length `depth`, deduplicated.
///
/// Appending a control pair in front of a sequence applies one map on the
/// outside, so the depth-`k` set is the Hutchinson image of the depth-`k-1`
/// set. Deduplicating after every level keeps the work proportional to the
/// number of distinct points, which for rational `omega / pi` is far below `4^k`.
pub fn enumerate_reachable(spec: &FingerSpec, depth: usize, dedupe_tol: f64) -> Result<ReachableCloud> {
    enumerate_reachable_capped(spec, depth, dedupe_tol, DEFAULT_DEPTH_CAP)
}

pub fn enumerate_reachable_capped(
    spec: &FingerSpec,
    depth: usize,
    dedupe_tol: f64,
    depth_cap: usize,
) -> Result<ReachableCloud> {
    let spec = spec.validate()?;
    check_tol(dedupe_tol)?;
    if depth > depth_cap {
        return Err(Error::DepthCapExceeded { depth, cap: depth_cap });
    }
    let ifs = ifs_maps(spec.rho, spec.omega)?;
    let mut set = vec![Complex64::new(0.0, 0.0)];
    for _ in 0..depth {
        set = hutchinson_step(&ifs, &set, dedupe_tol, usize::MAX)?;
    }
    Ok(ReachableCloud {
        points: set.into_iter().map(|z| spec.place(z)).collect(),
        depth,
        spec,
        dedupe_tol,
    })
}

impl ReachableCloud {
    pub fn hull(&self) -> Vec<Vec2> {
        convex_hull(&self.points)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", p.x, p.y));
        }
        out
    }
}

/// Vertices `v1..v4` of the convex hull of the attractor for `omega = 2 pi / 3`.
pub fn hull_vertices_2pi3(rho: f64) -> Result<[Vec2; 4]> {
    if !(rho > 1.0) {
        return Err(Error::RatioOutOfRange(rho));
    }
    let e = |angle: f64, r: f64| Complex64::from_polar(r, -angle);
    let third = 2.0 * PI / 3.0;
    let tail = 1.0 / (rho - 1.0);
    let v1 = Complex64::new(tail, 0.0);
    let v2 = e(third, tail);
    let v3 = e(third, 1.0 / rho) + e(2.0 * third, tail / rho);
    let v4 = e(2.0 * third, tail / rho);
    Ok([v1, v2, v3, v4].map(from_complex))
}
