//! Planar geometry helpers: segments, convex hulls, and distances between sets.

use rustc_hash::FxHashMap;

use crate::model::Vec2;

pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Orientation of `c` relative to the directed line `a -> b` (positive: left turn).
pub fn orient(a: &Vec2, b: &Vec2, c: &Vec2) -> f64 {
    cross(&(b - a), &(c - a))
}

/// Distance from `p` to the closed segment `[a, b]`; a zero-length segment is a point.
pub fn point_segment_distance(p: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + t * ab)).norm()
}

/// Distance between two closed segments.
pub fn segment_distance(a: &Vec2, b: &Vec2, c: &Vec2, d: &Vec2) -> f64 {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Convex hull in counter-clockwise order, collinear points dropped.
///
/// A single point yields one vertex; collinear input yields its two extreme
/// points.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2 && orient(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    if hull.len() == 2 && hull[0] == hull[1] {
        hull.truncate(1);
    }
    hull
}

pub fn polygon_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| cross(&poly[i], &poly[(i + 1) % n])).sum::<f64>() / 2.0
}

/// Distance from `p` to a convex polygon given in counter-clockwise order
/// (zero when `p` is inside).
pub fn distance_to_convex_polygon(p: &Vec2, poly: &[Vec2]) -> f64 {
    match poly.len() {
        0 => f64::INFINITY,
        1 => (p - poly[0]).norm(),
        2 => point_segment_distance(p, &poly[0], &poly[1]),
        n => {
            let inside = (0..n).all(|i| orient(&poly[i], &poly[(i + 1) % n], p) >= 0.0);
            if inside {
                0.0
            } else {
                (0..n)
                    .map(|i| point_segment_distance(p, &poly[i], &poly[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// Hausdorff distance between two convex polygons viewed as filled regions.
///
/// The distance to a convex set is a convex function, so its maximum over a
/// polygon is attained at a vertex.
pub fn convex_hausdorff(p: &[Vec2], q: &[Vec2]) -> f64 {
    let one_way = |a: &[Vec2], b: &[Vec2]| {
        a.iter()
            .map(|v| distance_to_convex_polygon(v, b))
            .fold(0.0, f64::max)
    };
    one_way(p, q).max(one_way(q, p))
}

/// Uniform-grid nearest-neighbour index over a fixed point set.
struct GridIndex<'a> {
    points: &'a [Vec2],
    cell: f64,
    lo: Vec2,
    hi: Vec2,
    cells: FxHashMap<(i64, i64), Vec<usize>>,
}

impl<'a> GridIndex<'a> {
    fn new(points: &'a [Vec2]) -> Self {
        let (mut lo, mut hi) = (Vec2::repeat(f64::INFINITY), Vec2::repeat(f64::NEG_INFINITY));
        for p in points {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let extent = (hi - lo).max().max(f64::MIN_POSITIVE);
        let per_side = (points.len() as f64).sqrt().max(1.0);
        let cell = (extent / per_side).max(1e-12);
        let mut cells: FxHashMap<(i64, i64), Vec<usize>> = FxHashMap::default();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key(cell, p)).or_default().push(i);
        }
        GridIndex { points, cell, lo, hi, cells }
    }

    fn key(cell: f64, p: &Vec2) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    fn nearest_distance(&self, p: &Vec2) -> f64 {
        let outside = (p - p.sup(&self.lo).inf(&self.hi)).norm();
        if outside > 4.0 * self.cell {
            return self.points.iter().map(|q| (q - p).norm()).fold(f64::INFINITY, f64::min);
        }
        let (cx, cy) = Self::key(self.cell, p);
        let mut best = f64::INFINITY;
        let mut ring = 0i64;
        loop {
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    if dx.abs() != ring && dy.abs() != ring {
                        continue;
                    }
                    if let Some(ids) = self.cells.get(&(cx + dx, cy + dy)) {
                        for &i in ids {
                            best = best.min((self.points[i] - p).norm());
                        }
                    }
                }
            }
            // every point outside the scanned square is at least `ring * cell` away
            if best <= ring as f64 * self.cell {
                return best;
            }
            ring += 1;
        }
    }
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[Vec2], b: &[Vec2]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    let directed = |from: &[Vec2], to: &[Vec2]| {
        let index = GridIndex::new(to);
        from.iter().map(|p| index.nearest_distance(p)).fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}
