//! The hand: fingers on parallel planes, their joint reachable set, and
//! grasps of cylinders whose axis is normal to those planes.
//!
//! Fingers 1 and 2 (thumb and index) share the plane `z = 0`; finger `h >= 3`
//! lies on `z = delta (h - 2)`.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::point_segment_distance;
use crate::grasp::{grasp_transformed_with, primary_circle, GraspOptions, GraspReport, PrimaryGrasp};
use crate::ifs::{ifs_maps, Direction, Ifs};
use crate::kinematics::evaluate_junctions;
use crate::model::{to_complex, Circle, Configuration, ControlSequence, Digit, FingerSpec, Vec2, ALGEBRAIC_TOL, GEOMETRIC_TOL};
use crate::reach::{enumerate_reachable, ReachableCloud};

pub type Vec3 = Vector3<f64>;

/// Deepest prefix searched when locating a cylinder section.
pub const DEFAULT_MAX_PREFIX: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HandDoc", into = "HandDoc")]
pub struct HandSpec {
    pub delta: f64,
    pub fingers: Vec<FingerSpec>,
}

#[derive(Serialize, Deserialize)]
struct HandDoc {
    delta: f64,
    fingers: Vec<FingerSpec>,
}

impl TryFrom<HandDoc> for HandSpec {
    type Error = Error;

    fn try_from(doc: HandDoc) -> Result<Self> {
        HandSpec::new(doc.delta, doc.fingers)
    }
}

impl From<HandSpec> for HandDoc {
    fn from(hand: HandSpec) -> Self {
        HandDoc {
            delta: hand.delta,
            fingers: hand.fingers,
        }
    }
}

/// Plane height of finger `h` (1-based).
pub fn plane_offset_for(h: usize, delta: f64) -> f64 {
    if h <= 2 {
        0.0
    } else {
        delta * (h - 2) as f64
    }
}

impl HandSpec {
    /// Validates the fingers and assigns their plane offsets. A finger that
    /// already carries a non-zero offset must agree with its slot.
    pub fn new(delta: f64, mut fingers: Vec<FingerSpec>) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidHand(format!("plane spacing must be positive, got {delta}")));
        }
        if fingers.is_empty() {
            return Err(Error::InvalidHand("a hand needs at least one finger".into()));
        }
        for (i, f) in fingers.iter_mut().enumerate() {
            let expected = plane_offset_for(i + 1, delta);
            if f.plane_offset != 0.0 && (f.plane_offset - expected).abs() > ALGEBRAIC_TOL {
                return Err(Error::InvalidHand(format!(
                    "finger {} has plane offset {} but its plane is z = {expected}",
                    i + 1,
                    f.plane_offset
                )));
            }
            *f = f.validate()?.with_plane_offset(expected);
        }
        Ok(HandSpec { delta, fingers })
    }

    /// `n` identical fingers in the canonical frame.
    pub fn uniform(n: usize, delta: f64, rho: f64, omega: f64) -> Result<Self> {
        HandSpec::new(delta, vec![FingerSpec::canonical(rho, omega); n])
    }

    /// Non-fatal observations about the hand's layout.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.fingers.len() >= 2 && (self.fingers[0].origin - self.fingers[1].origin).norm() > GEOMETRIC_TOL {
            out.push("thumb and index finger do not share their first junction".to_string());
        }
        out
    }

    pub fn thumb_index_coplanar(&self) -> bool {
        true
    }
}

/// A plane in space with an orthonormal in-plane frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneEmbedding {
    pub origin: Vec3,
    pub axis_x: Vec3,
    pub axis_y: Vec3,
}

impl PlaneEmbedding {
    pub fn new(origin: Vec3, axis_x: Vec3, axis_y: Vec3) -> Result<Self> {
        let ok = (axis_x.norm() - 1.0).abs() <= ALGEBRAIC_TOL
            && (axis_y.norm() - 1.0).abs() <= ALGEBRAIC_TOL
            && axis_x.dot(&axis_y).abs() <= ALGEBRAIC_TOL;
        if !ok {
            return Err(Error::InvalidGeometry("plane axes must be orthonormal".into()));
        }
        Ok(PlaneEmbedding { origin, axis_x, axis_y })
    }

    /// The plane `z = height` with the standard axes.
    pub fn horizontal(height: f64) -> Self {
        PlaneEmbedding {
            origin: Vec3::new(0.0, 0.0, height),
            axis_x: Vec3::x(),
            axis_y: Vec3::y(),
        }
    }

    pub fn embed(&self, p: &Vec2) -> Vec3 {
        self.origin + p.x * self.axis_x + p.y * self.axis_y
    }

    pub fn normal(&self) -> Vec3 {
        self.axis_x.cross(&self.axis_y)
    }
}

/// Junctions of a finger lifted onto its plane `z = plane_offset`.
pub fn embed_finger(config: &Configuration, spec: &FingerSpec) -> Vec<Vec3> {
    embed_with(config, &PlaneEmbedding::horizontal(spec.plane_offset))
}

pub fn embed_with(config: &Configuration, plane: &PlaneEmbedding) -> Vec<Vec3> {
    config.junctions.iter().map(|p| plane.embed(p)).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HandCloud {
    pub fingers: Vec<ReachableCloud>,
    /// Union of the lifted finger clouds, deduplicated.
    pub union: Vec<Vec3>,
}

/// Reachable points of every finger at `depth` and their union in space.
pub fn hand_reachable(hand: &HandSpec, depth: usize, dedupe_tol: f64) -> Result<HandCloud> {
    let fingers: Vec<ReachableCloud> = hand
        .fingers
        .par_iter()
        .map(|spec| enumerate_reachable(spec, depth, dedupe_tol))
        .collect::<Result<_>>()?;
    let mut seen = FxHashSet::default();
    let mut union = Vec::new();
    for cloud in &fingers {
        let plane = PlaneEmbedding::horizontal(cloud.spec.plane_offset);
        for p in &cloud.points {
            let q = plane.embed(p);
            let key = [q.x, q.y, q.z].map(|c| (c / dedupe_tol).round() as i64);
            if seen.insert(key) {
                union.push(q);
            }
        }
    }
    Ok(HandCloud { fingers, union })
}

/// A right circular cylinder; `section` is its cut by the plane `z = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderObject {
    pub section: Circle,
    pub axis_direction: Vec3,
}

impl CylinderObject {
    pub fn new(section: Circle, axis_direction: Vec3) -> Result<Self> {
        if (axis_direction.norm() - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::InvalidGeometry(format!(
                "cylinder axis must be a unit vector, got norm {}",
                axis_direction.norm()
            )));
        }
        Ok(CylinderObject { section, axis_direction })
    }

    /// Cylinder with axis along `z`.
    pub fn upright(section: Circle) -> Self {
        CylinderObject {
            section,
            axis_direction: Vec3::z(),
        }
    }

    fn is_upright(&self) -> bool {
        self.axis_direction.z.abs() >= 1.0 - ALGEBRAIC_TOL
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneOptions {
    /// When set, finger 1 is a thumb driven by these controls and only checked for contact.
    pub thumb_controls: Option<ControlSequence>,
    pub extra_phalanxes: usize,
    pub max_prefix: usize,
    pub tol: f64,
}

impl Default for SceneOptions {
    fn default() -> Self {
        SceneOptions {
            thumb_controls: None,
            extra_phalanxes: 1,
            max_prefix: DEFAULT_MAX_PREFIX,
            tol: GEOMETRIC_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThumbContact {
    pub controls: ControlSequence,
    /// Extended phalanxes tangent to the section.
    pub touching: Vec<usize>,
    /// Smallest distance from the section's centre to a phalanx, minus the radius.
    pub clearance: f64,
    pub contact_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneFinger {
    /// 1-based finger number.
    pub finger: usize,
    pub plane_offset: f64,
    pub report: GraspReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneReport {
    pub cylinder: CylinderObject,
    pub fingers: Vec<SceneFinger>,
    pub thumb: Option<ThumbContact>,
    pub warnings: Vec<String>,
    pub success: bool,
}

fn grasping_fingers(hand: &HandSpec, opts: &SceneOptions) -> Result<Vec<usize>> {
    let skip = usize::from(opts.thumb_controls.is_some());
    let idx: Vec<usize> = (skip..hand.fingers.len()).collect();
    let Some(&first) = idx.first() else {
        return Err(Error::InvalidHand("no finger left to grasp with besides the thumb".into()));
    };
    let reference = &hand.fingers[first];
    for &i in &idx[1..] {
        let f = &hand.fingers[i];
        if f.rho != reference.rho || f.omega != reference.omega {
            return Err(Error::MixedSpecs(format!(
                "finger {} has (rho, omega) = ({}, {}) but finger {} has ({}, {})",
                i + 1,
                f.rho,
                f.omega,
                first + 1,
                reference.rho,
                reference.omega
            )));
        }
    }
    Ok(idx)
}

/// Finds digits mapping the primary circle onto `target` (canonical frame).
fn locate_prefix(
    ifs: &Ifs,
    primary: &PrimaryGrasp,
    target: &Circle,
    hint: Option<&[Digit]>,
    opts: &SceneOptions,
) -> Result<Vec<Digit>> {
    let matches = |digits: &[Digit]| {
        let c = ifs.transform_circle(&primary.circle, digits, Direction::Forward);
        (c.center - target.center).norm() <= opts.tol && (c.radius - target.radius).abs() <= opts.tol
    };
    if let Some(h) = hint {
        if matches(h) {
            return Ok(h.to_vec());
        }
    }
    let levels = (primary.circle.radius / target.radius).ln() / ifs.rho.ln();
    let p = levels.round();
    if p < 0.0 || (levels - p).abs() > 1e-9 {
        return Err(Error::NotGraspable(format!(
            "section radius {} is not a power-of-rho rescaling of the grasped circle",
            target.radius
        )));
    }
    let p = p as usize;
    if p > opts.max_prefix {
        return Err(Error::NotGraspable(format!(
            "section needs a prefix of length {p}, above the search limit {}",
            opts.max_prefix
        )));
    }
    crate::grasp::all_prefixes(p)
        .into_iter()
        .filter(|w| w.len() == p)
        .find(|w| matches(w))
        .ok_or_else(|| Error::NotGraspable("no control prefix moves the grasped circle onto the section".into()))
}

fn thumb_contact(spec: &FingerSpec, controls: &ControlSequence, section: &Circle, tol: f64) -> Result<ThumbContact> {
    let config = evaluate_junctions(spec, controls)?;
    let mut touching = Vec::new();
    let mut clearance = f64::INFINITY;
    for k in config.extended_phalanxes() {
        let (a, b) = config.phalanx(k);
        let gap = point_segment_distance(&section.center, &a, &b) - section.radius;
        if gap.abs() <= tol {
            touching.push(k);
        }
        clearance = clearance.min(gap);
    }
    Ok(ThumbContact {
        controls: controls.clone(),
        contact_ok: !touching.is_empty() && clearance >= -tol,
        touching,
        clearance,
    })
}

fn scene(
    hand: &HandSpec,
    cylinder: &CylinderObject,
    hint: Option<&[Digit]>,
    opts: &SceneOptions,
) -> Result<SceneReport> {
    if !cylinder.is_upright() {
        return Err(Error::InvalidGeometry("cylinder axis must be normal to the finger planes".into()));
    }
    let idx = grasping_fingers(hand, opts)?;
    let reference = hand.fingers[idx[0]];
    let primary = primary_circle(reference.rho, reference.omega)?;
    let ifs = ifs_maps(reference.rho, reference.omega)?;
    let grasp_opts = GraspOptions {
        extra_phalanxes: opts.extra_phalanxes,
        tol: opts.tol,
    };

    let fingers: Vec<SceneFinger> = idx
        .par_iter()
        .map(|&i| {
            let spec = &hand.fingers[i];
            let local = spec.unplace(&cylinder.section.center);
            if local.norm() > spec.reach_bound() + opts.tol {
                return Err(Error::NotGraspable(format!(
                    "section centre lies outside the reach of finger {}",
                    i + 1
                )));
            }
            let target = Circle {
                center: Vec2::new(local.re, local.im),
                radius: cylinder.section.radius,
            };
            let prefix = locate_prefix(&ifs, &primary, &target, hint, opts)?;
            let report = grasp_transformed_with(
                &primary,
                spec.rho,
                spec.omega,
                &ControlSequence::from_digits(&prefix),
                &grasp_opts,
            )?;
            Ok(SceneFinger {
                finger: i + 1,
                plane_offset: spec.plane_offset,
                report: report.placed(spec),
            })
        })
        .collect::<Result<_>>()?;

    let thumb = match &opts.thumb_controls {
        Some(c) => Some(thumb_contact(&hand.fingers[0], c, &cylinder.section, opts.tol)?),
        None => None,
    };
    let success = fingers.iter().all(|f| f.report.all_ok()) && thumb.as_ref().is_none_or(|t| t.contact_ok);
    Ok(SceneReport {
        cylinder: *cylinder,
        fingers,
        thumb,
        warnings: hand.warnings(),
        success,
    })
}

/// Grasps an upright cylinder with every finger (thumb excepted when it has
/// its own controls). Each finger's prefix is found by search.
pub fn grasp_cylinder(hand: &HandSpec, cylinder: &CylinderObject, opts: &SceneOptions) -> Result<SceneReport> {
    scene(hand, cylinder, None, opts)
}

/// Scene whose section is the primary circle of the first grasping finger
/// mapped forward through `section_prefix`.
pub fn grasp_cylinder_scene(hand: &HandSpec, section_prefix: &[Digit], opts: &SceneOptions) -> Result<SceneReport> {
    let idx = grasping_fingers(hand, opts)?;
    let reference = hand.fingers[idx[0]];
    let primary = primary_circle(reference.rho, reference.omega)?;
    let ifs = ifs_maps(reference.rho, reference.omega)?;
    let local = ifs.transform_circle(&primary.circle, section_prefix, Direction::Forward);
    let section = Circle {
        center: reference.place(to_complex(&local.center)),
        radius: local.radius,
    };
    scene(hand, &CylinderObject::upright(section), Some(section_prefix), opts)
}

/// One finger of the tilted-cylinder demonstration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoFinger {
    pub finger: usize,
    pub plane_offset: f64,
    pub controls: ControlSequence,
    pub junctions: Vec<Vec3>,
    /// Centre and semi-axes `(x, y)` of the elliptic cut in this finger's plane.
    pub ellipse_center: Vec2,
    pub semi_axes: Vec2,
    /// Smallest sampled distance between the finger and the ellipse.
    pub min_distance: f64,
    pub penetrates: bool,
}

/// Tilt of the demonstration cylinder about the `y` direction.
pub const DEMO_TILT: f64 = 2.0 * PI / 3.0;

/// Thumb, index and last-finger controls for the tilted-cylinder scene.
pub fn demo_controls() -> [ControlSequence; 3] {
    let c = |v: [u8; 4]| ControlSequence::from_bits(&[1, 1, 1, 1], &v).expect("fixed lengths");
    [c([1, 1, 0, 0]), c([0, 0, 1, 0]), c([0, 1, 1, 0])]
}

/// Cylinder through the index finger's primary circle, tilted by [`DEMO_TILT`]
/// about the line parallel to `y` through the circle's centre, probed by the
/// thumb, index and last finger with [`demo_controls`].
pub fn tilted_cylinder_demo(hand: &HandSpec) -> Result<Vec<DemoFinger>> {
    if hand.fingers.len() < 3 {
        return Err(Error::InvalidHand("the demonstration needs a thumb, an index and a last finger".into()));
    }
    let index = hand.fingers[1];
    let primary = primary_circle(index.rho, index.omega)?;
    let center = index.place(to_complex(&primary.circle.center));
    let r = primary.circle.radius;
    let (sin_t, cos_t) = DEMO_TILT.sin_cos();
    let last = hand.fingers.len() - 1;
    let [thumb_c, index_c, last_c] = demo_controls();

    [(0, thumb_c), (1, index_c), (last, last_c)]
        .into_iter()
        .map(|(i, controls)| {
            let spec = hand.fingers[i];
            let z = spec.plane_offset;
            let ellipse_center = Vec2::new(center.x + z * sin_t / cos_t, center.y);
            let semi_axes = Vec2::new(r / cos_t.abs(), r);
            let config = evaluate_junctions(&spec, &controls)?;
            // Squash x so the ellipse becomes a circle of radius r.
            let squash = |p: &Vec2| Vec2::new((p.x - ellipse_center.x) * cos_t.abs(), p.y - ellipse_center.y);
            let mut penetrates = false;
            let mut min_distance = f64::INFINITY;
            let boundary: Vec<Vec2> = (0..720)
                .map(|k| {
                    let a = k as f64 * PI / 360.0;
                    ellipse_center + Vec2::new(semi_axes.x * a.cos(), semi_axes.y * a.sin())
                })
                .collect();
            for k in config.extended_phalanxes() {
                let (a, b) = config.phalanx(k);
                if point_segment_distance(&Vec2::zeros(), &squash(&a), &squash(&b)) < r - GEOMETRIC_TOL {
                    penetrates = true;
                }
                for q in &boundary {
                    min_distance = min_distance.min(point_segment_distance(q, &a, &b));
                }
            }
            Ok(DemoFinger {
                finger: i + 1,
                plane_offset: z,
                junctions: embed_finger(&config, &spec),
                controls,
                ellipse_center,
                semi_axes,
                min_distance,
                penetrates,
            })
        })
        .collect()
}
