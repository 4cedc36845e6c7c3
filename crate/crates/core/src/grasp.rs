//! Frictionless three-contact grasps of circles.
//!
//! The primary grasp extends phalanxes `1`, `J_omega` and a straight tail
//! starting at `J_omega + 1`, with every rotation up to `J_omega + 1` set. The
//! grasped circle is tangent to the lines of those three phalanxes and lies on
//! the right of the direction of travel (the finger curls clockwise).
//! Contact normals point from the phalanx into the circle.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cross, point_segment_distance};
use crate::ifs::{ifs_maps, Direction};
use crate::kinematics::evaluate_junctions;
use crate::model::{
    check_omega, check_rho_omega, from_complex, to_complex, Circle, Configuration, ControlSequence, Digit,
    FingerSpec, Vec2, ALGEBRAIC_TOL, GEOMETRIC_TOL,
};

/// Upper limit on the tail length searched when building the primary grasp.
const MAX_TAIL: usize = 4096;
/// Deepest prefix accepted by [`grasp_family`].
pub const FAMILY_DEPTH_CAP: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactSet {
    /// `C_1`, `C_{J_omega}`, `C_{J_omega + 1}`.
    pub points: [Vec2; 3],
    /// Unit normals pointing into the grasped object.
    pub normals: [Vec2; 3],
    /// 1-based phalanx carrying each contact.
    pub phalanx_indices: [usize; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraspReport {
    pub circle: Circle,
    pub contacts: ContactSet,
    pub alphas: [f64; 3],
    pub t: f64,
    pub force_residual: f64,
    pub moment_residual: f64,
    pub contact_ok: bool,
    pub reachable_ok: bool,
    pub stable_ok: bool,
    /// Full control sequence (prefix, grasp, extra phalanxes) with intensities.
    pub controls: ControlSequence,
    pub prefix: Vec<Digit>,
}

impl GraspReport {
    pub fn all_ok(&self) -> bool {
        self.contact_ok && self.reachable_ok && self.stable_ok
    }

    /// Moves the geometry from the canonical frame into `spec`'s plane coordinates.
    pub fn placed(mut self, spec: &FingerSpec) -> GraspReport {
        let turn = to_complex(&spec.base_direction);
        self.circle.center = spec.place(to_complex(&self.circle.center));
        self.contacts.points = self.contacts.points.map(|c| spec.place(to_complex(&c)));
        self.contacts.normals = self.contacts.normals.map(|n| from_complex(turn * to_complex(&n)));
        self
    }
}

/// Smallest `J` with `omega (J - 1) < pi <= omega J`.
pub fn rotation_count_j(omega: f64) -> usize {
    debug_assert!(omega > 0.0 && omega < PI);
    ((PI / omega) - ALGEBRAIC_TOL).ceil().max(1.0) as usize
}

fn is_rhombus(omega: f64, j_omega: usize) -> bool {
    (omega * j_omega as f64 - PI).abs() < ALGEBRAIC_TOL
}

/// `2 + tan(omega (J_omega - 1) / 2) cot(omega / 2)`.
pub fn grasp_threshold(omega: f64) -> Result<f64> {
    check_omega(omega)?;
    let j = rotation_count_j(omega) as f64;
    Ok(2.0 + (omega * (j - 1.0) / 2.0).tan() / (omega / 2.0).tan())
}

/// Strict `rho < threshold`; values within `1e-12` of the threshold count as on it.
pub fn primary_circle_exists(rho: f64, omega: f64) -> Result<bool> {
    check_rho_omega(rho, omega)?;
    Ok(rho < grasp_threshold(omega)? - ALGEBRAIC_TOL)
}

/// Controls of the primary grasping configuration of length `len`.
pub fn primary_grasping_controls(omega: f64, len: usize) -> Result<ControlSequence> {
    check_omega(omega)?;
    let jw = rotation_count_j(omega);
    if len < jw + 1 {
        return Err(Error::BadLength { len, min: jw + 1 });
    }
    let u = (1..=len).map(|j| j == 1 || j >= jw).collect();
    let v = (1..=len).map(|j| j <= jw + 1).collect();
    ControlSequence::new(u, v)
}

/// Inward unit normals of phalanxes `1`, `J_omega`, `J_omega + 1` in the canonical frame.
pub fn contact_normals(omega: f64) -> Result<[Vec2; 3]> {
    check_omega(omega)?;
    let jw = rotation_count_j(omega) as f64;
    Ok([1.0, jw, jw + 1.0].map(|turns| inward_normal(turns * omega)))
}

/// Right-hand normal of the direction `exp(-i theta)`.
fn inward_normal(theta: f64) -> Vec2 {
    let (s, c) = theta.sin_cos();
    Vec2::new(-s, -c)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumForces {
    pub alphas: [f64; 3],
    pub t: f64,
}

/// Largest-scale intensities in `[0, 1]` balancing the three contact forces.
pub fn equilibrium_forces(omega: f64) -> Result<EquilibriumForces> {
    check_omega(omega)?;
    let jw = rotation_count_j(omega);
    let j = jw as f64;
    let sw = omega.sin();
    let s_j = (j * omega).sin();
    let s_jm1 = ((j - 1.0) * omega).sin();
    if is_rhombus(omega, jw) {
        // sin((J - 1) omega) = sin(pi - omega) = sin(omega)
        return Ok(EquilibriumForces {
            alphas: [1.0, 0.0, 1.0],
            t: 1.0,
        });
    }
    let mut t = 1.0f64;
    for bound in [-sw / s_j, sw / s_jm1] {
        if bound.is_finite() && bound > 0.0 {
            t = t.min(bound);
        }
    }
    let clamp = |a: f64| a.clamp(0.0, 1.0);
    Ok(EquilibriumForces {
        alphas: [t, clamp(-t * s_j / sw), clamp(t * s_jm1 / sw)],
        t,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCheck {
    pub force_residual: f64,
    pub moment_residual: f64,
    pub balanced: bool,
}

/// Net force norm and net moment about the circle centre of `alpha_i n_i`
/// applied at the contacts.
pub fn check_equilibrium(circle: &Circle, contacts: &ContactSet, alphas: &[f64; 3], tol: f64) -> EquilibriumCheck {
    let mut force = Vec2::zeros();
    let mut moment = 0.0;
    for ((a, n), p) in alphas.iter().zip(&contacts.normals).zip(&contacts.points) {
        let f = *a * n;
        force += f;
        moment += cross(&(p - circle.center), &f);
    }
    let force_residual = force.norm();
    let balanced = force_residual < tol
        && moment.abs() < tol
        && alphas.iter().all(|a| (0.0..=1.0).contains(a));
    EquilibriumCheck {
        force_residual,
        moment_residual: moment,
        balanced,
    }
}

/// Circle tangent to the three contact lines, before deciding whether the
/// contacts land on the finger.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimaryGeometry {
    pub circle: Circle,
    pub contacts: ContactSet,
    pub j_omega: usize,
    /// Junction `x_{J_omega}` where the straight tail starts.
    pub tail_start: Vec2,
    pub tail_direction: Vec2,
    /// Supremum of the tail length, `rho^-J_omega / (rho - 1)`.
    pub tail_bound: f64,
    /// Distance from `x_{J_omega}` to the third contact along the tail.
    pub tail_offset: f64,
    /// Whether all three contacts lie on phalanxes of some finite primary configuration.
    pub on_phalanxes: bool,
}

/// Solves the three tangency conditions `m_i . C - r = m_i . p_i` without
/// checking the existence predicate.
///
/// The solve runs in coordinates centred on `x_1`, where every quantity is
/// of the order of the second contact phalanx; for small `omega` that
/// phalanx is many orders of magnitude shorter than the finger.
pub fn construct_primary_geometry(rho: f64, omega: f64) -> Result<PrimaryGeometry> {
    check_rho_omega(rho, omega)?;
    let jw = rotation_count_j(omega);
    let normals = contact_normals(omega)?;
    let dir = |turns: usize| {
        let t = turns as f64 * omega;
        Vec2::new(t.cos(), -t.sin())
    };
    let (d1, dj, dt) = (dir(1), dir(jw), dir(jw + 1));
    let edge = rho.powi(-(jw as i32));
    let x1 = d1 / rho;
    let tail_local = edge * dj;
    let anchors = [Vec2::zeros(), Vec2::zeros(), tail_local];

    let rows: Vec<f64> = normals.iter().flat_map(|m| [m.x, m.y, -1.0]).collect();
    let a = Matrix3::from_row_slice(&rows);
    let rhs = Vector3::from_fn(|i, _| normals[i].dot(&anchors[i]));
    let sol = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidGeometry("contact lines do not bound a circle".into()))?;
    let local = Vec2::new(sol[0], sol[1]);
    let radius = sol[2];
    if !(radius > 0.0) {
        return Err(Error::InvalidGeometry(format!("tangent circle has radius {radius}")));
    }
    let local_points = normals.map(|m| local - radius * m);

    let tol = GEOMETRIC_TOL * edge;
    let back_on_first = -local_points[0].dot(&d1);
    let along_second = local_points[1].dot(&dj);
    let tail_offset = (local_points[2] - tail_local).dot(&dt);
    let tail_bound = edge / (rho - 1.0);
    let on_first = back_on_first >= -tol && back_on_first <= 1.0 / rho + tol;
    let on_second = along_second >= -tol && along_second <= edge + tol;
    let on_tail = tail_offset >= -tol && tail_offset < tail_bound;

    Ok(PrimaryGeometry {
        circle: Circle {
            center: x1 + local,
            radius,
        },
        contacts: ContactSet {
            points: local_points.map(|c| x1 + c),
            normals,
            phalanx_indices: [1, jw, jw + 1],
        },
        j_omega: jw,
        tail_start: x1 + tail_local,
        tail_direction: dt,
        tail_bound,
        tail_offset,
        on_phalanxes: on_first && on_second && on_tail,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimaryGrasp {
    pub circle: Circle,
    pub contacts: ContactSet,
    pub forces: EquilibriumForces,
    /// Minimal grasping controls, intensities attached.
    pub controls: ControlSequence,
    pub j_omega: usize,
}

impl PrimaryGrasp {
    pub fn len(&self) -> usize {
        self.controls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.controls.is_empty()
    }
}

/// The primary grasped circle, its contacts and the minimal grasping controls.
pub fn primary_circle(rho: f64, omega: f64) -> Result<PrimaryGrasp> {
    if !primary_circle_exists(rho, omega)? {
        return Err(Error::NotGraspable(format!(
            "no primary grasped circle for rho={rho}, omega={omega} (threshold {})",
            grasp_threshold(omega)?
        )));
    }
    let geo = construct_primary_geometry(rho, omega)?;
    let jw = geo.j_omega;

    // The third contact sits on the first tail phalanx whose far end reaches it.
    let mut reach = 0.0;
    let mut len = jw;
    let tol = GEOMETRIC_TOL * rho.powi(-(jw as i32));
    while reach < geo.tail_offset - tol {
        len += 1;
        if len > jw + MAX_TAIL {
            return Err(Error::NotGraspable(format!(
                "third contact lies beyond {MAX_TAIL} tail phalanxes"
            )));
        }
        reach += rho.powi(-(len as i32));
    }
    let len = len.max(jw + 1);

    let forces = equilibrium_forces(omega)?;
    let mut alpha = vec![0.0; len];
    alpha[0] = forces.alphas[0];
    alpha[jw - 1] = forces.alphas[1];
    alpha[len - 1] = forces.alphas[2];
    let controls = primary_grasping_controls(omega, len)?.with_alpha(alpha)?;

    let mut contacts = geo.contacts;
    contacts.phalanx_indices[2] = len;
    Ok(PrimaryGrasp {
        circle: geo.circle,
        contacts,
        forces,
        controls,
        j_omega: jw,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraspOptions {
    /// Straight phalanxes appended after the minimal grasp.
    pub extra_phalanxes: usize,
    pub tol: f64,
}

impl Default for GraspOptions {
    fn default() -> Self {
        GraspOptions {
            extra_phalanxes: 0,
            tol: GEOMETRIC_TOL,
        }
    }
}

/// Checks that each contact phalanx is extended and tangent to the circle at
/// its contact point, and that no extended phalanx enters the disc.
pub fn verify_contacts(config: &Configuration, circle: &Circle, contacts: &ContactSet, tol: f64) -> bool {
    let u = config.controls.u();
    let tangent = contacts.phalanx_indices.iter().zip(&contacts.points).all(|(&k, c)| {
        if k == 0 || k > u.len() || !u[k - 1] {
            return false;
        }
        let (a, b) = config.phalanx(k);
        (point_segment_distance(&circle.center, &a, &b) - circle.radius).abs() <= tol
            && point_segment_distance(c, &a, &b) <= tol
            && ((c - circle.center).norm() - circle.radius).abs() <= tol
    });
    let clear = config.extended_phalanxes().all(|k| {
        let (a, b) = config.phalanx(k);
        point_segment_distance(&circle.center, &a, &b) >= circle.radius - tol
    });
    tangent && clear
}

/// Grasp of the primary circle mapped forward through the prefix's digits,
/// using the prefix followed by the primary grasping controls.
pub fn grasp_transformed_circle(
    rho: f64,
    omega: f64,
    prefix: &ControlSequence,
    opts: &GraspOptions,
) -> Result<GraspReport> {
    grasp_transformed_with(&primary_circle(rho, omega)?, rho, omega, prefix, opts)
}

pub(crate) fn grasp_transformed_with(
    primary: &PrimaryGrasp,
    rho: f64,
    omega: f64,
    prefix: &ControlSequence,
    opts: &GraspOptions,
) -> Result<GraspReport> {
    let ifs = ifs_maps(rho, omega)?;
    let digits = prefix.digits();
    let p = digits.len();

    let tail = ControlSequence::new(vec![true; opts.extra_phalanxes], vec![false; opts.extra_phalanxes])?
        .with_alpha(vec![0.0; opts.extra_phalanxes])?;
    let head = prefix.clone().with_alpha(vec![0.0; p])?;
    let controls = head.concat(&primary.controls).concat(&tail);

    let circle = ifs.transform_circle(&primary.circle, &digits, Direction::Forward);
    let linear = ifs.compose_linear(&digits);
    let turn = linear / linear.norm();
    let contacts = ContactSet {
        points: primary
            .contacts
            .points
            .map(|c| from_complex(ifs.compose(&digits, to_complex(&c)))),
        normals: primary.contacts.normals.map(|n| from_complex(turn * to_complex(&n))),
        phalanx_indices: primary.contacts.phalanx_indices.map(|k| k + p),
    };

    let config = evaluate_junctions(&FingerSpec::canonical(rho, omega), &controls);
    let (reachable_ok, contact_ok) = match &config {
        Ok(cfg) => (true, verify_contacts(cfg, &circle, &contacts, opts.tol)),
        Err(_) => (false, false),
    };
    let alphas = primary.forces.alphas;
    let eq = check_equilibrium(&circle, &contacts, &alphas, opts.tol);

    Ok(GraspReport {
        circle,
        contacts,
        alphas,
        t: primary.forces.t,
        force_residual: eq.force_residual,
        moment_residual: eq.moment_residual,
        contact_ok,
        reachable_ok,
        stable_ok: eq.balanced,
        controls,
        prefix: digits,
    })
}

/// Every prefix of length at most `depth`, in order of length then lexicographic.
pub fn all_prefixes(depth: usize) -> Vec<Vec<Digit>> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..depth {
        level = level
            .iter()
            .flat_map(|w: &Vec<Digit>| {
                Digit::ALL.iter().map(move |&d| {
                    let mut next = w.clone();
                    next.push(d);
                    next
                })
            })
            .collect();
        out.extend(level.iter().cloned());
    }
    out
}

/// Reports for all prefixes up to `depth` whose transformed circle is grasped.
pub fn grasp_family(rho: f64, omega: f64, depth: usize, opts: &GraspOptions) -> Result<Vec<GraspReport>> {
    if depth > FAMILY_DEPTH_CAP {
        return Err(Error::DepthCapExceeded {
            depth,
            cap: FAMILY_DEPTH_CAP,
        });
    }
    let primary = primary_circle(rho, omega)?;
    let reports: Result<Vec<GraspReport>> = all_prefixes(depth)
        .into_par_iter()
        .map(|digits| {
            grasp_transformed_with(&primary, rho, omega, &ControlSequence::from_digits(&digits), opts)
        })
        .collect();
    Ok(reports?.into_iter().filter(GraspReport::all_ok).collect())
}

/// Tangent lengths `(|x_1 - C_1|, |x_{J_omega} - C_{J_omega}|)` from the closed form.
pub fn tangent_lengths(rho: f64, omega: f64) -> Result<(f64, f64)> {
    check_rho_omega(rho, omega)?;
    let jw = rotation_count_j(omega);
    let l = rho.powi(-(jw as i32));
    let tb = (omega / 2.0).tan();
    let ta = (omega * (jw as f64 - 1.0) / 2.0).tan();
    Ok((l * ta / (ta + tb), l * tb / (ta + tb)))
}
