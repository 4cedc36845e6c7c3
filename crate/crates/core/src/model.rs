//! Domain types shared by every part of the hand model.
//!
//! All per-finger geometry lives in the finger's own plane, expressed as
//! 2-vectors. Rotations are clockwise: a rotation by `theta` maps `(1, 0)` to
//! `(cos theta, -sin theta)`, which is multiplication by `exp(-i theta)` in
//! the complex picture.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;
pub type Mat2 = Matrix2<f64>;

/// Default tolerance for geometric predicates (distances, tangency, containment).
pub const GEOMETRIC_TOL: f64 = 1e-9;
/// Default tolerance for algebraic identities (norms, compositions, residuals).
pub const ALGEBRAIC_TOL: f64 = 1e-12;

pub fn to_complex(p: &Vec2) -> Complex64 {
    Complex64::new(p.x, p.y)
}

pub fn from_complex(z: Complex64) -> Vec2 {
    Vec2::new(z.re, z.im)
}

/// Clockwise rotation matrix by `angle` radians.
pub fn rotation_2x2(angle: f64) -> Mat2 {
    let (s, c) = angle.sin_cos();
    Mat2::new(c, s, -s, c)
}

/// Geometric parameters of one finger.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FingerSpecDoc", into = "FingerSpecDoc")]
pub struct FingerSpec {
    /// Ratio between consecutive phalanx lengths.
    pub rho: f64,
    /// Rotation applied when a rotation control is set; the interior angle is `pi - omega`.
    pub omega: f64,
    /// Height of the finger plane (used by the 3D embedding only).
    pub plane_offset: f64,
    /// Unit direction of the first phalanx when no rotation is applied.
    pub base_direction: Vec2,
    /// First junction, in plane coordinates.
    pub origin: Vec2,
}

impl FingerSpec {
    /// Finger in the canonical frame: origin at 0, base direction `(1, 0)`, plane `z = 0`.
    pub fn canonical(rho: f64, omega: f64) -> Self {
        FingerSpec {
            rho,
            omega,
            plane_offset: 0.0,
            base_direction: Vec2::new(1.0, 0.0),
            origin: Vec2::zeros(),
        }
    }

    pub fn with_origin(mut self, origin: Vec2) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_direction(mut self, direction: Vec2) -> Self {
        self.base_direction = direction;
        self
    }

    pub fn with_plane_offset(mut self, offset: f64) -> Self {
        self.plane_offset = offset;
        self
    }

    pub fn validate(self) -> Result<Self> {
        validate_finger_spec(self)
    }

    /// Maps a canonical-frame complex point into this finger's plane coordinates.
    pub fn place(&self, z: Complex64) -> Vec2 {
        self.origin + from_complex(z * to_complex(&self.base_direction))
    }

    /// Inverse of [`FingerSpec::place`].
    pub fn unplace(&self, p: &Vec2) -> Complex64 {
        (to_complex(&(p - self.origin))) * to_complex(&self.base_direction).conj()
    }

    /// Radius of the disc around the origin that contains every reachable point.
    pub fn reach_bound(&self) -> f64 {
        1.0 / (self.rho - 1.0)
    }
}

/// Checks the finger invariants, returning the spec unchanged on success.
pub fn validate_finger_spec(spec: FingerSpec) -> Result<FingerSpec> {
    check_rho_omega(spec.rho, spec.omega)?;
    let norm = spec.base_direction.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > ALGEBRAIC_TOL {
        return Err(Error::NonUnitDirection(norm));
    }
    if !(spec.origin.x.is_finite() && spec.origin.y.is_finite() && spec.plane_offset.is_finite()) {
        return Err(Error::InvalidGeometry("non-finite origin or plane offset".into()));
    }
    Ok(spec)
}

pub(crate) fn check_rho_omega(rho: f64, omega: f64) -> Result<()> {
    if !(rho > 1.0) || !rho.is_finite() {
        return Err(Error::RatioOutOfRange(rho));
    }
    check_omega(omega)
}

pub(crate) fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega < PI) {
        return Err(Error::AngleOutOfRange(omega));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct FingerSpecDoc {
    rho: f64,
    omega: f64,
    #[serde(default)]
    plane_offset: f64,
    #[serde(default)]
    origin: [f64; 2],
    #[serde(default = "default_direction")]
    direction: [f64; 2],
}

fn default_direction() -> [f64; 2] {
    [1.0, 0.0]
}

impl TryFrom<FingerSpecDoc> for FingerSpec {
    type Error = Error;

    fn try_from(doc: FingerSpecDoc) -> Result<Self> {
        validate_finger_spec(FingerSpec {
            rho: doc.rho,
            omega: doc.omega,
            plane_offset: doc.plane_offset,
            base_direction: Vec2::new(doc.direction[0], doc.direction[1]),
            origin: Vec2::new(doc.origin[0], doc.origin[1]),
        })
    }
}

impl From<FingerSpec> for FingerSpecDoc {
    fn from(spec: FingerSpec) -> Self {
        FingerSpecDoc {
            rho: spec.rho,
            omega: spec.omega,
            plane_offset: spec.plane_offset,
            origin: [spec.origin.x, spec.origin.y],
            direction: [spec.base_direction.x, spec.base_direction.y],
        }
    }
}

/// Index of one of the four contractions driving the finger, selected by a
/// control pair `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Digit {
    /// `(u, v) = (0, 0)`: retract, no rotation.
    D1 = 1,
    /// `(0, 1)`: retract with an invisible rotation.
    D2 = 2,
    /// `(1, 0)`: extend straight.
    D3 = 3,
    /// `(1, 1)`: extend and rotate.
    D4 = 4,
}

impl Digit {
    pub const ALL: [Digit; 4] = [Digit::D1, Digit::D2, Digit::D3, Digit::D4];

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn extends(self) -> bool {
        matches!(self, Digit::D3 | Digit::D4)
    }

    pub fn rotates(self) -> bool {
        matches!(self, Digit::D2 | Digit::D4)
    }
}

/// The control-to-map table: `d(0,0)=1, d(0,1)=2, d(1,0)=3, d(1,1)=4`.
pub fn digit_index(u: bool, v: bool) -> Digit {
    match (u, v) {
        (false, false) => Digit::D1,
        (false, true) => Digit::D2,
        (true, false) => Digit::D3,
        (true, true) => Digit::D4,
    }
}

impl TryFrom<u8> for Digit {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            1 => Ok(Digit::D1),
            2 => Ok(Digit::D2),
            3 => Ok(Digit::D3),
            4 => Ok(Digit::D4),
            other => Err(Error::InvalidControls(format!("digit {other} not in 1..=4"))),
        }
    }
}

impl From<Digit> for u8 {
    fn from(d: Digit) -> u8 {
        d.index()
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Paired extension/rotation words, plus optional force intensities.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ControlDoc", into = "ControlDoc")]
pub struct ControlSequence {
    u: Vec<bool>,
    v: Vec<bool>,
    alpha: Option<Vec<f64>>,
}

impl ControlSequence {
    pub fn new(u: Vec<bool>, v: Vec<bool>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::InvalidControls(format!(
                "extension word has length {} but rotation word has length {}",
                u.len(),
                v.len()
            )));
        }
        Ok(ControlSequence { u, v, alpha: None })
    }

    /// Builds controls from 0/1 integers.
    pub fn from_bits(u: &[u8], v: &[u8]) -> Result<Self> {
        let to_bits = |name: &str, w: &[u8]| -> Result<Vec<bool>> {
            w.iter()
                .map(|&b| match b {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(Error::InvalidControls(format!("{name} contains {other}, expected 0 or 1"))),
                })
                .collect()
        };
        ControlSequence::new(to_bits("u", u)?, to_bits("v", v)?)
    }

    pub fn from_digits(digits: &[Digit]) -> Self {
        ControlSequence {
            u: digits.iter().map(|d| d.extends()).collect(),
            v: digits.iter().map(|d| d.rotates()).collect(),
            alpha: None,
        }
    }

    pub fn with_alpha(mut self, alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() != self.u.len() {
            return Err(Error::InvalidControls(format!(
                "alpha has length {} but controls have length {}",
                alpha.len(),
                self.u.len()
            )));
        }
        if let Some(bad) = alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::InvalidControls(format!("force intensity {bad} outside [0, 1]")));
        }
        self.alpha = Some(alpha);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn u(&self) -> &[bool] {
        &self.u
    }

    pub fn v(&self) -> &[bool] {
        &self.v
    }

    pub fn alpha(&self) -> Option<&[f64]> {
        self.alpha.as_deref()
    }

    pub fn digits(&self) -> Vec<Digit> {
        self.u.iter().zip(&self.v).map(|(&u, &v)| digit_index(u, v)).collect()
    }

    /// Concatenates two sequences. Missing intensities on either side are
    /// filled with zeros when the other side carries them.
    pub fn concat(&self, tail: &ControlSequence) -> ControlSequence {
        let mut u = self.u.clone();
        u.extend_from_slice(&tail.u);
        let mut v = self.v.clone();
        v.extend_from_slice(&tail.v);
        let alpha = match (&self.alpha, &tail.alpha) {
            (None, None) => None,
            (head, rest) => {
                let mut a = head.clone().unwrap_or_else(|| vec![0.0; self.len()]);
                a.extend(rest.clone().unwrap_or_else(|| vec![0.0; tail.len()]));
                Some(a)
            }
        };
        ControlSequence { u, v, alpha }
    }
}

#[derive(Serialize, Deserialize)]
struct ControlDoc {
    u: Vec<u8>,
    v: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<Vec<f64>>,
}

impl TryFrom<ControlDoc> for ControlSequence {
    type Error = Error;

    fn try_from(doc: ControlDoc) -> Result<Self> {
        let seq = ControlSequence::from_bits(&doc.u, &doc.v)?;
        match doc.alpha {
            Some(alpha) => seq.with_alpha(alpha),
            None => Ok(seq),
        }
    }
}

impl From<ControlSequence> for ControlDoc {
    fn from(seq: ControlSequence) -> Self {
        ControlDoc {
            u: seq.u.iter().map(|&b| b as u8).collect(),
            v: seq.v.iter().map(|&b| b as u8).collect(),
            alpha: seq.alpha,
        }
    }
}

/// Junction positions `x_0..x_K` together with the local frames `E_0..E_K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub junctions: Vec<Vec2>,
    pub frames: Vec<Mat2>,
    pub spec: FingerSpec,
    pub controls: ControlSequence,
}

impl Configuration {
    pub fn endpoint(&self) -> Vec2 {
        *self.junctions.last().expect("configuration always holds x_0")
    }

    /// Phalanx `k` (1-based) as its two junctions.
    pub fn phalanx(&self, k: usize) -> (Vec2, Vec2) {
        (self.junctions[k - 1], self.junctions[k])
    }

    /// 1-based indices of the extended phalanxes.
    pub fn extended_phalanxes(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls
            .u()
            .iter()
            .enumerate()
            .filter(|(_, &u)| u)
            .map(|(i, _)| i + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Vec2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Vec2, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidGeometry(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Circle { center, radius })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_table() {
        assert_eq!(digit_index(false, false).index(), 1);
        assert_eq!(digit_index(false, true).index(), 2);
        assert_eq!(digit_index(true, false).index(), 3);
        assert_eq!(digit_index(true, true).index(), 4);
        let mut seen: Vec<u8> = [false, true]
            .iter()
            .flat_map(|&u| [false, true].map(move |v| digit_index(u, v).index()))
            .collect();
        seen.sort();
        assert_eq!(seen, vec![1, 2, 3, 4]);
        for d in Digit::ALL {
            assert_eq!(digit_index(d.extends(), d.rotates()), d);
        }
    }

    #[test]
    fn validation_errors() {
        let ok = FingerSpec::canonical(2.0, 2.0 * PI / 3.0);
        assert!(validate_finger_spec(ok).is_ok());
        assert!(matches!(
            validate_finger_spec(FingerSpec::canonical(1.0, 2.0 * PI / 3.0)),
            Err(Error::RatioOutOfRange(_))
        ));
        assert!(matches!(
            validate_finger_spec(FingerSpec::canonical(2.0, PI)),
            Err(Error::AngleOutOfRange(_))
        ));
        assert!(matches!(
            validate_finger_spec(FingerSpec::canonical(2.0, 0.0)),
            Err(Error::AngleOutOfRange(_))
        ));
        assert!(matches!(
            validate_finger_spec(ok.with_direction(Vec2::new(1.0, 1.0))),
            Err(Error::NonUnitDirection(_))
        ));
    }

    #[test]
    fn rotation_convention() {
        assert_eq!(rotation_2x2(0.0), Mat2::identity());
        let w = 0.7;
        let r = rotation_2x2(w) * Vec2::new(1.0, 0.0);
        assert!((r - Vec2::new(w.cos(), -w.sin())).norm() < 1e-15);
        let lhs = rotation_2x2(PI / 3.0) * rotation_2x2(PI / 3.0);
        assert!((lhs - rotation_2x2(2.0 * PI / 3.0)).norm() < 1e-14);
        // Agrees with multiplication by exp(-i angle).
        let z = Complex64::from_polar(1.0, -w);
        assert!((from_complex(z) - r).norm() < 1e-15);
    }

    #[test]
    fn finger_spec_json() {
        let json = r#"{"rho": 2, "omega": 1.5, "plane_offset": 0.25, "origin": [1, 2], "direction": [0, 1]}"#;
        let spec: FingerSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.origin, Vec2::new(1.0, 2.0));
        assert_eq!(spec.base_direction, Vec2::new(0.0, 1.0));
        let back: FingerSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_str::<FingerSpec>(r#"{"rho": 0.5, "omega": 1.0}"#).is_err());
    }

    #[test]
    fn control_json_and_validation() {
        let c: ControlSequence = serde_json::from_str(r#"{"u": [1, 0, 1], "v": [0, 1, 1]}"#).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.digits(), vec![Digit::D3, Digit::D2, Digit::D4]);
        assert_eq!(serde_json::to_string(&c).unwrap(), r#"{"u":[1,0,1],"v":[0,1,1]}"#);
        assert!(serde_json::from_str::<ControlSequence>(r#"{"u": [1, 2], "v": [0, 0]}"#).is_err());
        assert!(serde_json::from_str::<ControlSequence>(r#"{"u": [1], "v": [0, 0]}"#).is_err());
        assert!(serde_json::from_str::<ControlSequence>(r#"{"u": [1], "v": [0], "alpha": [1.5]}"#).is_err());
        assert!(ControlSequence::from_bits(&[1], &[0]).unwrap().with_alpha(vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn concat_fills_alpha() {
        let head = ControlSequence::from_bits(&[1], &[0]).unwrap();
        let tail = ControlSequence::from_bits(&[1, 1], &[1, 1]).unwrap().with_alpha(vec![1.0, 0.5]).unwrap();
        let all = head.concat(&tail);
        assert_eq!(all.alpha(), Some(&[0.0, 1.0, 0.5][..]));
        assert_eq!(all.u(), &[true, true, true]);
    }

    #[test]
    fn placement_round_trip() {
        let d = Vec2::new(0.6, 0.8);
        let spec = FingerSpec::canonical(2.0, 1.0).with_direction(d).with_origin(Vec2::new(3.0, -1.0));
        let z = Complex64::new(0.3, -0.2);
        assert!((spec.unplace(&spec.place(z)) - z).norm() < 1e-15);
        assert!((spec.place(Complex64::new(1.0, 0.0)) - (spec.origin + d)).norm() < 1e-15);
    }

    #[test]
    fn circle_requires_positive_radius() {
        assert!(Circle::new(Vec2::zeros(), 0.0).is_err());
        assert!(Circle::new(Vec2::zeros(), 1.0).is_ok());
    }
}
