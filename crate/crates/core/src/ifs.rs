//! The four planar contractions generating the asymptotic reachable set.
//!
//! Map `f_d` for the control pair `(u, v)` is `x -> c^v (x + u) / rho` with
//! `c = exp(-i omega)`. Prepending one control pair to a finger applies one
//! map on the outside, so the endpoint of controls `d_1..d_J` is
//! `f_{d_1}(f_{d_2}(... f_{d_J}(0)))`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{check_rho_omega, from_complex, to_complex, Circle, Digit};

/// `x -> linear * (x + shift)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub linear: Complex64,
    pub shift: Complex64,
}

impl AffineMap {
    pub fn apply(&self, x: Complex64) -> Complex64 {
        self.linear * (x + self.shift)
    }

    pub fn apply_inverse(&self, y: Complex64) -> Complex64 {
        y / self.linear - self.shift
    }

    pub fn contraction(&self) -> f64 {
        self.linear.norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Inverse,
}

/// The iterated function system of one finger.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ifs {
    pub rho: f64,
    pub omega: f64,
    maps: [AffineMap; 4],
}

/// Builds `f_1..f_4` for the given ratio and rotation angle.
pub fn ifs_maps(rho: f64, omega: f64) -> Result<Ifs> {
    check_rho_omega(rho, omega)?;
    let straight = Complex64::new(1.0 / rho, 0.0);
    let turned = Complex64::from_polar(1.0 / rho, -omega);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    Ok(Ifs {
        rho,
        omega,
        maps: [
            AffineMap { linear: straight, shift: zero },
            AffineMap { linear: turned, shift: zero },
            AffineMap { linear: straight, shift: one },
            AffineMap { linear: turned, shift: one },
        ],
    })
}

impl Ifs {
    pub fn map(&self, d: Digit) -> &AffineMap {
        &self.maps[d.index() as usize - 1]
    }

    pub fn maps(&self) -> &[AffineMap; 4] {
        &self.maps
    }

    /// `f_{d_1} o f_{d_2} o ... o f_{d_n}` applied to `point`.
    pub fn compose(&self, digits: &[Digit], point: Complex64) -> Complex64 {
        digits.iter().rev().fold(point, |z, &d| self.map(d).apply(z))
    }

    /// Inverse of [`Ifs::compose`]: `f_{d_n}^-1 o ... o f_{d_1}^-1`.
    pub fn compose_inverse(&self, digits: &[Digit], point: Complex64) -> Complex64 {
        digits.iter().fold(point, |z, &d| self.map(d).apply_inverse(z))
    }

    /// Linear part of the composed similarity.
    pub fn compose_linear(&self, digits: &[Digit]) -> Complex64 {
        digits.iter().map(|&d| self.map(d).linear).product()
    }

    /// Image of a circle under the composed similarity.
    pub fn transform_circle(&self, circle: &Circle, digits: &[Digit], direction: Direction) -> Circle {
        let c = to_complex(&circle.center);
        let scale = self.rho.powi(digits.len() as i32);
        let (center, radius) = match direction {
            Direction::Forward => (self.compose(digits, c), circle.radius / scale),
            Direction::Inverse => (self.compose_inverse(digits, c), circle.radius * scale),
        };
        Circle {
            center: from_complex(center),
            radius,
        }
    }
}

/// Free-function form of [`Ifs::compose`].
pub fn compose_maps(ifs: &Ifs, digits: &[Digit], point: Complex64) -> Complex64 {
    ifs.compose(digits, point)
}

/// Maps a circle forward or backward through the similarity selected by `digits`.
pub fn transform_object(ifs: &Ifs, circle: &Circle, digits: &[Digit], direction: Direction) -> Circle {
    ifs.transform_circle(circle, digits, direction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Vec2;
    use std::f64::consts::PI;

    #[test]
    fn single_maps() {
        let ifs = ifs_maps(2.0, 2.0 * PI / 3.0).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(ifs.map(Digit::D1).apply(zero), zero);
        assert_eq!(ifs.map(Digit::D2).apply(zero), zero);
        assert!((ifs.map(Digit::D3).apply(zero) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let f4 = ifs.map(Digit::D4).apply(zero);
        assert!((f4 - Complex64::from_polar(0.5, -2.0 * PI / 3.0)).norm() < 1e-15);
        for m in ifs.maps() {
            assert!((m.contraction() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ifs_maps(1.0, 1.0).is_err());
        assert!(ifs_maps(2.0, PI).is_err());
    }

    #[test]
    fn compose_then_invert() {
        let ifs = ifs_maps(1.8, 1.1).unwrap();
        let z = Complex64::new(0.3, -0.7);
        let ds = [Digit::D4, Digit::D3, Digit::D2];
        let w = ifs.compose(&ds, z);
        assert!((ifs.compose_inverse(&ds, w) - z).norm() < 1e-12);
        let single = ifs.compose(&[Digit::D3], Complex64::new(0.0, 0.0));
        assert!((single - Complex64::new(1.0 / 1.8, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn circle_transform() {
        let ifs = ifs_maps(2.0, PI / 2.0).unwrap();
        let c = Circle::new(Vec2::new(0.2, -0.1), 0.05).unwrap();
        assert_eq!(ifs.transform_circle(&c, &[], Direction::Forward), c);
        let f3 = ifs.transform_circle(&c, &[Digit::D3], Direction::Forward);
        assert!((f3.center - Vec2::new(0.6, -0.05)).norm() < 1e-15);
        assert!((f3.radius - 0.025).abs() < 1e-15);
        let ds = [Digit::D1, Digit::D4, Digit::D2];
        let there = ifs.transform_circle(&c, &ds, Direction::Forward);
        let back = ifs.transform_circle(&there, &ds, Direction::Inverse);
        assert!((back.center - c.center).norm() < 1e-12);
        assert!((back.radius - c.radius).abs() < 1e-12);
    }
}
