//! Forward kinematics of a single finger.
//!
//! The finger state is the pair (junction, local frame). A rotation control
//! applied to a retracted phalanx leaves the junction in place but still turns
//! the frame, so the turn shows up on the next extended phalanx.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{rotation_2x2, Configuration, ControlSequence, FingerSpec, Mat2, Vec2};

/// Cumulative rotation angles `Omega_1..Omega_K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CumulativeAngles(pub Vec<f64>);

impl CumulativeAngles {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `Omega_j = omega * #{n <= j : v_n = 1}`.
pub fn cumulative_angles(v: &[bool], omega: f64) -> CumulativeAngles {
    let mut count = 0u32;
    CumulativeAngles(
        v.iter()
            .map(|&bit| {
                count += bit as u32;
                f64::from(count) * omega
            })
            .collect(),
    )
}

/// Initial frame: first column is the base direction, second its
/// counter-clockwise normal, so the determinant is +1.
pub fn initial_frame(spec: &FingerSpec) -> Mat2 {
    let d = spec.base_direction;
    Mat2::new(d.x, -d.y, d.y, d.x)
}

/// Evaluates every junction and frame of the finger under `controls`.
pub fn evaluate_junctions(spec: &FingerSpec, controls: &ControlSequence) -> Result<Configuration> {
    let spec = spec.validate()?;
    let k = controls.len();
    let e0 = initial_frame(&spec);
    let omegas = cumulative_angles(controls.v(), spec.omega);

    let mut junctions = Vec::with_capacity(k + 1);
    let mut frames = Vec::with_capacity(k + 1);
    junctions.push(spec.origin);
    frames.push(e0);

    let mut x = spec.origin;
    let mut scale = 1.0;
    for (j, (&u, &angle)) in controls.u().iter().zip(omegas.as_slice()).enumerate() {
        scale /= spec.rho;
        let frame = rotation_2x2(angle) * e0;
        if u {
            x += scale * frame.column(0);
        }
        debug_assert_eq!(j + 1, junctions.len());
        junctions.push(x);
        frames.push(frame);
    }

    Ok(Configuration {
        junctions,
        frames,
        spec,
        controls: controls.clone(),
    })
}

/// Endpoint `sum_j u_j rho^-j exp(-i Omega_j)` in the canonical frame
/// (origin 0, base direction `(1, 0)`); the spec's placement is ignored.
pub fn evaluate_complex(spec: &FingerSpec, controls: &ControlSequence) -> Result<Complex64> {
    let spec = spec.validate()?;
    Ok(complex_endpoint(spec.rho, spec.omega, controls.u(), controls.v()))
}

pub(crate) fn complex_endpoint(rho: f64, omega: f64, u: &[bool], v: &[bool]) -> Complex64 {
    let mut z = Complex64::new(0.0, 0.0);
    let mut scale = 1.0;
    let mut turns = 0u32;
    for (&uj, &vj) in u.iter().zip(v) {
        scale /= rho;
        turns += vj as u32;
        if uj {
            z += Complex64::from_polar(scale, -f64::from(turns) * omega);
        }
    }
    z
}

/// Junctions as CSV rows `index,x,y`.
pub fn junctions_csv(config: &Configuration) -> String {
    let mut out = String::from("index,x,y\n");
    for (i, p) in config.junctions.iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", p.x, p.y));
    }
    out
}

/// Length of phalanx `k` (1-based).
pub fn phalanx_length(config: &Configuration, k: usize) -> f64 {
    let (a, b): (Vec2, Vec2) = config.phalanx(k);
    (b - a).norm()
}
