//! Self-similar robot hand: fingers whose phalanx lengths shrink by a constant
//! ratio, driven by binary extension and rotation controls.

pub mod cli;
pub mod collision;
pub mod error;
pub mod geometry;
pub mod grasp;
pub mod hand;
pub mod ifs;
pub mod kinematics;
pub mod model;
pub mod reach;
pub mod render;

pub use error::{Error, Result};
pub use model::{Circle, Configuration, ControlSequence, Digit, FingerSpec, Mat2, Vec2};
