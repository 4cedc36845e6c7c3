use thiserror::Error;

/// Errors raised by the hand model.
#[derive(Debug, Error)]
pub enum Error {
    #[error("scaling ratio must satisfy rho > 1, got {0}")]
    RatioOutOfRange(f64),

    #[error("rotation angle must lie in (0, pi), got {0}")]
    AngleOutOfRange(f64),

    #[error("base direction must have unit norm, got norm {0}")]
    NonUnitDirection(f64),

    #[error("invalid controls: {0}")]
    InvalidControls(String),

    #[error("depth {depth} exceeds the configured cap {cap}")]
    DepthCapExceeded { depth: usize, cap: usize },

    #[error("point set of size {size} exceeds the configured cap {cap}")]
    SizeCapExceeded { size: usize, cap: usize },

    #[error("grasp length {len} is shorter than the minimum {min}")]
    BadLength { len: usize, min: usize },

    #[error("not graspable: {0}")]
    NotGraspable(String),

    #[error("non-thumb fingers have differing parameters: {0}")]
    MixedSpecs(String),

    #[error("invalid hand: {0}")]
    InvalidHand(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable variant name, used by the CLI when reporting domain errors.
    pub fn name(&self) -> &'static str {
        match self {
            Error::RatioOutOfRange(_) => "RatioOutOfRange",
            Error::AngleOutOfRange(_) => "AngleOutOfRange",
            Error::NonUnitDirection(_) => "NonUnitDirection",
            Error::InvalidControls(_) => "InvalidControls",
            Error::DepthCapExceeded { .. } => "DepthCapExceeded",
            Error::SizeCapExceeded { .. } => "SizeCapExceeded",
            Error::BadLength { .. } => "BadLength",
            Error::NotGraspable(_) => "NotGraspable",
            Error::MixedSpecs(_) => "MixedSpecs",
            Error::InvalidHand(_) => "InvalidHand",
            Error::InvalidGeometry(_) => "InvalidGeometry",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
