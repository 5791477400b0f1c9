use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: need at least {min}")]
    InvalidDimension { dim: usize, min: usize },

    #[error("cutoff {dim} too small: tail mass {tail_mass:.3e} exceeds {tolerance:.1e}, need cutoff >= {required}")]
    CutoffTooSmall {
        dim: usize,
        required: usize,
        tail_mass: f64,
        tolerance: f64,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("parameter {name} = {value} out of range: {reason}")]
    ParameterRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular input: {0}")]
    SingularInput(&'static str),

    #[error("entropy operator is singular at t = 0 (limit value {limit})")]
    SingularEntropy { limit: f64 },

    #[error("need at least {required} samples, got {got}")]
    InsufficientSamples { required: usize, got: usize },

    #[error("invalid sample at index {index}: {reason}")]
    InvalidSample { index: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
