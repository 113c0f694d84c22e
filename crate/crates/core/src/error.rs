use thiserror::Error;

/// Errors raised by the geometry, quadrature and transform routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {0} is not supported here")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector norm {0} is outside the accepted band [0.5, 2]")]
    NotNearUnit(f64),

    #[error("shift parameter z = {z} is outside {domain}")]
    ParameterDomain { z: f64, domain: &'static str },

    #[error("point is at or too close to the north pole")]
    NearPole,

    #[error("quadrature rule needs at least one node")]
    EmptyRule,

    #[error("invalid resolution: {0}")]
    Resolution(String),

    #[error("length mismatch: expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("argument {value} is outside [-1, 1]")]
    ArgumentDomain { value: f64 },

    #[error("function is not in the range of the transform: odd-degree energy fraction {fraction:.3e} exceeds {threshold:.1e}")]
    NotInRange { fraction: f64, threshold: f64 },

    #[error("eigenvalue of degree {degree} is too close to zero ({value:e})")]
    Conditioning { degree: usize, value: f64 },

    #[error("Sobolev index must be finite and nonnegative, got {0}")]
    SobolevIndex(f64),

    #[error("input has zero norm")]
    ZeroNorm,

    #[error("non-finite value at index {0}")]
    NonFinite(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
