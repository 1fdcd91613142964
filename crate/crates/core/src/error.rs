use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("rotation number {alpha} is rational ({p}/{q}); an irrational value is required")]
    RationalAlpha { alpha: f64, p: i64, q: i64 },

    #[error("the doubling map is not invertible: negative power {0}")]
    NonInvertible(i64),

    #[error("power {0} is outside the supported range |p| <= 2^62")]
    PowerOutOfRange(i128),

    #[error("point does not belong to the {0} system")]
    PointMismatch(&'static str),

    #[error("observable is incompatible with the system: {0}")]
    IncompatibleObservable(String),

    #[error("observable must be real-valued, got `{0}`")]
    ComplexObservable(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("entry {index} has modulus {modulus} > 1")]
    BoundViolation { index: usize, modulus: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
