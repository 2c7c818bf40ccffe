use alloc::string::String;

/// Errors raised by the algorithmic layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid generator #{index} ({mask:#o}): {reason}")]
    InvalidGenerator {
        index: usize,
        mask: u32,
        reason: &'static str,
    },
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("input sequence is empty")]
    EmptyInput,
    #[error("input bit at position {0} is not 0 or 1")]
    InvalidBit(usize),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("no remerging path with weight <= {cap}; the weight cap is too small")]
    WeightCapTooSmall { cap: usize },
    #[error("code is catastrophic: a nonzero-state cycle has zero output weight")]
    CatastrophicCode,
    #[error("coefficient counter overflow at weight {weight}")]
    CoefficientOverflow { weight: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("argument {x} outside the supported range |x| <= {limit}")]
    OutOfRange { x: f64, limit: f64 },
    #[error(
        "quadrature did not converge within depth {max_depth} (error estimate {error_estimate:e})"
    )]
    NoConvergence { max_depth: u32, error_estimate: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("series diverges: ratio {ratio} >= 1, use the finite-sum bounds instead")]
    Divergent { ratio: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
