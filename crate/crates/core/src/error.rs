//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, LabError>;

/// Everything that can go wrong below the CLI layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    /// Operator construction rejected (non-finite entries, bad sizes).
    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    /// Vector/operator dimensions do not match.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionError { expected: usize, got: usize },

    /// Fractional power exponent outside its admissible interval.
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    /// Subdifferential is set-valued at the requested point.
    #[error("subgradient is not single-valued for {0}")]
    NotSingleValued(&'static str),

    /// Argument outside the domain of the (inverse) subdifferential.
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// Operation not supported for this regulariser variant.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Regularisation parameter α must be positive.
    #[error("invalid alpha: {0} (must be > 0)")]
    InvalidAlpha(f64),

    /// Noise level δ must be positive (and data nonempty).
    #[error("invalid noise: {0}")]
    InvalidNoise(String),

    /// ν outside the admissible interval of the requested regime.
    #[error("inadmissible nu: {0}")]
    InadmissibleNu(String),

    /// A log–log fit was handed an error value ≤ 0.
    #[error("non-positive error value in fit window: {0}")]
    NonPositiveError(f64),

    /// Regulariser parameters outside their declared ranges.
    #[error("invalid regulariser spec: {0}")]
    InvalidSpec(String),

    /// Experiment configuration violates its invariants.
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}
