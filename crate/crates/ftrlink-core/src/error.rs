use thiserror::Error;

/// Errors shared by all evaluation layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or iteration failed to reach the requested tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// No valid integration contour exists (pole families overlap) or the
    /// requested abscissa does not separate them.
    #[error("contour error: {0}")]
    Contour(String),

    /// Doubling the contour resolution moved the result by more than the
    /// requested tolerance; the quadrature cannot be trusted at this grid.
    #[error("contour resolution insufficient: {0}")]
    Resolution(String),

    /// Tensor-product contour quadrature is capped at four dimensions;
    /// larger systems must use the Monte-Carlo path.
    #[error("dimension cap exceeded: {0}")]
    DimensionCap(String),

    /// Structurally invalid argument (wrong length, non-finite value, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
