use alloc::string::String;

/// Errors raised by geometric and numerical operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("degenerate polytope: vertices span a {rank}-dimensional affine subspace of R^{dim}")]
    DegeneratePolytope { rank: usize, dim: usize },
    #[error("ambiguous projection: nearest points separated by {separation:e}")]
    AmbiguousProjection { separation: f64 },
    #[error("rejection sampling stalled after {attempts} attempts ({accepted} accepted)")]
    RejectionStall { attempts: u64, accepted: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("point is not on the boundary (distance {distance:e})")]
    NotOnBoundary { distance: f64 },
    #[error("operation requires positive reach: {0}")]
    NotPositiveReach(String),
    #[error("radius {r} is not below the reach {reach}")]
    BeyondReach { r: f64, reach: f64 },
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {intervals} intervals")]
    Quadrature {
        estimate: f64,
        error: f64,
        intervals: usize,
    },
    #[error("ill-conditioned design matrix (condition number {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("singular design: {0}")]
    SingularDesign(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Whether the error reflects a numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::IllConditioned { .. }
                | Error::SingularDesign(_)
                | Error::RejectionStall { .. }
                | Error::AmbiguousProjection { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
