use crate::cmat::C64;
use crate::spectral::KernelError;

/// Errors raised by the symbol calculus and everything built on it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalcError {
    #[error("inverse node failed its certificate (min singular value {min_singular_value:.3e})")]
    SingularFiber { min_singular_value: f64 },
    #[error("requested jet order {requested} exceeds the engine maximum {max}")]
    OrderExceeded { requested: usize, max: usize },
    #[error("requested depth {requested} exceeds available depth {available}")]
    DepthUnavailable { requested: usize, available: usize },
    #[error("component index {needed} lies below the truncation depth {depth}")]
    DepthInsufficient { needed: usize, depth: usize },
    #[error("principal symbol must not depend on x")]
    XDependentPrincipal,
    #[error("incompatible operands: {0}")]
    Mismatch(String),
    #[error("principal symbol not elliptic: min singular value {min_singular_value:.3e} at xi={xi:?}")]
    NotElliptic { min_singular_value: f64, xi: Vec<f64> },
    #[error("lambda={lambda} lies on the principal spectrum (distance {distance:.3e})")]
    LambdaOnSpectrum { lambda: C64, distance: f64 },
    #[error("eigenvalue {eigenvalue} of the principal symbol lies on a cut ray at xi={xi:?}")]
    EigenvalueOnCut { eigenvalue: C64, xi: Vec<f64> },
    #[error("contour clearance {clearance:.3e} too small at xi={xi:?}")]
    ClearanceFailure { clearance: f64, xi: Vec<f64> },
    #[error("principal symbol is not selfadjoint (deviation {deviation:.3e})")]
    NotSelfadjoint { deviation: f64 },
    #[error("preconditions not met: {0}")]
    Precondition(String),
    #[error("heat coefficient a_{index} is not available")]
    HeatCoefficientUnavailable { index: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

pub type CalcResult<T> = Result<T, CalcError>;
