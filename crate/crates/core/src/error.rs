use thiserror::Error;

/// Errors raised by grid construction, norms, solvers and experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "truncation-dominated: boundary integrand {boundary:e} exceeds 1e-3 of interior contribution {interior:e}"
    )]
    TruncationDominated { boundary: f64, interior: f64 },

    #[error("divergent A_q constant: sampled supremum {0:e} does not stabilize under refinement")]
    DivergentConstant(f64),

    #[error("no real gap: indicial discriminant {discriminant:e} is not positive")]
    NoRealGap { discriminant: f64 },

    #[error("theta {theta} coincides with the range endpoint {endpoint}")]
    EndpointTheta { theta: f64, endpoint: f64 },

    #[error("singular system: pivot {pivot:e} at row {row}")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("undefined ratio: right-hand side norm vanishes")]
    UndefinedRatio,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid too shallow: need s_min <= {required}, grid starts at {actual}")]
    GridTooShallow { required: f64, actual: f64 },

    #[error("oscillatory quadrature failed: Richardson estimate {estimate:e} exceeds 1e-8")]
    OscillatoryQuadrature { estimate: f64 },

    #[error("support violation: {0}")]
    SupportViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
