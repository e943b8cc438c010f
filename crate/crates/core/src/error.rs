use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid coupling: gamma1 = {gamma1}, gamma2 = {gamma2} (both must be positive)")]
    InvalidCoupling { gamma1: f64, gamma2: f64 },

    #[error("field on subdomain {subdomain} vanishes identically")]
    AllZero { subdomain: u8 },

    #[error("field definition: {0}")]
    FieldDefinition(String),

    #[error("expression error at column {column}: {message}")]
    Expression { column: usize, message: String },

    #[error("dense oracle limited to dimension {limit}, got {dim}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("converged vector is not positive (min component {min})")]
    NoPositivityCertificate { min: f64 },

    #[error("eigen iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("weight has no zero set with positive length")]
    EmptyZeroSet,

    #[error("inconsistent case: {0}")]
    InconsistentCase(String),

    #[error("branch split failed: {0}")]
    BranchSplitFailed(String),

    #[error("weight sign class not supported here: {0}")]
    UnsupportedSign(String),

    #[error("|F| = {value:e} is within the decision margin {margin:e}")]
    Indeterminate { value: f64, margin: f64 },

    #[error("F(lambda1, lambda2) = {value:e} is not below -{margin:e}")]
    NotSubcritical { value: f64, margin: f64 },

    #[error("monotone iteration did not converge after {iterations} iterations (gap {gap:e})")]
    NonConvergence { iterations: usize, gap: f64 },

    #[error("upper and lower limits differ by {gap:e} (> {tol:e})")]
    UniquenessGap { gap: f64, tol: f64 },

    #[error("monotonicity violated at iteration {iteration}: {detail}")]
    MonotonicityViolated { iteration: usize, detail: String },

    #[error("singular or non-monotone linear system (pivot {pivot:e} at row {row})")]
    Singular { row: usize, pivot: f64 },
}

impl Error {
    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::NoPositivityCertificate { .. }
                | Error::NonConvergence { .. }
                | Error::UniquenessGap { .. }
                | Error::MonotonicityViolated { .. }
                | Error::Singular { .. }
                | Error::InconsistentCase(_)
                | Error::BranchSplitFailed(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
