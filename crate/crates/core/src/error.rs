use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("q = q_half^2 is within {tol:e} of a root of unity of order {order}")]
    RootOfUnity { order: u32, tol: f64 },

    #[error("operation `{0}` divides by q - 1/q and is unavailable in classical (q = 1) mode")]
    ClassicalMode(&'static str),

    #[error("operation `{0}` requires classical (q = 1) mode")]
    DeformedMode(&'static str),

    #[error("index {index} out of range {range}")]
    IndexOutOfRange { index: usize, range: String },

    #[error("quantum-space dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("missing generator {0}; extend the set first")]
    MissingGenerator(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("ansatz violated: re-expansion residual {residual:e} exceeds tolerance {tol:e}")]
    AnsatzViolation { residual: f64, tol: f64 },

    #[error("eigensolver did not converge for a {0}x{0} matrix")]
    NoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
