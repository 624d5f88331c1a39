//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("evaluation hit a singularity in `{subexpr}`: {message}")]
    Singular { subexpr: String, message: String },

    #[error("expression `{subexpr}` has no exact rational value")]
    NonRational { subexpr: String },

    #[error("right-hand side is not cubic in the derivative variable: {0}")]
    NotCubic(String),

    #[error("denominator normalizes to zero in `{0}`")]
    ZeroDenominator(String),

    #[error("jet order mismatch: need order >= {need}, got {got}")]
    Order { need: usize, got: usize },

    #[error("base point mismatch between jet arguments")]
    BaseMismatch,

    #[error("Jacobian is singular at the base point")]
    SingularJacobian,

    #[error("no symbolic inverse available for this transformation")]
    InverseUnavailable,

    #[error("graph condition fails: image curve has a vertical tangent near x = {0}")]
    GraphCondition(f64),

    #[error("numeric integration left the chart (non-finite state)")]
    FlowEscaped,

    #[error("zero test inconclusive: {0}")]
    Inconclusive(String),

    #[error("linear solve expected a unique solution, got nullity {nullity}")]
    NotUnique { nullity: usize },

    #[error("subspace input is not of homogeneous grade")]
    NotHomogeneous,

    #[error("grade compatibility violated: bracket leaves the next subspace")]
    GradeCompat,

    #[error("{0}")]
    Invalid(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
