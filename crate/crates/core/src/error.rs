use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Root-of-unity order must be a positive integer.
    #[error("deformation order p must be >= 1, got {0}")]
    InvalidOrder(i64),

    /// An admissibility bound on the inputs was violated.
    #[error("constraint violation: {what} (admissible bound: {bound:.9})")]
    ConstraintViolation { what: String, bound: f64 },

    /// The undeformed oscillator has no finite basis; use an explicit truncation.
    #[error("the undeformed branch is infinite-dimensional; an explicit level count is required")]
    UnboundedSpace,

    #[error("level {level} is outside the space with p = {order} (levels 0..={order})")]
    LevelOutOfRange { level: usize, order: u32 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("intensity profile integrates to zero")]
    AllZeroIntensity,

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ingestion error: {0}")]
    Ingestion(String),
}

impl Error {
    pub(crate) fn constraint(what: impl Into<String>, bound: f64) -> Self {
        Error::ConstraintViolation {
            what: what.into(),
            bound,
        }
    }
}
