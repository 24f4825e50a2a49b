use thiserror::Error;

/// Errors raised by the arithmetic, synthesis and analysis layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("value {value} is not a p-adic integer for p = {prime}")]
    NotIntegral { prime: u64, value: String },

    #[error("enumeration of {needed} items exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("prime mismatch: {left} vs {right}")]
    PrimeMismatch { left: u64, right: u64 },

    /// `detail` reads `x -> f(x) but x' -> f(x')` for two points of the coset.
    #[error("network is not constant on coset {coset:?}: {detail}")]
    ConstancyViolation { coset: Vec<u64>, detail: String },

    #[error("point {0} to be moved already belongs to the fixed set")]
    AlphaInS(String),

    #[error("interpolation source {0} appears more than once")]
    DuplicatePoint(String),

    #[error("interpolation target {0} lies in the source set")]
    ImageMeetsS(String),

    #[error("requested width {requested} is below the minimum {minimum}")]
    WidthTooSmall { requested: usize, minimum: usize },

    #[error("invalid surjectivity certificate: {0}")]
    InvalidCertificate(String),

    #[error("no certificate for residue {residue} at level {level}")]
    CertificateGap { residue: u64, level: u32 },

    #[error("network shape not supported: {0}")]
    ShapeMismatch(String),

    #[error("no disjoint ball found: the constraint set is all of Z_p^n")]
    NoBallFound,

    #[error("separation is not certifiable at precision {0}")]
    NotCertifiable(u32),

    #[error("no direction constancy detected in the comparison table")]
    PreconditionUnverified,

    #[error("level {level} is too large for p = {prime}")]
    LevelOverflow { prime: u64, level: u32 },

    #[error("parse error at {field}: {message}")]
    Parse { field: String, message: String },
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
