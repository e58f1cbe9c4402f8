use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("invalid field descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("field mismatch: expected {expected}, found {found}")]
    FieldMismatch { expected: String, found: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("needs a field extension: {0}")]
    NeedsExtension(String),
    #[error("matrices do not commute: {0}")]
    NonCommuting(String),
    #[error("subgroup is not central: {0}")]
    NotCentral(String),
    #[error("matrix does not preserve the block decomposition: {0}")]
    BlockStructure(String),
    #[error("generator index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("absolute value of zero has no logarithm")]
    LogOfZero,
    #[error("{d} is not a quadratic residue modulo {p}")]
    NotQuadraticResidue { d: u64, p: u64 },
    #[error("absolute value {av} does not apply to field {field}")]
    AbsoluteValueMismatch { av: String, field: String },
    #[error("unknown gallery entry: {0}")]
    UnknownGallery(String),
    #[error("rank deficient: {0}")]
    RankDeficient(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("injectivity failure: {0}")]
    InjectivityFailure(String),
    #[error("factorization failure: {0}")]
    FactorizationFailure(String),
    #[error("identity check failed: {0}")]
    IdentityFailure(String),
    #[error("unknown generator label: {0}")]
    UnknownLabel(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
