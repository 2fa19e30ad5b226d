use thiserror::Error;

/// Errors surfaced by every module of the crate.
///
/// Each variant carries a stable machine-readable code (see [`Error::code`]) which the
/// CLI emits verbatim in its error payload.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid discriminant {0}: must be negative and congruent to 0 or 1 mod 4")]
    InvalidDiscriminant(i64),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("form ({a}, {b}, {c}) is not positive definite")]
    NotPositiveDefinite { a: i64, b: i64, c: i64 },
    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),
    #[error("no representation: {0}")]
    NoRepresentation(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("model is not minimal at {0}")]
    NonMinimal(String),
    #[error("Euler numbers sum to {0}, not 24")]
    NotK3(u32),
    #[error("valuation triple {0} matches no Kodaira type")]
    Unclassifiable(String),
    #[error("fiber components not rational over F_{p} at {place}")]
    ComponentsNotRational { p: u64, place: String },
    #[error("prime {0} is not a good prime for this model")]
    BadPrime(u64),
    #[error("unsupported model shape: {0}")]
    UnsupportedShape(String),
    #[error("invalid component index {index} for fiber type {kodaira}")]
    InvalidComponent { kodaira: String, index: u32 },
    #[error("odd pole order at {0}")]
    OddPoleOrder(String),
    #[error("non-integral value {0}")]
    NonIntegral(String),
    #[error("2p - a_p = {0} is not positive")]
    Negative(i64),
    #[error("principality chain fails at {step}: {detail}")]
    ChainFailure { step: &'static str, detail: String },
    #[error("invalid model: {0}")]
    Model(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidDiscriminant(_) => "INVALID_DISCRIMINANT",
            Error::NotFundamental(_) => "NOT_FUNDAMENTAL",
            Error::NotPositiveDefinite { .. } => "NOT_POSITIVE_DEFINITE",
            Error::DiscriminantMismatch(..) => "DISCRIMINANT_MISMATCH",
            Error::NoRepresentation(_) => "NO_REPRESENTATION",
            Error::InsufficientData(_) => "INSUFFICIENT_DATA",
            Error::Precondition(_) => "PRECONDITION",
            Error::NonMinimal(_) => "NON_MINIMAL",
            Error::NotK3(_) => "NOT_K3",
            Error::Unclassifiable(_) => "UNCLASSIFIABLE",
            Error::ComponentsNotRational { .. } => "COMPONENTS_NOT_RATIONAL",
            Error::BadPrime(_) => "BAD_PRIME",
            Error::UnsupportedShape(_) => "UNSUPPORTED_SHAPE",
            Error::InvalidComponent { .. } => "INVALID_COMPONENT",
            Error::OddPoleOrder(_) => "ODD_POLE_ORDER",
            Error::NonIntegral(_) => "NON_INTEGRAL",
            Error::Negative(_) => "NEGATIVE",
            Error::ChainFailure { .. } => "CHAIN_FAILURE",
            Error::Model(_) => "MODEL",
            Error::Overflow(_) => "OVERFLOW",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
