use thiserror::Error;

/// Every failure the engine can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = {0} must be an odd prime (p > 2)")]
    PrimeTooSmall(u64),
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("polynomial is not Eisenstein at p: {0}")]
    NotEisenstein(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("element is not a unit: {0}")]
    NonUnit(String),
    #[error("constant term must be the identity: {0}")]
    BadConstantTerm(String),
    #[error("face map index {index} out of range for source with {n_vars} variables")]
    IndexOutOfRange { index: usize, n_vars: usize },
    #[error("seed shape mismatch: {0}")]
    SeedShapeMismatch(String),
    #[error("A_{{0,1}} does not commute with A_{{{0},1}}")]
    NonCommutingSeeds(usize),
    #[error("product not settled to precision {prec} within {n_max} Frobenius factors")]
    ProductNotSettled { prec: i64, n_max: usize },
    #[error("precision exhausted: {0}")]
    PrecisionLoss(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable identifier used in machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::PrimeTooSmall(_) => "PrimeTooSmall",
            Error::NotPrime(_) => "NotPrime",
            Error::NotEisenstein(_) => "NotEisenstein",
            Error::DivisionByZero => "DivisionByZero",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::NonUnit(_) => "NonUnit",
            Error::BadConstantTerm(_) => "BadConstantTerm",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::SeedShapeMismatch(_) => "SeedShapeMismatch",
            Error::NonCommutingSeeds(_) => "NonCommutingSeeds",
            Error::ProductNotSettled { .. } => "ProductNotSettled",
            Error::PrecisionLoss(_) => "PrecisionLoss",
            Error::Parse(_) => "Parse",
        }
    }

    /// Whether the error comes from malformed input rather than from a computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::PrimeTooSmall(_)
                | Error::NotPrime(_)
                | Error::NotEisenstein(_)
                | Error::ShapeMismatch(_)
                | Error::SeedShapeMismatch(_)
                | Error::NonCommutingSeeds(_)
                | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
