use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("enumeration budget exceeded: {what} has {size} points, limit {limit}")]
    BudgetExceeded { what: String, size: u128, limit: u128 },
    #[error("integrity check failed: {0}")]
    Integrity(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::UnsupportedField(_) => "unsupported-field",
            Error::InvalidInput(_) => "invalid-input",
            Error::Precondition(_) => "precondition",
            Error::BudgetExceeded { .. } => "budget-exceeded",
            Error::Integrity(_) => "integrity",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(format!($($arg)*)))
    };
}
pub(crate) use bail;
