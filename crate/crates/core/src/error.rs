use thiserror::Error;

use crate::toda::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("gcd of two zero polynomials is undefined")]
    UndefinedGcd,

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invalid state: {0}")]
    InvalidState(Violation),

    #[error("malformed state: {0}")]
    Malformed(String),

    #[error("degenerate evolution: {0}")]
    DegenerateEvolution(String),

    #[error("non-generic data: {0}")]
    NonGeneric(String),

    #[error("singular curve: {0}")]
    SingularCurve(String),

    #[error("requires M < N (got N={period}, M={layers})")]
    RequiresMLessThanN { period: usize, layers: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

impl Error {
    /// True for failures that a fresh random draw is expected to cure.
    pub fn is_non_generic(&self) -> bool {
        matches!(
            self,
            Error::NonGeneric(_) | Error::DegenerateEvolution(_) | Error::SingularCurve(_)
        )
    }
}
