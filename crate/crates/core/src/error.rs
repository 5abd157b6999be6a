use thiserror::Error;

/// Errors raised by every operation in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input exceeds a fixed in-memory or search capacity.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// Parameters outside the admissible range of an operation.
    #[error("out of range: {0}")]
    Range(String),
    /// Malformed matrix, row or table dimensions.
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("duplicate orthogonal-array row {0}")]
    DuplicateRow(String),
    /// The work estimate or wall-clock limit of a census was exceeded.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    /// A formula was evaluated at a singular point.
    #[error("domain error: {0}")]
    Domain(String),
    /// A generating-function coefficient had an unexpected form.
    #[error("structure error: {0}")]
    Structure(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable identifier used in machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Capacity(_) => "CapacityError",
            Error::Range(_) => "RangeError",
            Error::Shape(_) => "ShapeError",
            Error::DuplicateRow(_) => "DuplicateRow",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::Domain(_) => "DomainError",
            Error::Structure(_) => "StructureError",
            Error::Parse(_) => "ParseError",
            Error::Io(_) => "IoError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
