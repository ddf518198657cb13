use thiserror::Error;

use crate::words::WordError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coefficient of {word} requested but the series is truncated at length {trunc}")]
    QueryBeyondTruncation { word: String, trunc: usize },
    #[error("operand truncated at length {have}, product needs {need}")]
    TruncationMismatch { have: usize, need: usize },
    #[error("expected {expected} components, found {found}")]
    ComponentMismatch { expected: usize, found: usize },
    #[error("alphabet mismatch: x0..x{left} vs x0..x{right}")]
    AlphabetMismatch { left: u8, right: u8 },
    #[error("line {line}: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("line {line}: word {word} appears twice")]
    DuplicateWordError { line: usize, word: String },
    #[error("series is proper (zero constant term) and has no shuffle inverse")]
    ProperSeriesError,
    #[error("weight {weight} sweep changed the already fixed coefficient of {word}")]
    NonConvergence { weight: usize, word: String },
    #[error("operation needs a single-input single-output series, got m={m}, l={l}")]
    UnsupportedArity { m: usize, l: usize },
    #[error("cannot rescale to satisfy the precondition: {0}")]
    PreconditionUnsatisfiable(String),
    #[error("independent computations disagree: {0}")]
    OracleMismatch(String),
    #[error("input grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("feedback loop diverged after {iterations} iterations")]
    LoopDiverged { iterations: usize },
    #[error("level {level} read unsolved coefficient of {word}")]
    TriangularityViolation { level: usize, word: String },
    #[error("series order cap {cap} reached with tail estimate {tail:e}")]
    OrderCapExceeded { cap: usize, tail: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Variant name, as reported on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Error::QueryBeyondTruncation { .. } => "QueryBeyondTruncation",
            Error::TruncationMismatch { .. } => "TruncationMismatch",
            Error::ComponentMismatch { .. } => "ComponentMismatch",
            Error::AlphabetMismatch { .. } => "AlphabetMismatch",
            Error::SyntaxError { .. } => "SyntaxError",
            Error::DuplicateWordError { .. } => "DuplicateWordError",
            Error::ProperSeriesError => "ProperSeriesError",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::UnsupportedArity { .. } => "UnsupportedArity",
            Error::PreconditionUnsatisfiable(_) => "PreconditionUnsatisfiable",
            Error::OracleMismatch(_) => "OracleMismatch",
            Error::GridTooCoarse(_) => "GridTooCoarse",
            Error::LoopDiverged { .. } => "LoopDiverged",
            Error::TriangularityViolation { .. } => "TriangularityViolation",
            Error::OrderCapExceeded { .. } => "OrderCapExceeded",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

impl From<WordError> for Error {
    fn from(e: WordError) -> Self {
        Error::SyntaxError {
            line: 0,
            message: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
