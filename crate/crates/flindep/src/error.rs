//! Crate-wide error type.
//!
//! Variants are grouped by where they surface: construction of the data
//! structures (grids, samples), statistical preconditions (rank, degenerate
//! variance), configuration of tests and scenarios, and data ingestion.
//! The CLI maps configuration problems to exit code 2 and data problems to
//! exit code 3; [`Error::exit_code`] encodes that split.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A curve, weight vector, or response vector does not match the expected length.
    #[error("length mismatch for {what}: expected {expected}, got {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    /// Grid points must be strictly increasing.
    #[error("grid points must be strictly increasing (violation at index {index})")]
    NonIncreasingGrid { index: usize },

    /// A grid needs at least two points to carry quadrature weights.
    #[error("grid needs at least 2 points, got {found}")]
    GridTooSmall { found: usize },

    /// Quadrature weights must be nonnegative and sum to the domain length.
    #[error("invalid quadrature weights: {reason}")]
    InvalidWeights { reason: String },

    /// A non-finite value (NaN or infinity) appeared where a real number is required.
    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    /// Sample-level precondition failed (size, alignment between parts).
    #[error("invalid sample: {reason}")]
    InvalidSample { reason: String },

    /// A decomposition was paired with a sample it was not built from.
    #[error("decomposition does not match sample: {reason}")]
    DecompositionMismatch { reason: String },

    /// Requested more components than the numerical rank provides.
    #[error("requested kn={requested} exceeds available components m={available}")]
    RankExceeded { requested: usize, available: usize },

    /// A variance that must be positive came out zero.
    #[error("degenerate variance: {what} is zero")]
    DegenerateVariance { what: &'static str },

    /// A slope curve that must be nonzero has zero norm.
    #[error("degenerate signal: slope curve has zero norm")]
    DegenerateSignal,

    /// Resampling produced only degenerate draws within the redraw budget.
    #[error("degenerate resamples: {attempts} consecutive redraws all had zero variance")]
    RedrawBudgetExhausted { attempts: u32 },

    /// Invalid test or scenario configuration. `problems` lists every violation.
    #[error("invalid configuration: {}", problems.join("; "))]
    Config { problems: Vec<String> },

    /// Malformed input data, with the location that failed to parse.
    #[error("data error in {source_name} (row {row}, column {column}): {reason}")]
    Data {
        source_name: String,
        row: usize,
        column: usize,
        reason: String,
    },

    /// I/O failure while reading or writing files.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// One-off configuration error with a single message.
    pub fn config(problem: impl Into<String>) -> Self {
        Error::Config {
            problems: vec![problem.into()],
        }
    }

    /// Process exit code the CLI uses for this error class.
    ///
    /// 2 for configuration problems, 3 for data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            Error::Data { .. } | Error::Io { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
