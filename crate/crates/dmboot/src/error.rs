use thiserror::Error;

/// Errors produced by the statistical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The sample is too short for the requested operation.
    #[error("sample too small: need n >= {min}, got n = {got}")]
    SampleTooSmall { min: usize, got: usize },

    /// Kernel and sample dimensions are incompatible.
    #[error("kernel `{kernel}` requires {requirement}, sample has d = {got}")]
    DimensionMismatch {
        kernel: String,
        requirement: String,
        got: usize,
    },

    /// A non-finite value was found in the input data.
    #[error("non-finite value in sample at row {row}, column {col}")]
    NonFiniteData { row: usize, col: usize },

    /// A kernel evaluation produced a non-finite value.
    #[error("kernel value not finite for observation pair ({i}, {j})")]
    NonFiniteKernel { i: usize, j: usize },

    /// An observation-index range fell outside the sample.
    #[error("index range {start}..{end} out of bounds for n = {n}")]
    IndexRange { start: usize, end: usize, n: usize },

    /// A Monte Carlo replicate failed; the index identifies which one.
    #[error("monte carlo replicate {rep}: {source}")]
    Replicate {
        rep: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
