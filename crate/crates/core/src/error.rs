use std::io;

use thiserror::Error;

/// Errors raised by the analysis kernels, ingestion and reporting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series is empty")]
    EmptySeries,
    #[error("time stamps must be strictly increasing (offending stamp {0})")]
    UnorderedTimes(i64),
    #[error("non-finite value at time {0}")]
    NonFiniteValue(i64),
    #[error("times and values differ in length ({times} vs {values})")]
    ShapeMismatch { times: usize, values: usize },
    #[error("series have no time stamps in common")]
    EmptyIntersection,
    #[error("too few observations: need at least {needed}, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("all time stamps are equal")]
    DegenerateTime,
    #[error("smoothing window must be odd and positive, got {0}")]
    InvalidWindow(usize),
    #[error("input vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("input has zero variance")]
    ConstantInput,
    #[error("regressor has zero variance")]
    ConstantRegressor,
    #[error("series is constant; the unit-root regression is degenerate")]
    ConstantSeries,
    #[error("regression design matrix is singular")]
    SingularDesign,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("histogram needs at least one value and one bin")]
    EmptyHistogram,
    #[error("malformed line {line}: {reason}")]
    MalformedLine { line: u64, reason: String },
    #[error("sample of {sample_size} tokens exceeds corpus of {corpus_total}")]
    SampleTooLarge { sample_size: u64, corpus_total: u64 },
    #[error("count table is empty")]
    EmptyCounts,
    #[error("no year has a corpus of at least {min_corpus} tokens")]
    NoEligibleYears { min_corpus: u64 },
    #[error("column `{0}` not found in header")]
    MissingColumn(String),
    #[error("duplicate time stamp {0}")]
    DuplicateTime(i64),
    #[error("no usable rows")]
    NoRows,
    #[error("aligned overlap of {got} observations is below the floor of {needed}")]
    OverlapTooShort { needed: usize, got: usize },
    #[error("bad number `{value}` on row {row}")]
    BadNumber { row: u64, value: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with any context wrappers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// True when the data were well-formed but too short or degenerate for
    /// the requested statistic.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self.root(),
            Error::TooShort { .. }
                | Error::OverlapTooShort { .. }
                | Error::EmptyIntersection
                | Error::ConstantInput
                | Error::ConstantRegressor
                | Error::ConstantSeries
                | Error::SingularDesign
                | Error::DegenerateTime
                | Error::SampleTooLarge { .. }
                | Error::NoEligibleYears { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
