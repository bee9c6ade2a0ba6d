use thiserror::Error;

/// Errors raised by the samplers, oracles and verifiers in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` = {value} is out of domain (expected {expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("stream item must be a finite non-negative number, got {0}")]
    NegativeItem(f64),

    #[error("sampling probability must lie in (0, 1], got {0}")]
    InvalidProbability(f64),

    #[error("sampling rule demands probability {required:e}, below the supported floor {floor:e}")]
    ProbabilityUnderflow { required: f64, floor: f64 },

    #[error("sum / first item would reach {ratio}, exceeding the cap {cap}")]
    DeltaExceeded { ratio: f64, cap: f64 },

    #[error("relative error is undefined while the true sum is zero")]
    ZeroTrueSum,

    #[error("illegal move in round {round}: {reason}")]
    IllegalMove { round: usize, reason: String },

    #[error("trial {index} failed: {source}")]
    Trial {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("instance of size {size} exceeds the exact-oracle limit {limit}")]
    SizeLimit { size: usize, limit: usize },

    #[error("invalid hyperedge: {0}")]
    InvalidEdge(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("row {row}: entry {value} outside [-{bound}, {bound}]")]
    EntryOutOfBound { row: usize, value: i64, bound: i64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "a value in (0, 1)",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "a finite positive value",
        })
    }
}
