use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input vector is empty")]
    Empty,
    #[error("entry {index} is negative or not finite ({value})")]
    NegativeEntry { index: usize, value: f64 },
    #[error("entry {index} exceeds 1 ({value})")]
    EntryAboveOne { index: usize, value: f64 },
    #[error("entries sum to {sum}, expected 1")]
    SumNotOne { sum: f64 },
    #[error("entries sum to {sum}, which exceeds 1")]
    SumExceedsOne { sum: f64 },
    #[error("joint table is ragged or empty")]
    MalformedTable,
    #[error("parameter {name} = {value} is out of range ({expected})")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("sample value {value} lies outside the model support")]
    SampleOutsideSupport { value: i64 },
    #[error("model has {0} parameters; only scalar parameters can be fitted")]
    UnsupportedDimension(usize),
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),
    #[error("k = {k} segments requested but only {occupied} gray levels are occupied")]
    InfeasibleK { k: usize, occupied: usize },
    #[error("exhaustive search would enumerate {0} threshold vectors (limit 10^7)")]
    TooManyCombinations(u128),
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("bisection failed to converge: {0}")]
    NonConvergence(String),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("pixel data truncated: expected {expected} samples, found {found}")]
    TruncatedPixelData { expected: usize, found: usize },
    #[error("unsupported maxval {0} (must be 1..=255)")]
    UnsupportedMaxval(u32),
    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {column}: cannot parse {cell:?} as a number")]
    NonNumericCell {
        row: usize,
        column: usize,
        cell: String,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
