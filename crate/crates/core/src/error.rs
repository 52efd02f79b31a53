//! Error type shared across the crate.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by callers to pick an exit code: bad input
/// data/parameters versus a computation that could not proceed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Compute,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}, line {line}: {message}")]
    MalformedInput {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("non-positive price for {ticker} at {date}: {value}")]
    NonPositivePrice {
        ticker: String,
        date: String,
        value: f64,
    },

    #[error("duplicate observation for {ticker} at {date}")]
    DuplicateObservation { ticker: String, date: String },

    #[error("missing observation for {ticker} at {date}")]
    MissingObservation { ticker: String, date: String },

    #[error("duplicate ticker {ticker}")]
    DuplicateTicker { ticker: String },

    #[error("no sector assignment for: {}", tickers.join(", "))]
    MissingSectors { tickers: Vec<String> },

    #[error("ticker {ticker} has unknown sector {sector} and no explicit color")]
    UnknownSector { ticker: String, sector: String },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("invalid correlation structure: {0}")]
    InvalidCorrelation(String),

    #[error("matrix is not a valid similarity matrix: {0}")]
    MatrixFormat(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },

    #[error("degenerate sample: all values identical")]
    DegenerateFit,

    #[error("candidate families mix density and quantized models")]
    MixedFamilies,

    #[error("split at {u} leaves a segment under {min_segment} of {len} values")]
    SegmentTooSmall {
        u: usize,
        len: usize,
        min_segment: usize,
    },

    #[error("no split produces a finite objective")]
    NoFeasibleSplit,

    #[error("similarity row sums to zero; penalty is undefined")]
    ZeroRowMean,

    #[error("need at least {need} positive degrees, got {got}")]
    TooFewDegrees { got: usize, need: usize },

    #[error("all degrees equal; log-log slope is undefined")]
    DegenerateDegrees,

    #[error("weights incident to node {node} sum to zero")]
    ZeroWeightSum { node: usize },

    #[error("node {node}: {source}")]
    Node {
        node: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. }
            | Error::Csv { .. }
            | Error::MalformedInput { .. }
            | Error::NonPositivePrice { .. }
            | Error::DuplicateObservation { .. }
            | Error::MissingObservation { .. }
            | Error::DuplicateTicker { .. }
            | Error::MissingSectors { .. }
            | Error::UnknownSector { .. }
            | Error::InvalidParam(_)
            | Error::InvalidCorrelation(_)
            | Error::MatrixFormat(_) => ErrorKind::Input,
            Error::LengthMismatch { .. }
            | Error::TooFewSamples { .. }
            | Error::DegenerateFit
            | Error::MixedFamilies
            | Error::SegmentTooSmall { .. }
            | Error::NoFeasibleSplit
            | Error::ZeroRowMean
            | Error::TooFewDegrees { .. }
            | Error::DegenerateDegrees
            | Error::ZeroWeightSum { .. } => ErrorKind::Compute,
            Error::Node { source, .. } => source.kind(),
        }
    }
}
