use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("time series must contain at least one sample")]
    EmptySeries,
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("window length {window} is invalid (must be at least 2)")]
    InvalidWindow { window: usize },
    #[error("subsequence [{start}, {start} + {length}) exceeds series length {series_len}")]
    OutOfBounds {
        start: usize,
        length: usize,
        series_len: usize,
    },
    #[error("query length {query} exceeds series length {series}")]
    QueryTooLong { query: usize, series: usize },
    #[error("window {window} exceeds the shortest series length {max}")]
    WindowTooLarge { window: usize, max: usize },
    #[error("group fraction {0} must lie in (0, 1]")]
    InvalidFraction(f64),
    #[error("noise standard deviation {0} must be finite and non-negative")]
    InvalidSigma(f64),
    #[error("tolerance {0} must be finite and non-negative")]
    InvalidEpsilon(f64),
    #[error("percentile gap {0} must lie in (0, 50)")]
    InvalidPercentileGap(f64),
    #[error("degenerate series: {0}")]
    DegenerateSeries(&'static str),
    #[error("no motif positions fell below the percentile threshold")]
    EmptyMotifSet,
    #[error("index {index} is outside [0, {max}]")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidParams(&'static str),
    #[error("series length {actual} is too short; at least {required} samples are needed")]
    LengthTooShort { required: usize, actual: usize },
    #[error("maximum lag {max_lag} must be at least 1 and below {limit}")]
    LagTooLarge { max_lag: usize, limit: usize },
    #[error("confusion counts are all zero")]
    EmptyCounts,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}
