use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::volume::Dims;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("malformed header {path}: {source}")]
    Header {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("unsupported header field {field}: {value:?}")]
    HeaderField { field: &'static str, value: String },

    #[error("unknown dtype {0:?} (expected u8, u16 or f32)")]
    UnknownDtype(String),

    #[error("dimensions must be three positive counts, got {0:?}")]
    NonPositiveDims(Vec<i64>),

    #[error("raw file {path} is missing")]
    MissingRaw { path: PathBuf },

    #[error("raw file {path} is too short: {actual} bytes, expected {expected}")]
    RawTooShort {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    #[error("raw file {path} is too long: {actual} bytes, expected {expected}")]
    RawTooLong {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    #[error("data length {actual} does not match {dims} ({expected} voxels)")]
    DataLength {
        dims: Dims,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value at flat index {0}")]
    NonFinite(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimsMismatch(Dims, Dims),

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("geometry out of bounds: {0}")]
    OutOfBounds(String),

    #[error("ground truth needs both classes, found {positives} positive and {negatives} negative voxels")]
    DegenerateTruth { positives: u64, negatives: u64 },

    #[error("ground truth must be binary, found {value} at flat index {index}")]
    NonBinaryTruth { index: usize, value: f64 },

    #[error("no methods to tabulate")]
    EmptyMethodList,

    #[error("profile has no peak above its endpoint baseline")]
    NoPeak,

    #[error("profile never falls to half maximum on the {0} side")]
    UnboundedPeak(&'static str),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable category, one per failure class.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Header { .. } => "header-parse",
            Error::HeaderField { .. } => "header-field",
            Error::UnknownDtype(_) => "unknown-dtype",
            Error::NonPositiveDims(_) => "non-positive-dims",
            Error::MissingRaw { .. } => "missing-raw",
            Error::RawTooShort { .. } => "raw-too-short",
            Error::RawTooLong { .. } => "raw-too-long",
            Error::DataLength { .. } => "data-length",
            Error::NonFinite(_) => "non-finite",
            Error::DimsMismatch(..) => "dims-mismatch",
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::OutOfBounds(_) => "out-of-bounds",
            Error::DegenerateTruth { .. } => "degenerate-truth",
            Error::NonBinaryTruth { .. } => "non-binary-truth",
            Error::EmptyMethodList => "empty-method-list",
            Error::NoPeak => "no-peak",
            Error::UnboundedPeak(_) => "unbounded-peak",
            Error::Csv(_) => "csv",
        }
    }
}
