use std::path::PathBuf;

/// Errors produced by the denoising toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("input too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("unsupported filter order {0}: order must be even and >= 2")]
    UnsupportedOrder(usize),

    #[error("invalid band ({low}, {high}): need 0 < low < high < 1")]
    Band { low: f64, high: f64 },

    #[error("degenerate envelope: {knots} knot(s)")]
    DegenerateEnvelope { knots: usize },

    #[error("empty IMF selection")]
    EmptySelection,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("noise covariance is zero: SNR is unbounded")]
    ZeroNoise,

    #[error("signal weaker than noise: top eigenvalues {signal_eig} (signal) <= {noise_eig} (noise)")]
    SignalWeakerThanNoise { signal_eig: f64, noise_eig: f64 },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("serialization error: {0}")]
    Serialize(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
