use thiserror::Error;

/// Failures raised anywhere in the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver did not converge for N={n}, gamma={gamma}, h={h}: {reason}")]
    Eigensolver {
        n: usize,
        gamma: f64,
        h: f64,
        reason: String,
    },

    #[error("density matrix violates invariants: {0}")]
    InvalidDensity(String),

    #[error("closed form is singular at h={h} (critical point)")]
    CriticalPoint { h: f64 },

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("non-finite value at h={h}, delta={delta}: {what}")]
    NonFinite { h: f64, delta: f64, what: String },

    #[error("at h={h}: {source}")]
    AtPoint {
        h: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at(self, h: f64) -> Self {
        Error::AtPoint {
            h,
            source: Box::new(self),
        }
    }
}
