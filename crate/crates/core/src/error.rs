use thiserror::Error;

/// Errors produced by the precession toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: asymmetry {asymmetry:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("matrix is not unitary: deviation {deviation:.3e} from identity")]
    NotUnitary { deviation: f64 },

    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized: deviation {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    #[error("density matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pair does not precess uniformly: residual {residual:.3e} exceeds {tolerance:.3e}")]
    BrokenPrecession { residual: f64, tolerance: f64 },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("operation not supported for family `{family}`: {reason}")]
    UnsupportedFamily { family: String, reason: String },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
