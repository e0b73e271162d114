use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("state vector has zero norm")]
    ZeroNorm,

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensity(String),

    #[error("numerical rank {rank} where rank {expected} was required")]
    Rank { rank: usize, expected: &'static str },

    #[error("state leaks outside the two-dimensional range (residual {0:.3e})")]
    Range(f64),

    #[error("SLOCC factor {index} has determinant {det} (expected 1)")]
    NotSpecialLinear { index: usize, det: String },

    #[error("matrix columns are not orthonormal (deviation {0:.3e})")]
    Isometry(f64),

    #[error("root structure {found} does not support {operation}")]
    Structure {
        found: String,
        operation: &'static str,
    },

    #[error("normalization is degenerate: no probe point away from the roots")]
    Degenerate,

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("invalid family specification: {0}")]
    Family(String),

    #[error("unknown measure `{0}` (expected concurrence, tangle or sqrt-tangle)")]
    UnknownMeasure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag, used by the CLI and the C interface.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension { .. } | Error::NotPowerOfTwo(_) | Error::QubitIndex { .. } => {
                "dimension"
            }
            Error::ZeroNorm | Error::InvalidDensity(_) => "invalid-state",
            Error::Rank { .. } => "rank",
            Error::Range(_) => "range",
            Error::NotSpecialLinear { .. } | Error::Isometry(_) => "invalid-operator",
            Error::Structure { .. } => "structure",
            Error::Degenerate => "degenerate",
            Error::Domain(_) => "domain",
            Error::Family(_) => "family",
            Error::UnknownMeasure(_) => "unknown-measure",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
