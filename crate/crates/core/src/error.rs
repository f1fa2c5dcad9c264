use thiserror::Error;

/// Errors raised by the simulators.
///
/// Variant names are part of the command-line contract: the harness reports
/// numerical failures by [`Error::name`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {requested} exceeds the configured maximum {max}")]
    DimensionTooLarge { requested: usize, max: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("state norm {norm} differs from 1")]
    NotNormalized { norm: f64 },
    #[error("non-finite entry in matrix or state")]
    NonFinite,
    #[error("mean energy is zero, relative fluctuation undefined")]
    ZeroMeanEnergy,
    #[error("need at least two distinct N values to fit a slope")]
    InsufficientPoints,
    #[error("invalid bath sector S={sector} for N={n_spins}")]
    InvalidSector { sector: i64, n_spins: usize },
    #[error("Fock truncation leakage {leakage:.3e} exceeds {tolerance:.1e} (fock_dim={fock_dim})")]
    TruncationLeakage {
        leakage: f64,
        tolerance: f64,
        fock_dim: usize,
    },
    #[error("quadrature under-resolved: {nodes_per_period:.2} nodes per period, need {required}")]
    QuadratureUnderResolved {
        nodes_per_period: f64,
        required: usize,
    },
    #[error("adaptive quadrature failed to converge on [{a}, {b}]")]
    QuadratureError { a: f64, b: f64 },
    #[error("Abel parameter must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("averaging window must be positive, got {0}")]
    InvalidWindow(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// The variant name, as reported on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionTooLarge { .. } => "DimensionTooLarge",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::NonFinite => "NonFinite",
            Error::ZeroMeanEnergy => "ZeroMeanEnergy",
            Error::InsufficientPoints => "InsufficientPoints",
            Error::InvalidSector { .. } => "InvalidSector",
            Error::TruncationLeakage { .. } => "TruncationLeakage",
            Error::QuadratureUnderResolved { .. } => "QuadratureUnderResolved",
            Error::QuadratureError { .. } => "QuadratureError",
            Error::InvalidEpsilon(_) => "InvalidEpsilon",
            Error::InvalidWindow(_) => "InvalidWindow",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TruncationLeakage { .. }
                | Error::QuadratureUnderResolved { .. }
                | Error::QuadratureError { .. }
                | Error::ZeroMeanEnergy
                | Error::NotHermitian { .. }
                | Error::NonFinite
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
