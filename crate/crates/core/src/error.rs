use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("eigenvector matrix is numerically singular (condition estimate {condition:.3e})")]
    DefectiveMatrix { condition: f64 },
    #[error("matrix is singular (smallest/largest singular value ratio {ratio:.3e})")]
    SingularMatrix { ratio: f64 },
    #[error("matrix is not positive definite (smallest/largest eigenvalue {min_eig:.3e}/{max_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64, max_eig: f64 },
    #[error("matrix is not Hermitian (relative residual {residual:.3e}) at t = {t}")]
    NotHermitian { residual: f64, t: f64 },
    #[error("invalid metric weight {value} at index {index}")]
    InvalidWeights { index: usize, value: f64 },
    #[error("assembled metric failed its invariants: {reason}")]
    PositivityFailure { reason: String },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("overlap <Psi|Phi> is numerically zero ({overlap:.3e})")]
    DegenerateOverlap { overlap: f64 },
    #[error("state became non-finite or exceeded 1e12 at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("spectrum is not real (max |Im| = {max_imag:.3e})")]
    ExpectsRealSpectrum { max_imag: f64 },
    #[error("random sampler exhausted {attempts} attempts without meeting the condition cap")]
    ResampleExhausted { attempts: usize },
    #[error("Schur iteration did not converge")]
    NoConvergence,
    #[error("unknown {kind} '{name}'")]
    UnknownStrategy { kind: &'static str, name: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable variant name, used on diagnostic output.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DefectiveMatrix { .. } => "DefectiveMatrix",
            Error::SingularMatrix { .. } => "SingularMatrix",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::InvalidWeights { .. } => "InvalidWeights",
            Error::PositivityFailure { .. } => "PositivityFailure",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DegenerateOverlap { .. } => "DegenerateOverlap",
            Error::NonFiniteState { .. } => "NonFiniteState",
            Error::ExpectsRealSpectrum { .. } => "ExpectsRealSpectrum",
            Error::ResampleExhausted { .. } => "ResampleExhausted",
            Error::NoConvergence => "NoConvergence",
            Error::UnknownStrategy { .. } => "UnknownStrategy",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
