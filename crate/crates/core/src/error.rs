use thiserror::Error;

/// Errors raised by the numerical routines and file readers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e} exceeds {tol:.3e})")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("completeness condition violated: defect {defect:.3e} exceeds {tol:.3e}")]
    CompletenessViolated { defect: f64, tol: f64 },

    #[error("B matrix has negative eigenvalue {eigenvalue:.6e}; parent map is not CP or the input state is correlated")]
    NegativeBEigenvalue { eigenvalue: f64 },

    #[error("model inconsistency at t = {t}, gamma1 = {gamma1}, gamma2 = {gamma2}: {detail}")]
    ModelInconsistency {
        t: f64,
        gamma1: f64,
        gamma2: f64,
        detail: String,
    },

    #[error("{field}: {message}")]
    Format { field: String, message: String },
}

impl Error {
    /// True for failures that report on the model itself rather than on malformed input.
    pub fn is_model_diagnostic(&self) -> bool {
        matches!(
            self,
            Error::CompletenessViolated { .. }
                | Error::NegativeBEigenvalue { .. }
                | Error::ModelInconsistency { .. }
                | Error::NoConvergence { .. }
        )
    }

    pub(crate) fn format(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
