use thiserror::Error;

/// Failures raised anywhere in the bound pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated its documented domain.
    #[error("invalid {field}: {reason}")]
    Validation { field: &'static str, reason: String },

    /// A quadrature could not reach its tolerance. Carries the best estimate.
    #[error("{context}: quadrature did not converge (estimate {estimate:.6e}, error {error:.3e}, tolerance {tolerance:.3e})")]
    Accuracy {
        context: String,
        estimate: f64,
        error: f64,
        tolerance: f64,
    },

    /// A rapidity curve does not extend far enough for the requested weight.
    #[error("rapidity curve covers eta <= {available} but eta_max >= {required} is required")]
    Range { required: f64, available: f64 },

    /// A computed quantity left the range that the mathematics allows.
    #[error("numerical consistency violated: {0}")]
    Consistency(String),

    /// The operator-norm factor overflowed for this variance.
    #[error("norm factor exp(pi^2 / 2 zeta) overflows for zeta = {zeta:e}")]
    Overflow { zeta: f64 },

    /// No point of the variance search produced a finite envelope.
    #[error("minimization failed: {0}")]
    Minimization(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn validation(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag, used as the `status` column of result files.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Validation { .. } => "validation",
            Error::Accuracy { .. } => "accuracy",
            Error::Range { .. } => "range",
            Error::Consistency(_) => "consistency",
            Error::Overflow { .. } => "overflow",
            Error::Minimization(_) => "minimization",
            Error::Io(_) => "io",
        }
    }

    /// True for failures that come from numerics rather than from bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::Validation { .. } | Error::Io(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects non-finite or non-positive values.
pub(crate) fn require_positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::validation(
            field,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

pub(crate) fn require_finite(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::validation(field, format!("must be finite, got {value}")))
    }
}
