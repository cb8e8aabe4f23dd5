use num_complex::Complex64;
use thiserror::Error;

use crate::quad::EvalResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the admissible region of an operation.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    #[error("{function} has a pole at {at}")]
    Pole { function: &'static str, at: Complex64 },

    #[error("unsupported case in {op}: {reason}")]
    Unsupported { op: &'static str, reason: String },

    /// The quadrature could not reach its target; `best` holds the last estimate.
    #[error("accuracy target not met in {op}: {reason} (best estimate {value}, abs_err {abs_err:.3e})", value = best.value, abs_err = best.abs_err)]
    Accuracy {
        op: &'static str,
        reason: String,
        best: Box<EvalResult>,
    },

    /// A caller-declared tail envelope did not hold.
    #[error("tail envelope violated in {op}: {reason}")]
    Contract { op: &'static str, reason: String },

    #[error("no representation covers s = {0}")]
    Router(Complex64),

    #[error("internal consistency check failed in {op}: {reason}")]
    Consistency { op: &'static str, reason: String },
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            op,
            reason: reason.into(),
        }
    }

    /// True for the error classes that are caused by the input point rather
    /// than by numerics.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. } | Error::Pole { .. } | Error::Unsupported { .. } | Error::Router(_)
        )
    }
}
