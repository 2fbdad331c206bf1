use thiserror::Error;

/// Errors shared across the crate.
///
/// Two broad classes matter to callers: precondition violations
/// (invalid parameters, uncertified requests) and numerical-ambiguity
/// failures (a computation ran but its answer cannot be trusted).
/// [`Error::is_ambiguity`] distinguishes them for exit-code mapping.
#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: f64, right: f64 },

    #[error("count at lambda={lambda} is not certified: slice cutoff is {cutoff}")]
    BeyondCutoff { lambda: f64, cutoff: f64 },

    #[error("ambiguous branch slope {slope}: neither flat nor near an even integer")]
    AmbiguousSlope { slope: f64 },

    #[error("quadrature self-check failed: {coarse} vs {fine} (tol {tol})")]
    QuadratureDisagreement { coarse: f64, fine: f64, tol: f64 },
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for errors that signal a numerically ambiguous result
    /// rather than bad input.
    pub fn is_ambiguity(&self) -> bool {
        matches!(
            self,
            Error::AmbiguousSlope { .. } | Error::QuadratureDisagreement { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
