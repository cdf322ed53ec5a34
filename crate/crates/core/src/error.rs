use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("{what} out of the supported range: {reason}")]
    OutOfRange { what: &'static str, reason: String },

    #[error("no bound-state scale available (gap estimate {gap}); supply an explicit axial extent")]
    NoDecayScale { gap: f64 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    /// The shifted matrix is singular to working precision. Retrying with the
    /// threshold multiplied by `1 - 1e-9` is the expected recovery.
    #[error("factorization broke down at shift {shift} (pivot {pivot:e} at row {row})")]
    FactorizationBreakdown { shift: f64, row: usize, pivot: f64 },

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("inertia mismatch: factorization counts {certified} eigenvalues below {threshold}, solver found {found}")]
    InertiaMismatch {
        threshold: f64,
        certified: usize,
        found: usize,
    },

    #[error("quadrature did not converge after {intervals} intervals (error estimate {estimate:e})")]
    Quadrature { intervals: usize, estimate: f64 },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }

    pub(crate) fn out_of_range(what: &'static str, reason: impl Into<String>) -> Self {
        Error::OutOfRange {
            what,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::FactorizationBreakdown { .. }
                | Error::NoConvergence(_)
                | Error::InertiaMismatch { .. }
                | Error::Quadrature { .. }
        )
    }
}
