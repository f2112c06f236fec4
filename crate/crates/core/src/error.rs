use alloc::string::String;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input lies outside the documented parameter domain.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// The argument is valid but the result is not representable (overflow),
    /// or the point lies outside the region where an expression is defined.
    #[error("range error: {0}")]
    Range(String),
    /// An iterative or adaptive procedure did not reach its tolerance.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
    /// Two Mellin expressions have disjoint strips of validity.
    #[error("empty strip intersection")]
    EmptyStrip,
    /// An internal cross-check failed (for example an existence verdict that
    /// violates the Janson necessary condition).
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! param_err {
    ($($arg:tt)*) => {
        $crate::Error::Parameter(alloc::format!($($arg)*))
    };
}
pub(crate) use param_err;
