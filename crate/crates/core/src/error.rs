use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain the operation accepts.
    #[error("invalid argument `{name}`: {reason}")]
    Argument { name: &'static str, reason: String },

    /// The requested grid resolution cannot be used (too coarse or too large).
    #[error("resolution error: {0}")]
    Resolution(String),

    /// A restricted measure would carry no mass at all.
    #[error("degenerate support: {0}")]
    DegenerateSupport(String),

    /// A transport instance exceeds the integer or memory budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// No feasible transport plan exists under the requested constraints.
    #[error("infeasible transport problem: {0}")]
    Infeasible(String),

    /// A verifier precondition does not hold on the supplied inputs.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Malformed text input (point files, plan files).
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

impl Error {
    pub(crate) fn arg(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Argument {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical machinery rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Resolution(_) | Error::DegenerateSupport(_) | Error::Budget(_) | Error::Infeasible(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
