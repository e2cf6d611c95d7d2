use thiserror::Error;

/// Errors raised by the numeric core.
///
/// Each variant maps onto one CLI exit class (see [`Error::exit_code`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("overflow in {op}: {detail}")]
    Overflow { op: &'static str, detail: String },

    #[error("invalid construction of {what}: {detail}")]
    Construction { what: &'static str, detail: String },

    #[error("horizon too short: need {needed}, have {available}")]
    Horizon { needed: usize, available: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("precision cap exceeded: {0}")]
    PrecisionCap(String),

    #[error("no convergence after {iters} iterations; last interval [{lower}, {upper}]")]
    NonConvergence { iters: usize, lower: f64, upper: f64 },

    #[error("zero sequence has no norm ratio")]
    ZeroSequence,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { op, detail: detail.into() }
    }

    pub(crate) fn construction(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Construction { what, detail: detail.into() }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            Error::Config(_) => 2,
            Error::Domain { .. }
            | Error::Overflow { .. }
            | Error::Construction { .. }
            | Error::Horizon { .. }
            | Error::Hypothesis(_)
            | Error::ZeroSequence => 3,
            Error::PrecisionCap(_) => 4,
            Error::NonConvergence { .. } => 5,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
