use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: length mismatches, bad files, unknown names.
    #[error("input error: {0}")]
    Input(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// An operation that needs a nonzero or otherwise well-formed value got a
    /// degenerate one (zero polynomial, empty Hilbert function, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("budget exceeded: {required} candidates required, budget is {budget}")]
    Budget { required: u128, budget: u128 },

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The analytic bound predicted rank deficiency but exact arithmetic found
    /// full rank. Never expected; surfaced rather than hidden.
    #[error("bound falsified: {0}")]
    Falsified(String),

    #[error("points could not be covered: {0}")]
    Uncoverable(String),

    #[error("window too small: {message} (consistent prefix ends at s = {prefix_end})")]
    WindowTooSmall { message: String, prefix_end: u32 },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
