use thiserror::Error;

/// Errors raised by constructors, evaluators and comparison engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid arguments or descriptors (domain violations, bad weights, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// An operation needs a derivative or other capability the object lacks.
    #[error("missing capability: {0}")]
    Capability(String),

    /// A Chebyshev pair degenerated (vanishing Wronskian or determinant).
    #[error("degenerate pair: {0}")]
    Degenerate(String),

    /// A non-finite value appeared while evaluating an integrand.
    #[error("evaluation failed at {location}: {message}")]
    Evaluation { location: String, message: String },

    /// Root finding or monotone inversion did not converge.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A bounded search ran out of budget without a decision.
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn evaluation(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Evaluation {
            location: location.into(),
            message: message.into(),
        }
    }

    /// True for caller mistakes, false for numeric or capability failures.
    pub fn is_input(&self) -> bool {
        matches!(self, Error::Input(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
