use thiserror::Error;

/// Errors raised by the lattice maps, schemes and analyses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or input shape violates an operation's precondition.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A value left the domain where the scheme is defined (non-positive
    /// concentration, step-size underflow, non-finite value).
    #[error("numeric domain error: {0}")]
    Domain(String),

    /// An integer result left the overflow guard band.
    #[error("integer guard exceeded: |{value}| > 2^40")]
    Overflow { value: i64 },

    /// A cellular-automaton layer holds a value outside {0, 1}.
    #[error("non-binary cell {value} at (j={j}, k={k})")]
    NonBinary { j: usize, k: usize, value: i64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
