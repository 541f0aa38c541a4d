//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide error enum.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Two operands act on different numbers of qubits.
    #[error("qubit count mismatch in {context}: {left} vs {right}")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    /// A dense computation would exceed the configured qubit budget.
    #[error(
        "{context} needs {requested} qubits but the dense limit is {limit} \
             (set ACCREDIA_MAX_QUBITS to raise the state limit)"
    )]
    Capacity {
        context: &'static str,
        requested: usize,
        limit: usize,
    },

    /// An argument is outside its documented range.
    #[error("invalid parameter `{name}`: {message}")]
    Parameter { name: &'static str, message: String },

    /// Text or JSON input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// The Hamiltonian contains no non-identity term, so no inversion set exists.
    #[error("nothing to invert: Hamiltonian has no non-identity term")]
    NothingToInvert,

    /// A circuit fails a structural precondition of the simulator.
    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),
}

impl Error {
    pub(crate) fn parameter(name: &'static str, message: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
