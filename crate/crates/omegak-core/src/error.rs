use thiserror::Error;

/// Library-level failures. Every guard in the crate funnels into one of these
/// two kinds so callers (and the CLI exit-code mapping) can tell "input too
/// large for the enumeration budget" apart from "input outside the domain".
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// The request is well-formed but exceeds a hard capacity guard
    /// (enumeration space, table size, word width).
    #[error("capacity: {0}")]
    Capacity(String),
    /// The request violates a mathematical precondition (composite
    /// characteristic, zero polynomial, out-of-range parameter, bad text).
    #[error("domain: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn capacity(msg: impl Into<String>) -> Error {
    Error::Capacity(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
