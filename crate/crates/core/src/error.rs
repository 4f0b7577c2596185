//! One error type for the whole engine.
//!
//! Falsified mathematical assertions (a witness that fails certification, a
//! claimed factorization that is not one) are kept distinct from plain input
//! errors so the CLI can map them to a different exit code.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a prime: {0}")]
    NonPrime(u64),
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("ring has no variables")]
    EmptyVariables,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("operands live in different rings")]
    RingMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("input is not homogeneous: {0}")]
    Inhomogeneous(String),
    #[error("module is not maximal Cohen-Macaulay")]
    NotMCM,
    #[error("Hilbert-Samuel samples did not stabilize to a polynomial within the sample cap; raise the cap and retry")]
    NoStabilization,
    #[error("middle term of the cover sequence is not free")]
    MiddleNotFree,
    #[error("wrong codimension: {0}")]
    WrongCodimension(String),
    #[error("ring carries no Gorenstein evidence")]
    NonGorensteinRing,
    #[error("witness failed certification: {0}")]
    UncertifiedWitness(String),
    #[error("no superficial element found after {0} random attempts")]
    SuperficialSamplingExhausted(u32),
    #[error("truncation order too small: {0}")]
    TruncationTooSmall(String),
    #[error("not a matrix factorization: {0}")]
    NotAFactorization(String),
    #[error("linking ideal is not contained in the target ideal")]
    QNotInsideI,
    #[error("linking ideal is not a complete intersection of the expected codimension")]
    QNotCI,
    #[error("element fails the parameter property: {0}")]
    ParameterPropertyFails(String),
    #[error("codimension mismatch: {0}")]
    CodimMismatch(String),
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// True for errors that record a *falsified mathematical claim* rather
    /// than bad input; the CLI exits with a dedicated code for these.
    pub fn is_falsified_assertion(&self) -> bool {
        matches!(
            self,
            Error::UncertifiedWitness(_) | Error::NotAFactorization(_) | Error::ParameterPropertyFails(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
