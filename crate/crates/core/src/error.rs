use thiserror::Error;

/// Errors raised by the library. Law violations are never errors; they are
/// collected into a [`LawReport`](crate::report::LawReport).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("state is not among the declared states: {0}")]
    UnknownState(String),
    #[error("duplicate element in finite set: {0}")]
    DuplicateElement(String),
    #[error("enumeration of {count} instances exceeds the budget of {cap}")]
    SizeLimit { count: u128, cap: u64 },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("finite-state certificate missing")]
    MissingCertificate,
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("not a search-algebra: {0}")]
    NotSearchAlgebra(String),
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: undeclared variable `{name}`")]
    UndeclaredVariable {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("{line}:{column}: type error: {message}")]
    Type {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("store does not match the program declarations: {0}")]
    StoreMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
