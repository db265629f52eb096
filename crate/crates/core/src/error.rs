use thiserror::Error;

/// Errors raised by the group, homology and bordism computations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown generator label `{0}`")]
    UnknownGenerator(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("subgroup is not cyclic")]
    NotCyclic,

    #[error("coset table is incomplete")]
    IncompleteTable,

    #[error("integer overflow during elimination; retry with a modular method")]
    Overflow,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("chain is not a cycle")]
    NotACycle,

    #[error("surface relator does not evaluate to the identity")]
    RelatorViolated,

    #[error("class evaluator unavailable: {0}")]
    EvaluatorUnavailable(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

/// Coarse error category, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Resource,
    Precondition,
    Internal,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Resource(_) | Error::Overflow => ErrorKind::Resource,
            Error::Syntax { .. }
            | Error::UnknownGenerator(_)
            | Error::Input(_)
            | Error::InvalidAction(_)
            | Error::IncompleteTable => ErrorKind::Input,
            Error::NotNormal
            | Error::NotCyclic
            | Error::Precondition(_)
            | Error::NotACycle
            | Error::RelatorViolated
            | Error::EvaluatorUnavailable(_) => ErrorKind::Precondition,
            Error::Internal(_) => ErrorKind::Internal,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
