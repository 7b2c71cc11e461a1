use thiserror::Error;

use crate::logic::Atom;

/// Syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),
    #[error("atom `{0}` has no value in the assignment")]
    UnassignedAtom(Atom),
    #[error("renaming is not injective at `{0}` -> `{1}`")]
    NonInjectiveRenaming(Atom, Atom),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("syntax error at {0}")]
    Syntax(#[from] ParseError),
    #[error("background theory is inconsistent")]
    InconsistentBackground,
    #[error("atom `{0}` uses the reserved `__` prefix")]
    ReservedAtom(Atom),
    #[error("default name `{0}` is used more than once")]
    DuplicateName(String),
    #[error("invalid default name `{0}`")]
    InvalidName(String),
    #[error("more than one background statement")]
    DuplicateBackground,
}

/// Errors raised by the process engine and everything built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("default index {index} out of range for a theory with {len} defaults")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("default index {0} occurs twice in the sequence")]
    DuplicateStep(usize),
    #[error("the sequence is not a process of the theory")]
    NotAProcess,
    #[error("the process is not successful")]
    NotSuccessful,
    #[error("search cap of {0} explored prefixes exceeded")]
    ResourceLimit(usize),
    #[error("semantics `{semantics}` requires a normal theory")]
    RequiresNormal { semantics: String },
    #[error("greedy construction stuck at a successful, non-closed process {0:?}")]
    Stuck(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("semantics `{0}` has no check generator")]
    UnsupportedSemantics(String),
    #[error("the theory has no extension under the chosen semantics")]
    NoExtension,
    #[error("formula F mentions reserved atom `{0}`")]
    ReservedInF(Atom),
    #[error("source theory mentions reserved atom `{0}`")]
    ReservedInSource(Atom),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("size guard violated: {0}")]
    Guard(String),
    #[error("the theory has no extension under the chosen semantics")]
    NoExtension,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
}
