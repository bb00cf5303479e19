use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    /// Both sides of a composition carry a succedent formula.
    #[error("cannot compose sequents: both have a succedent")]
    Composition,

    #[error("{0} is not a sub-sequent of the instance conclusion")]
    Decomposition(String),

    #[error("proof search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),

    #[error("time limit exceeded")]
    Timeout,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("ill-formed derivation: {0}")]
    IllFormedDerivation(String),

    #[error("split does not partition the conclusion: {0}")]
    SplitMismatch(String),

    #[error("not a theorem: {0}")]
    NotATheorem(String),

    #[error("expression is already in normal form")]
    NormalForm,

    #[error("normalization step ceiling reached: {0}")]
    StepCeiling(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
