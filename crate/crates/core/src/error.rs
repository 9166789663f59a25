use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),

    #[error("the alphabet is empty")]
    EmptyAlphabet,

    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("line {line}: duplicate transition from `{state}` on `{symbol}`")]
    DuplicateTransition { line: usize, state: String, symbol: String },

    #[error("table is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },

    #[error("element {0} is not a two-sided identity")]
    BadIdentity(usize),

    #[error("monoid has no generator map")]
    NoGenerators,

    #[error("transition monoid exceeds the size cap of {cap} elements")]
    MonoidTooLarge { cap: usize },

    #[error("relation is not a congruence: classes of ({u}, {v}) do not determine the class of their product")]
    NotCongruence { u: usize, v: usize },

    #[error("congruence was computed for a different monoid")]
    ForeignCongruence,

    #[error("identity check too large: {assignments} assignments exceeds the cap of {cap}")]
    IdentityCheckTooLarge { assignments: u128, cap: u128 },

    #[error("combinatorial budget exceeded: {work} units of work exceeds the cap of {cap}")]
    BudgetExceeded { work: u128, cap: u128 },

    #[error("the level exceeds the search bound {bound}")]
    LevelBoundExceeded { bound: usize },

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Inconsistency(_) | Error::NotCongruence { .. } => 2,
            Error::MonoidTooLarge { .. }
            | Error::IdentityCheckTooLarge { .. }
            | Error::BudgetExceeded { .. }
            | Error::LevelBoundExceeded { .. } => 3,
            _ => 1,
        }
    }
}
