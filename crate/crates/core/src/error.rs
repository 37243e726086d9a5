use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: unknown quantifier `{token}`")]
    UnknownQuantifier { line: usize, token: String },

    #[error("line {line}: duplicate annotation for ({concept}, {feature})")]
    DuplicatePair {
        line: usize,
        concept: String,
        feature: String,
    },

    #[error("line {line}: expected at least {expected} fields, found {found}")]
    TooFewFields {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: expected {expected} vector components, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: invalid number `{token}`")]
    InvalidNumber { line: usize, token: String },

    #[error("unknown concept `{0}`")]
    UnknownConcept(String),

    #[error("no embedding for `{0}`")]
    MissingEmbedding(String),

    #[error("cosine similarity is undefined for a zero-norm vector")]
    UndefinedSimilarity,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(
        "no test concept produced a defined score ({undefined} undefined, {coverage} without coverage)"
    )]
    NoDefinedScores { undefined: usize, coverage: usize },

    #[error("method `{method}` failed on every run: {reason}")]
    MethodUnusable { method: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
