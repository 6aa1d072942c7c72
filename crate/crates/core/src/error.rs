use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed document: {0}")]
    Document(String),

    #[error("negative entry {value} at row {row}, column {col}")]
    NegativeEntry { row: usize, col: usize, value: String },

    #[error("row {row} sums to {sum}, expected 1")]
    RowSum { row: usize, sum: String },

    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),

    #[error("parameter sets differ")]
    ParameterMismatch,

    #[error("channel is not a Markov matrix: {0}")]
    NotMarkov(String),

    #[error("invalid belief: {0}")]
    InvalidBelief(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("statistic is not elicitable with this experiment")]
    NotElicitable,

    #[error("weights are not unbiased for the statistic at parameter {0:?}")]
    NotUnbiased(String),

    #[error("sub-mechanism payoffs are not bounded in [0,1]: {0}")]
    Unbounded(String),

    #[error("payoff {0} lies outside [0,1]")]
    PayoffOutOfRange(String),

    #[error("outcome space has {size} elements, above the cap of {cap}")]
    TooManyOutcomes { size: usize, cap: usize },

    #[error("mechanism does not accept this report: {0}")]
    ReportMismatch(String),

    #[error("unknown outcome index {0}")]
    UnknownOutcome(usize),

    #[error("dominance does not hold: {0}")]
    NotDominated(String),

    #[error("{0}")]
    Domain(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
