use thiserror::Error;

/// Errors produced by graph construction, dynamics, statistics and the
/// exact oracle.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("graph size mismatch: {left} vs {right} nodes")]
    SizeMismatch { left: usize, right: usize },

    #[error("node {node} out of range for graph on {n} nodes")]
    NodeOutOfRange { node: u32, n: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(u32),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(u32, u32),

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    MalformedLine {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("not enough non-edges: need {needed}, graph has {available}")]
    InsufficientNonEdges { needed: usize, available: usize },

    #[error("empty seed set")]
    EmptySeedSet,

    #[error("no eligible edge to draw seeds from")]
    NoEligibleEdge,

    #[error("confidence interval undefined: {uncensored} uncensored sample(s), need at least 2")]
    UndefinedCi { uncensored: usize },

    #[error("log-log regression needs at least 3 strictly positive points")]
    BadRegressionInput,

    #[error("graph too large for exact computation: n = {n}, limit {limit}")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("exact computation requires {0}")]
    OracleUnsupported(String),

    #[error("condition {condition}: {source}")]
    Condition {
        condition: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wrap an error with the experiment condition it occurred in.
    pub fn in_condition(self, condition: &str) -> Error {
        Error::Condition {
            condition: condition.to_string(),
            source: Box::new(self),
        }
    }
}
