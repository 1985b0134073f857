use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("exact independence number requested for {nodes} nodes, limit is {limit}")]
    SizeLimitExceeded { nodes: usize, limit: usize },

    #[error("node {node} in the variance subset has no self-loop")]
    InvalidSubset { node: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("q = {0} is outside the admissible range (0, 1 - 1e-6]")]
    DomainError(f64),

    #[error("FTRL root-finder did not converge after {iterations} iterations (residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },

    #[error("non-finite cumulative loss at index {0}")]
    NonFiniteInput(usize),

    #[error("node {0} has no self-loop; the basic estimator is undefined there")]
    MissingSelfLoop(usize),

    #[error("feedback graph is not strongly observable")]
    NotStronglyObservable,

    #[error("observation probability of node {node} is {prob:e}")]
    DegenerateProbability { node: usize, prob: f64 },

    #[error("malformed graph file, line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("round {round}: {source}")]
    Round { round: usize, source: Box<Error> },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
