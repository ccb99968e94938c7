use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Bernoulli discrepancy needs `G·m/b < 1` and `G·(1-m)/(1-b) < 1`.
    #[error("bernoulli infeasible: G={g} at (m={m}, b={b})")]
    BernoulliInfeasible { g: f64, m: f64, b: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Chain pruning could not keep a node within its configured capacity.
    #[error("interval chain overflow: {len} entries exceed capacity {cap}")]
    ChainOverflow { len: usize, cap: usize },

    #[error("input of size {n} exceeds the oracle cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    /// A relative approximation was requested over a region touching the zero set.
    #[error("degenerate request: {0}")]
    Degenerate(String),

    #[error("{path}: line {line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("row {row}, column '{column}': {msg}")]
    Validation { row: usize, column: String, msg: String },

    /// Reading or writing a named file failed.
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
