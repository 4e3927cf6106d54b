use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid element: expected {expected} coordinates, got {got}")]
    InvalidElement { expected: usize, got: usize },

    #[error("coordinate overflow in group arithmetic")]
    Overflow,

    #[error("invalid generating set: {0}")]
    InvalidGenerators(String),

    #[error("cannot parse group `{input}`: {reason}")]
    GroupParse { input: String, reason: String },

    #[error("ball of radius {radius} exceeds the vertex cap of {cap}")]
    ResourceCap { radius: u32, cap: usize },

    #[error("interior vertex set is empty")]
    EmptyOmega,

    #[error("interior vertex set is disconnected: {first:?} and {second:?} lie in different components")]
    Disconnected { first: Vec<i64>, second: Vec<i64> },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("interior Laplacian block is singular (pivot {pivot} at row {row})")]
    SingularInterior { row: usize, pivot: f64 },

    #[error("eigensolver did not converge: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("oracle size cap exceeded: {size} vertices > {cap}")]
    OracleCap { size: usize, cap: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("theorem scope: {0}")]
    Scope(String),

    #[error("{family} n={n}: {source}")]
    Sweep {
        family: String,
        n: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Innermost error, looking through sweep annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Sweep { source, .. } => source.root(),
            other => other,
        }
    }
}
