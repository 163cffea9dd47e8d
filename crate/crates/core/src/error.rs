use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field defined on a different grid")]
    GridMismatch,

    #[error("field has {got} values, grid expects {expected}")]
    FieldLength { expected: usize, got: usize },

    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },

    #[error("unsupported norm exponent p = {0} (supported: 1, 2, inf)")]
    UnsupportedNorm(f64),

    #[error("unsupported Sobolev order s = {0} (supported: 0..=4)")]
    UnsupportedSobolev(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vacuum: {quantity} = {value:e} at grid index {index} is below the admissibility floor")]
    Vacuum {
        quantity: &'static str,
        index: usize,
        value: f64,
    },

    #[error("alignment weight must be positive, found {value:e} at grid index {index}")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("state formulation mismatch: expected {expected}, found {found}")]
    Formulation {
        expected: &'static str,
        found: &'static str,
    },

    #[error("trajectory has {0} states, at least 2 required")]
    TrajectoryTooShort(usize),

    #[error("beta = {beta} violates the equivalence band at t = {time}: |beta * cross| = {lhs:e} > e_hs / 2 = {rhs:e}; shrink beta")]
    BetaTooLarge {
        beta: f64,
        time: f64,
        lhs: f64,
        rhs: f64,
    },

    #[error("picard iterates do not share a time mesh")]
    MeshMismatch,

    #[error("configuration invalid:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("snapshot format: {0}")]
    Snapshot(String),

    #[error("series format: {0}")]
    Series(String),

    #[error("{path}: {source}")]
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
}
