use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the estimation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter {value} outside [-2, 0)")]
    ThetaOutOfRange { value: f64 },

    #[error("orbit escaped the invariant set at index {index} (value {value})")]
    Escape { index: usize, value: f64 },

    #[error("negative radicand inverting the map at index {index} (radicand {radicand})")]
    InversionDomain { index: usize, radicand: f64 },

    #[error("refined cell {index} is empty")]
    EmptyRefinedCell { index: usize },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("sampling support is empty")]
    EmptySupport,

    #[error("truncation interval carries negligible normal mass")]
    NumericalUnderflow,

    #[error("no index has strength above {threshold}")]
    AnchorNotFound { threshold: u64 },

    #[error("maximizer at grid edge (index {index} of {points}); restart on a shifted or wider grid")]
    EdgeOfGrid { index: usize, points: usize },

    #[error("theta conditional is degenerate: every predecessor is zero")]
    DegenerateConditional,

    #[error("initial state infeasible at indices {indices:?}")]
    Infeasible { indices: Vec<usize> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
