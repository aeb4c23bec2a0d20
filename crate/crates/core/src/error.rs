use thiserror::Error;

use crate::graph::Vertex;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} exceeds the configured guard ({actual} > {limit})")]
    GuardExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("colouring is not proper: edge {0}-{1} is monochromatic")]
    Improper(Vertex, Vertex),

    /// Two vertices of one level share an upper neighbour but no lower one.
    #[error(
        "level structure fails at vertex {upper}: lower neighbours {first} and {second} \
         have no common neighbour one level further down"
    )]
    Structural {
        upper: Vertex,
        first: Vertex,
        second: Vertex,
    },

    #[error("transition matrix is not ergodic")]
    NonErgodic,

    #[error("bottleneck cut rejected: {0}")]
    InvalidCut(String),

    #[error("total variation distance within {gap:e} of 1/e at step {step}")]
    AmbiguousThreshold { step: usize, gap: f64 },

    #[error("distance to stationarity still above 1/e after {0} steps")]
    StepLimit(usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn guard(what: &'static str, actual: usize, limit: usize) -> Result<()> {
    if actual > limit {
        Err(Error::GuardExceeded {
            what,
            limit,
            actual,
        })
    } else {
        Ok(())
    }
}
