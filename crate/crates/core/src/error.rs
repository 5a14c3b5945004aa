//! Error types shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Anything that can go wrong while building, storing or querying a model.
#[derive(Debug, Error)]
pub enum Error {
    /// File could not be read or written.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Input text could not be decoded. `context` pins down where.
    #[error("parse error ({context}): {message}")]
    Parse { context: String, message: String },

    /// A structural invariant does not hold.
    #[error("invariant violated: {0}")]
    Validation(String),

    /// A data row that cannot be processed (zero norm, coincides with the mean, ...).
    #[error("degenerate input at row {row}: {message}")]
    DegenerateInput { row: usize, message: String },

    /// Inverse stereographic projection is undefined too close to the pole.
    #[error("row {row} is within the pole cutoff; inverse projection is undefined there")]
    PoleSingularity { row: usize },

    /// The active-set iteration ran out of iterations.
    #[error("solver did not converge after {iterations} iterations (kkt residual {kkt_residual:.3e})")]
    SolverFailure {
        iterations: usize,
        kkt_residual: f64,
        /// Best feasible iterate found so far.
        best: Vec<f64>,
    },

    /// A per-point failure during training, with the place it happened.
    #[error("training failed at epoch {epoch}, point {point}: {source}")]
    Training {
        epoch: usize,
        point: usize,
        #[source]
        source: Box<Error>,
    },

    /// A coefficient vector with no entry above the activation threshold.
    #[error("point {point} has an empty support; nothing to extract")]
    EmptySupport { point: usize },

    /// Operation needs at least one simplex.
    #[error("model contains no simplices")]
    EmptyModel,

    /// A configuration field is out of range.
    #[error("bad configuration: {0}")]
    Config(String),

    /// Sampling from the model is impossible in the current state.
    #[error("synthesis failed: {0}")]
    Synthesis(String),

    /// Pose recovery failed on every simplex.
    #[error("pose estimation failed: {0}")]
    Estimation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
