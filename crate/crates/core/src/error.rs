use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A d'Alembertian symbol on a retained mode is too close to zero.
    #[error(
        "nonresonance violated at mode (j={j}, k={k}): |sigma| = {sigma:.3e} < {floor:.1e}; \
         horizon T = {horizon} is resonant, try T = {suggestion}"
    )]
    Nonresonance {
        j: usize,
        k: usize,
        sigma: f64,
        floor: f64,
        horizon: f64,
        suggestion: f64,
    },

    /// The working mode set is too small for the requested cutoff.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// The quadrature grid is too coarse for the retained modes.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Fixed-point iteration failed to contract within the iteration cap.
    #[error(
        "tail iteration did not contract after {iterations} iterations \
         (last step {last_step:.3e}, observed ratio {observed_ratio:.3}, theoretical {theoretical_ratio:.3})"
    )]
    NonContraction {
        iterations: usize,
        last_step: f64,
        observed_ratio: f64,
        theoretical_ratio: f64,
    },

    /// Newton/Picard on the bifurcation equation diverged or stalled.
    #[error("solver error: {message}; residual trace {trace:?}")]
    Solver { message: String, trace: Vec<f64> },

    /// Repeated eigenvalues in a spectrum that must be simple.
    #[error("degenerate spectrum: {0}")]
    Degenerate(String),

    /// Lanczos recursion produced a vanishing residual.
    #[error("ill-conditioned spectral data: recursion broke down at step {step} (norm {norm:.3e})")]
    Breakdown { step: usize, norm: f64 },

    #[error("uniqueness violation: {0}")]
    NotPersymmetric(String),

    #[error("infeasible chain: {0}")]
    Infeasible(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Integrator step is outside the stability guard.
    #[error("step-size error: dt * max frequency = {product:.4} exceeds {limit}")]
    StepSize { product: f64, limit: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// An error raised inside a pipeline stage.
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Stage { source, .. } => source.exit_code(),
            Error::Io { .. } => 4,
            Error::NonContraction { .. }
            | Error::Solver { .. }
            | Error::Breakdown { .. }
            | Error::Infeasible(_) => 3,
            _ => 2,
        }
    }
}
