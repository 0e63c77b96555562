use thiserror::Error;

use crate::mr::PathDiagnostics;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too small: n_grid = {n_grid} must exceed twice the degree {degree}")]
    GridTooSmall { n_grid: usize, degree: usize },

    #[error("invalid grid size {0}: must be a power of two and at least 8")]
    InvalidGrid(usize),

    #[error("polynomial is not strictly positive on the grid (min {min:e} at theta = {theta})")]
    NotPositive { theta: f64, min: f64 },

    #[error("spectral factor has a root with modulus {modulus} too close to the unit circle")]
    RootNearCircle { modulus: f64 },

    #[error("autocorrelation sequence is not positive definite (failed at lag {lag})")]
    NotPosDef { lag: usize },

    #[error("invalid autocorrelation sequence: {0}")]
    InvalidAutocov(String),

    #[error("series of length {len} is too short for {lags} lags")]
    SeriesTooShort { len: usize, lags: usize },

    #[error("Lagrange vector is outside the positive cone (min {min:e} on the grid)")]
    NotInCone { min: f64 },

    #[error("solver did not converge after {} iterations (residual {:e})", .0.iterations, .0.final_residual())]
    NoConvergence(Box<PathDiagnostics>),

    #[error("linear system is singular")]
    SingularSystem,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
