//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong while configuring or running a simulation.
#[derive(Debug, Error)]
pub enum Error {
    /// The solid indicator is empty: the body left the domain or its
    /// transport failed.
    #[error("solid indicator is empty (body left the domain or fell below grid resolution)")]
    SolidVanished,

    /// An explicit advection step was asked to run past its stability limit.
    #[error("CFL limit exceeded: max Courant number {courant:.4} > 1")]
    CflExceeded { courant: f64 },

    /// The solid centroid came too close to the domain boundary; the model
    /// assumes the body never contacts the walls.
    #[error("solid centroid within {clearance:.4e} of the domain boundary (limit {limit:.4e})")]
    BoundaryContact { clearance: f64, limit: f64 },

    /// An iterative linear solve hit its iteration cap before reaching the
    /// requested relative residual.
    #[error("linear solve failed: {iters} iterations, relative residual {residual:.4e} > tol {tol:.4e}")]
    LinearSolveFailed {
        iters: usize,
        residual: f64,
        tol: f64,
    },

    /// The density field lost positivity, which the pressure solve requires.
    #[error("density must be positive everywhere (min {min_rho:.4e})")]
    InvalidDensity { min_rho: f64 },

    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A config file failed to parse.
    #[error("config parse error at line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },

    /// A config file parsed but violates a validity rule.
    #[error("invalid config: {0}")]
    ConfigInvalid(String),

    /// The projected run length exceeds the step-count budget guard.
    #[error("projected step count {steps} exceeds cap {cap}; raise run.step_cap if intended")]
    StepCapExceeded { steps: u64, cap: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
