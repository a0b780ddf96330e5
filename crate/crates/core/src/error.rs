use nalgebra::DVector;
use thiserror::Error;

/// Errors produced by the geometry and numerics routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("integrand is not finite at node {node}")]
    BadIntegrand { node: f64 },

    #[error("ODE integration failed at t = {t}: {reason} (last state {state:?})")]
    IntegrationFailure {
        t: f64,
        reason: String,
        state: DVector<f64>,
    },

    #[error("finite-difference evaluation failed near {point:?}: {reason}")]
    FiniteDifference { point: DVector<f64>, reason: String },

    #[error("metric matrix is singular at {point:?}")]
    SingularMetric { point: DVector<f64> },

    #[error("metric matrix is not positive definite at {point:?}: {hint}")]
    NotPositiveDefinite { point: DVector<f64>, hint: String },

    #[error("shooting solver did not converge after {iterations} iterations (best residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("geodesic left the parameter manifold at t = {exit_time}")]
    IncompleteGeodesic { exit_time: f64 },

    #[error("vector is not tangent to the simplex (component sum {sum:.3e})")]
    NotTangent { sum: f64 },

    #[error("tangent vectors span a degenerate plane")]
    DegeneratePlane,

    #[error("family mismatch: {0}")]
    FamilyMismatch(String),

    #[error("distance is infinite: {0}")]
    InfiniteDistance(String),

    #[error("matrix factorization failed: {0}")]
    Factorization(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
