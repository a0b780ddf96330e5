//! Fisher-Rao Riemannian geometry on parameter manifolds of standard
//! probability-distribution families.
//!
//! The crate provides:
//! - closed-form geometries for one-dimensional families (Bernoulli,
//!   binomial, Poisson, exponential, geometric), multinomial/categorical,
//!   normal, gamma and Dirichlet/beta distributions;
//! - a family-agnostic geodesic engine (exp/log maps, distances, parallel
//!   transport, curvature) driven by the metric matrix alone;
//! - a numeric Fisher information metric for any user-supplied
//!   parameterized density;
//! - Riemannian learning algorithms: pairwise distances, Karcher means,
//!   K-means and K-NN classification.

pub mod dirichlet;
pub mod error;
pub mod gamma;
pub mod generic;
pub mod geometry;
pub mod learning;
pub mod multinomial;
pub mod normal;
pub mod numerics;
pub mod scalar;

pub use error::{Error, Result};
pub use geometry::{GeodesicEnd, GeodesicSolver, Manifold};
