//! Family-agnostic Riemannian engine: metric interface, Christoffel
//! symbols, geodesics, exp/log maps, distances, parallel transport and
//! curvature.

pub mod curvature;
pub mod manifold;
pub mod ops;

pub use curvature::RiemannComponents;
pub use manifold::{
    inner_product, metric_norm, ChristoffelTensor, EuclideanSpace, GeodesicPath, GeodesicSample,
    Manifold,
};
pub use ops::{check_metric, path_length, GeodesicEnd, GeodesicSolver};
