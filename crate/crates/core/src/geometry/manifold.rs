//! Manifold interface and the tensor/path types shared by all families.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Christoffel symbols of the second kind at a base point.
///
/// `gamma[k][(i, j)]` holds the coefficient with upper index `k` and lower
/// indices `(i, j)`; symmetry in the lower pair is maintained by every
/// constructor in this crate.
#[derive(Debug, Clone)]
pub struct ChristoffelTensor {
    pub gamma: Vec<DMatrix<f64>>,
}

impl ChristoffelTensor {
    pub fn zeros(dim: usize) -> Self {
        ChristoffelTensor {
            gamma: vec![DMatrix::zeros(dim, dim); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// Contraction sum_{i,j} Gamma^k_{ij} a^i b^j for each k.
    pub fn contract(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.gamma.iter().map(|g| (g * b).dot(a)))
    }
}

/// One sample of a discretized geodesic.
#[derive(Debug, Clone)]
pub struct GeodesicSample {
    pub t: f64,
    pub point: DVector<f64>,
    pub velocity: DVector<f64>,
}

/// A geodesic discretized over t in [0, 1] with per-sample velocity.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    pub samples: Vec<GeodesicSample>,
    pub length: f64,
}

impl GeodesicPath {
    pub fn start(&self) -> &GeodesicSample {
        &self.samples[0]
    }

    pub fn end(&self) -> &GeodesicSample {
        self.samples.last().expect("path has samples")
    }
}

/// A parameter manifold with its Fisher-Rao metric.
///
/// Only `dim`, `belongs` and `metric_matrix` are mandatory. Families that
/// know closed forms for metric derivatives, Christoffel symbols, distances
/// or geodesics expose them through the optional methods, and the solver in
/// [`crate::geometry::GeodesicSolver`] picks them up automatically.
pub trait Manifold: Sync {
    fn dim(&self) -> usize;

    fn belongs(&self, point: &DVector<f64>) -> bool;

    fn metric_matrix(&self, point: &DVector<f64>) -> Result<DMatrix<f64>>;

    /// Partial derivatives of the metric matrix, one per coordinate, when
    /// known in closed form.
    fn metric_partials(&self, _point: &DVector<f64>) -> Option<Result<Vec<DMatrix<f64>>>> {
        None
    }

    fn christoffels_closed(&self, _point: &DVector<f64>) -> Option<Result<ChristoffelTensor>> {
        None
    }

    fn dist_closed(&self, _a: &DVector<f64>, _b: &DVector<f64>) -> Option<Result<f64>> {
        None
    }

    fn exp_closed(
        &self,
        _point: &DVector<f64>,
        _tangent: &DVector<f64>,
    ) -> Option<Result<DVector<f64>>> {
        None
    }

    fn log_closed(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> Option<Result<DVector<f64>>> {
        None
    }

    /// Closed-form constant-speed geodesic between two points, returning
    /// (point, velocity) at parameter `t`.
    fn geodesic_closed(
        &self,
        _a: &DVector<f64>,
        _b: &DVector<f64>,
        _t: f64,
    ) -> Option<Result<(DVector<f64>, DVector<f64>)>> {
        None
    }

    /// Distance from the point to the boundary of the parameter domain in
    /// coordinates; used as an integration safeguard. Points outside the
    /// domain report a negative clearance.
    fn boundary_clearance(&self, point: &DVector<f64>) -> f64 {
        if self.belongs(point) {
            f64::INFINITY
        } else {
            -1.0
        }
    }
}

/// Inner product u^T I(theta) v of two tangent vectors at a base point.
pub fn inner_product(
    manifold: &dyn Manifold,
    point: &DVector<f64>,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<f64> {
    let d = manifold.dim();
    for w in [u, v] {
        if w.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: w.len() });
        }
    }
    let g = manifold.metric_matrix(point)?;
    Ok((&g * v).dot(u))
}

/// Metric norm of a tangent vector at a base point.
pub fn metric_norm(
    manifold: &dyn Manifold,
    point: &DVector<f64>,
    u: &DVector<f64>,
) -> Result<f64> {
    Ok(inner_product(manifold, point, u, u)?.max(0.0).sqrt())
}

/// Flat Euclidean manifold; identity metric on R^d. Used as the baseline
/// geometry in the learning comparisons.
#[derive(Debug, Clone)]
pub struct EuclideanSpace {
    pub dim: usize,
}

impl Manifold for EuclideanSpace {
    fn dim(&self) -> usize {
        self.dim
    }

    fn belongs(&self, point: &DVector<f64>) -> bool {
        point.len() == self.dim && point.iter().all(|x| x.is_finite())
    }

    fn metric_matrix(&self, _point: &DVector<f64>) -> Result<DMatrix<f64>> {
        Ok(DMatrix::identity(self.dim, self.dim))
    }

    fn metric_partials(&self, _point: &DVector<f64>) -> Option<Result<Vec<DMatrix<f64>>>> {
        Some(Ok(vec![DMatrix::zeros(self.dim, self.dim); self.dim]))
    }

    fn christoffels_closed(&self, _point: &DVector<f64>) -> Option<Result<ChristoffelTensor>> {
        Some(Ok(ChristoffelTensor::zeros(self.dim)))
    }

    fn dist_closed(&self, a: &DVector<f64>, b: &DVector<f64>) -> Option<Result<f64>> {
        Some(Ok((a - b).norm()))
    }

    fn exp_closed(
        &self,
        point: &DVector<f64>,
        tangent: &DVector<f64>,
    ) -> Option<Result<DVector<f64>>> {
        Some(Ok(point + tangent))
    }

    fn log_closed(&self, x: &DVector<f64>, y: &DVector<f64>) -> Option<Result<DVector<f64>>> {
        Some(Ok(y - x))
    }

    fn geodesic_closed(
        &self,
        a: &DVector<f64>,
        b: &DVector<f64>,
        t: f64,
    ) -> Option<Result<(DVector<f64>, DVector<f64>)>> {
        Some(Ok((a + (b - a) * t, b - a)))
    }
}
