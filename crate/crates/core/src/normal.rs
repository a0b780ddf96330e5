//! Normal-family geometries.
//!
//! The univariate manifold in (mean, standard deviation) coordinates
//! carries the metric ds^2 = (dm^2 + 2 dsigma^2)/sigma^2: the hyperbolic
//! half-plane up to the change of variables x = m/sqrt(2). Diagonal
//! multivariate normals carry the product metric; fixed-mean (centered)
//! normals carry the affine-invariant distance on covariance matrices.

use crate::error::{Error, Result};
use crate::geometry::manifold::{ChristoffelTensor, Manifold};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::f64::consts::{PI, SQRT_2};

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!("standard deviation must be positive, got {sigma}")));
    }
    Ok(())
}

/// The univariate normal manifold, points (m, sigma) with sigma > 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnivariateNormal;

impl UnivariateNormal {
    /// Density x -> (2 pi sigma^2)^{-1/2} exp(-(x-m)^2 / (2 sigma^2)).
    pub fn pdf(m: f64, sigma: f64) -> Result<impl Fn(f64) -> f64> {
        check_sigma(sigma)?;
        Ok(move |x: f64| {
            let z = (x - m) / sigma;
            (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
        })
    }

    /// Fisher-Rao distance with the half-plane isometry (m, sigma) ->
    /// (m / sqrt 2, sigma):
    /// sqrt(2) arccosh( ((m1-m2)^2/2 + sigma1^2 + sigma2^2) / (2 sigma1 sigma2) ).
    pub fn dist(a: (f64, f64), b: (f64, f64)) -> Result<f64> {
        check_sigma(a.1)?;
        check_sigma(b.1)?;
        let arg = ((a.0 - b.0).powi(2) / 2.0 + a.1 * a.1 + b.1 * b.1) / (2.0 * a.1 * b.1);
        Ok(SQRT_2 * arg.max(1.0).acosh())
    }

    /// Poincare half-plane distance on the raw (m, sigma) coordinates,
    /// without the sqrt(2) scaling of the mean axis. Not the Fisher-Rao
    /// distance; kept for reproducing published reference values.
    pub fn legacy_halfplane_dist(a: (f64, f64), b: (f64, f64)) -> Result<f64> {
        check_sigma(a.1)?;
        check_sigma(b.1)?;
        let arg = 1.0 + ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)) / (2.0 * a.1 * b.1);
        Ok(arg.max(1.0).acosh())
    }

    /// Constant-speed geodesic from a to b; returns ((m, sigma), velocity)
    /// at parameter t in [0, 1]. Vertical segment for equal means,
    /// otherwise an arc of a half-circle centered on the mean axis of the
    /// scaled half-plane.
    pub fn geodesic(a: (f64, f64), b: (f64, f64), t: f64) -> Result<((f64, f64), (f64, f64))> {
        check_sigma(a.1)?;
        check_sigma(b.1)?;
        let (x1, y1) = (a.0 / SQRT_2, a.1);
        let (x2, y2) = (b.0 / SQRT_2, b.1);
        if (x1 - x2).abs() < 1e-14 * (1.0 + x1.abs().max(x2.abs())) {
            let k = (y2 / y1).ln();
            let y = y1 * (k * t).exp();
            return Ok(((a.0, y), (0.0, y * k)));
        }
        let c = (x2 * x2 + y2 * y2 - x1 * x1 - y1 * y1) / (2.0 * (x2 - x1));
        let r = ((x1 - c).powi(2) + y1 * y1).sqrt();
        let phi1 = y1.atan2(x1 - c);
        let phi2 = y2.atan2(x2 - c);
        // s = log tan(phi/2) is the hyperbolic arclength along the circle
        let s1 = (phi1 / 2.0).tan().ln();
        let s2 = (phi2 / 2.0).tan().ln();
        let s = s1 + t * (s2 - s1);
        let phi = 2.0 * s.exp().atan();
        let (sin_phi, cos_phi) = phi.sin_cos();
        let x = c + r * cos_phi;
        let y = r * sin_phi;
        let dphi = (s2 - s1) * sin_phi;
        let dx = -r * sin_phi * dphi;
        let dy = r * cos_phi * dphi;
        Ok(((SQRT_2 * x, y), (SQRT_2 * dx, dy)))
    }

    /// Constant sectional curvature -1/2 of the (m, sigma) metric.
    pub fn sectional_curvature() -> f64 {
        -0.5
    }

    /// Draws from N(m, sigma^2) by Box-Muller.
    pub fn sample<R: Rng + ?Sized>(
        m: f64,
        sigma: f64,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        check_sigma(sigma)?;
        Ok((0..count).map(|_| m + sigma * standard_normal(rng)).collect())
    }
}

pub(crate) fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

impl Manifold for UnivariateNormal {
    fn dim(&self) -> usize {
        2
    }

    fn belongs(&self, p: &DVector<f64>) -> bool {
        p.len() == 2 && p[0].is_finite() && p[1] > 0.0 && p[1].is_finite()
    }

    fn metric_matrix(&self, p: &DVector<f64>) -> Result<DMatrix<f64>> {
        check_sigma(p[1])?;
        let s2 = p[1] * p[1];
        Ok(DMatrix::from_diagonal(&DVector::from_column_slice(&[1.0 / s2, 2.0 / s2])))
    }

    fn metric_partials(&self, p: &DVector<f64>) -> Option<Result<Vec<DMatrix<f64>>>> {
        if let Err(e) = check_sigma(p[1]) {
            return Some(Err(e));
        }
        let s3 = p[1].powi(3);
        let d_m = DMatrix::zeros(2, 2);
        let d_s =
            DMatrix::from_diagonal(&DVector::from_column_slice(&[-2.0 / s3, -4.0 / s3]));
        Some(Ok(vec![d_m, d_s]))
    }

    fn christoffels_closed(&self, p: &DVector<f64>) -> Option<Result<ChristoffelTensor>> {
        if let Err(e) = check_sigma(p[1]) {
            return Some(Err(e));
        }
        let s = p[1];
        let mut g0 = DMatrix::zeros(2, 2);
        g0[(0, 1)] = -1.0 / s;
        g0[(1, 0)] = -1.0 / s;
        let mut g1 = DMatrix::zeros(2, 2);
        g1[(0, 0)] = 1.0 / (2.0 * s);
        g1[(1, 1)] = -1.0 / s;
        Some(Ok(ChristoffelTensor { gamma: vec![g0, g1] }))
    }

    fn dist_closed(&self, a: &DVector<f64>, b: &DVector<f64>) -> Option<Result<f64>> {
        Some(Self::dist((a[0], a[1]), (b[0], b[1])))
    }

    fn geodesic_closed(
        &self,
        a: &DVector<f64>,
        b: &DVector<f64>,
        t: f64,
    ) -> Option<Result<(DVector<f64>, DVector<f64>)>> {
        let run = || -> Result<(DVector<f64>, DVector<f64>)> {
            let (p, v) = Self::geodesic((a[0], a[1]), (b[0], b[1]), t)?;
            Ok((
                DVector::from_column_slice(&[p.0, p.1]),
                DVector::from_column_slice(&[v.0, v.1]),
            ))
        };
        Some(run())
    }

    fn log_closed(&self, x: &DVector<f64>, y: &DVector<f64>) -> Option<Result<DVector<f64>>> {
        let run = || -> Result<DVector<f64>> {
            let (_, v) = Self::geodesic((x[0], x[1]), (y[0], y[1]), 0.0)?;
            Ok(DVector::from_column_slice(&[v.0, v.1]))
        };
        Some(run())
    }

    fn exp_closed(&self, x: &DVector<f64>, v: &DVector<f64>) -> Option<Result<DVector<f64>>> {
        let run = || -> Result<DVector<f64>> {
            check_sigma(x[1])?;
            let (px, py) = (x[0] / SQRT_2, x[1]);
            let (vx, vy) = (v[0] / SQRT_2, v[1]);
            if vx.abs() < 1e-14 * (1.0 + vy.abs()) {
                // vertical geodesic: sigma(t) = sigma e^{(vy/sigma) t}
                return Ok(DVector::from_column_slice(&[x[0], py * (vy / py).exp()]));
            }
            let c = px + py * vy / vx;
            let r = ((px - c).powi(2) + py * py).sqrt();
            let phi0 = py.atan2(px - c);
            let s0 = (phi0 / 2.0).tan().ln();
            // ds/dt from dx/dt = -r sin^2(phi) ds/dt
            let ds = -vx / (r * phi0.sin().powi(2));
            let phi = 2.0 * (s0 + ds).exp().atan();
            Ok(DVector::from_column_slice(&[SQRT_2 * (c + r * phi.cos()), r * phi.sin()]))
        };
        Some(run())
    }

    fn boundary_clearance(&self, p: &DVector<f64>) -> f64 {
        p[1]
    }
}

/// Distance on the product manifold of p independent (mean, standard
/// deviation) coordinates: sqrt of the sum of squared univariate
/// distances.
pub fn diagonal_dist(a: &[(f64, f64)], b: &[(f64, f64)]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    if a.is_empty() {
        return Err(Error::Domain("diagonal normal needs at least one coordinate".into()));
    }
    let mut acc = 0.0;
    for (&pa, &pb) in a.iter().zip(b.iter()) {
        acc += UnivariateNormal::dist(pa, pb)?.powi(2);
    }
    Ok(acc.sqrt())
}

/// Normal distributions with a fixed mean: parameter is the covariance
/// matrix, distance is the affine-invariant metric on symmetric
/// positive-definite matrices.
#[derive(Debug, Clone)]
pub struct CenteredNormal {
    pub mean: DVector<f64>,
}

impl CenteredNormal {
    pub fn new(mean: DVector<f64>) -> Self {
        CenteredNormal { mean }
    }

    fn check_spd(&self, sigma: &DMatrix<f64>) -> Result<()> {
        let p = self.mean.len();
        if sigma.nrows() != p || sigma.ncols() != p {
            return Err(Error::DimensionMismatch { expected: p, got: sigma.nrows() });
        }
        if (sigma - sigma.transpose()).amax() > 1e-10 {
            return Err(Error::Domain("covariance matrix is not symmetric".into()));
        }
        Ok(())
    }

    /// sqrt( (1/2) sum_i log^2 lambda_i ) with lambda_i the eigenvalues of
    /// Sigma1^{-1} Sigma2, computed by Cholesky whitening.
    pub fn dist(&self, sigma1: &DMatrix<f64>, sigma2: &DMatrix<f64>) -> Result<f64> {
        self.check_spd(sigma1)?;
        self.check_spd(sigma2)?;
        let chol = sigma1
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Factorization("first covariance is not positive definite".into()))?;
        let l_inv = chol
            .l()
            .try_inverse()
            .ok_or_else(|| Error::Factorization("singular Cholesky factor".into()))?;
        let w = &l_inv * sigma2 * l_inv.transpose();
        let w = (&w + w.transpose()) * 0.5;
        let eigs = w.symmetric_eigen().eigenvalues;
        let mut acc = 0.0;
        for &lam in eigs.iter() {
            if lam <= 0.0 {
                return Err(Error::Factorization(
                    "second covariance is not positive definite".into(),
                ));
            }
            acc += lam.ln().powi(2);
        }
        Ok((0.5 * acc).sqrt())
    }
}
