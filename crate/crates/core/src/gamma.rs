//! Gamma manifold in (shape kappa, mean gamma) coordinates, where the
//! Fisher-Rao metric is diagonal:
//! ds^2 = (psi'(kappa) - 1/kappa) dkappa^2 + (kappa/gamma^2) dgamma^2.
//!
//! Geodesics and distances have no closed form; the family supplies the
//! metric and closed Christoffel symbols to the geodesic solver. The
//! natural chart (kappa, rate nu) with gamma = kappa/nu is available as a
//! conversion and as a second [`Manifold`] for reparameterization checks.

use crate::error::{Error, Result};
use crate::geometry::manifold::{ChristoffelTensor, Manifold};
use crate::numerics::special::{ln_gamma, tetragamma, trigamma};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}

/// The gamma manifold; points are (kappa, gamma) with both positive and
/// gamma = E[X] the distribution mean.
#[derive(Debug, Clone, Copy, Default)]
pub struct GammaManifold;

impl GammaManifold {
    /// Density x -> kappa^kappa / (gamma^kappa Gamma(kappa)) x^{kappa-1}
    /// e^{-kappa x / gamma}, zero for x <= 0; evaluated in log space.
    pub fn pdf(kappa: f64, gamma: f64) -> Result<impl Fn(f64) -> f64> {
        check_positive("shape", kappa)?;
        check_positive("scale parameter", gamma)?;
        let log_norm = kappa * kappa.ln() - kappa * gamma.ln() - ln_gamma(kappa)?;
        Ok(move |x: f64| {
            if x <= 0.0 {
                0.0
            } else {
                (log_norm + (kappa - 1.0) * x.ln() - kappa * x / gamma).exp()
            }
        })
    }

    /// Chart change from natural coordinates (kappa, rate nu): gamma = kappa/nu.
    pub fn natural_to_scale(kappa: f64, nu: f64) -> Result<(f64, f64)> {
        check_positive("shape", kappa)?;
        check_positive("rate", nu)?;
        Ok((kappa, kappa / nu))
    }

    /// Inverse chart change: nu = kappa/gamma.
    pub fn scale_to_natural(kappa: f64, gamma: f64) -> Result<(f64, f64)> {
        check_positive("shape", kappa)?;
        check_positive("scale parameter", gamma)?;
        Ok((kappa, kappa / gamma))
    }

    /// Distance along a fixed-shape line: sqrt(kappa) |log(gamma1/gamma2)|.
    pub fn fixed_kappa_dist(gamma1: f64, gamma2: f64, kappa: f64) -> Result<f64> {
        check_positive("shape", kappa)?;
        check_positive("scale parameter", gamma1)?;
        check_positive("scale parameter", gamma2)?;
        Ok(kappa.sqrt() * (gamma1 / gamma2).ln().abs())
    }

    /// Sectional curvature, a function of the shape alone:
    /// K(kappa) = (psi'(kappa) + kappa psi''(kappa)) / (4 (kappa psi'(kappa) - 1)^2).
    pub fn sectional_curvature(kappa: f64) -> Result<f64> {
        check_positive("shape", kappa)?;
        let t = trigamma(kappa);
        let q = tetragamma(kappa);
        Ok((t + kappa * q) / (4.0 * (kappa * t - 1.0).powi(2)))
    }

    /// Marsaglia-Tsang draws with shape kappa and scale gamma/kappa (so the
    /// sample mean is gamma).
    pub fn sample<R: Rng + ?Sized>(
        kappa: f64,
        gamma: f64,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        check_positive("shape", kappa)?;
        check_positive("scale parameter", gamma)?;
        let scale = gamma / kappa;
        Ok((0..count).map(|_| sample_standard_gamma(kappa, rng) * scale).collect())
    }
}

/// One draw from Gamma(shape, 1) by the Marsaglia-Tsang squeeze method,
/// with the shape-boost U^{1/shape} trick for shape < 1.
pub(crate) fn sample_standard_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        return sample_standard_gamma(shape + 1.0, rng) * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = crate::normal::standard_normal(rng);
        let v = (1.0 + c * x).powi(3);
        if v <= 0.0 {
            continue;
        }
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        if u < 1.0 - 0.0331 * x.powi(4) || u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

impl Manifold for GammaManifold {
    fn dim(&self) -> usize {
        2
    }

    fn belongs(&self, p: &DVector<f64>) -> bool {
        p.len() == 2 && p.iter().all(|&x| x > 0.0 && x.is_finite())
    }

    fn metric_matrix(&self, p: &DVector<f64>) -> Result<DMatrix<f64>> {
        let (kappa, gamma) = (p[0], p[1]);
        check_positive("shape", kappa)?;
        check_positive("scale parameter", gamma)?;
        Ok(DMatrix::from_diagonal(&DVector::from_column_slice(&[
            trigamma(kappa) - 1.0 / kappa,
            kappa / (gamma * gamma),
        ])))
    }

    fn metric_partials(&self, p: &DVector<f64>) -> Option<Result<Vec<DMatrix<f64>>>> {
        let (kappa, gamma) = (p[0], p[1]);
        if kappa <= 0.0 || gamma <= 0.0 {
            return Some(Err(Error::Domain("gamma parameters must be positive".into())));
        }
        let d_kappa = DMatrix::from_diagonal(&DVector::from_column_slice(&[
            tetragamma(kappa) + 1.0 / (kappa * kappa),
            1.0 / (gamma * gamma),
        ]));
        let d_gamma = DMatrix::from_diagonal(&DVector::from_column_slice(&[
            0.0,
            -2.0 * kappa / gamma.powi(3),
        ]));
        Some(Ok(vec![d_kappa, d_gamma]))
    }

    fn christoffels_closed(&self, p: &DVector<f64>) -> Option<Result<ChristoffelTensor>> {
        let (kappa, gamma) = (p[0], p[1]);
        if kappa <= 0.0 || gamma <= 0.0 {
            return Some(Err(Error::Domain("gamma parameters must be positive".into())));
        }
        // coordinate 0 = kappa, 1 = gamma
        let denom = kappa * trigamma(kappa) - 1.0;
        let mut g_kappa = DMatrix::zeros(2, 2);
        g_kappa[(0, 0)] =
            (tetragamma(kappa) * kappa * kappa + 1.0) / (2.0 * kappa * denom);
        g_kappa[(1, 1)] = -kappa / (2.0 * gamma * gamma * denom);
        let mut g_gamma = DMatrix::zeros(2, 2);
        g_gamma[(1, 1)] = -1.0 / gamma;
        g_gamma[(0, 1)] = 1.0 / (2.0 * kappa);
        g_gamma[(1, 0)] = 1.0 / (2.0 * kappa);
        Some(Ok(ChristoffelTensor { gamma: vec![g_kappa, g_gamma] }))
    }

    fn boundary_clearance(&self, p: &DVector<f64>) -> f64 {
        p[0].min(p[1])
    }
}

/// The gamma manifold in natural coordinates (kappa, rate nu); same
/// geometry as [`GammaManifold`] through gamma = kappa/nu. Used to verify
/// invariance of distances under the chart change.
#[derive(Debug, Clone, Copy, Default)]
pub struct GammaNaturalManifold;

impl Manifold for GammaNaturalManifold {
    fn dim(&self) -> usize {
        2
    }

    fn belongs(&self, p: &DVector<f64>) -> bool {
        p.len() == 2 && p.iter().all(|&x| x > 0.0 && x.is_finite())
    }

    fn metric_matrix(&self, p: &DVector<f64>) -> Result<DMatrix<f64>> {
        let (kappa, nu) = (p[0], p[1]);
        check_positive("shape", kappa)?;
        check_positive("rate", nu)?;
        let mut g = DMatrix::zeros(2, 2);
        g[(0, 0)] = trigamma(kappa);
        g[(0, 1)] = -1.0 / nu;
        g[(1, 0)] = -1.0 / nu;
        g[(1, 1)] = kappa / (nu * nu);
        Ok(g)
    }

    fn metric_partials(&self, p: &DVector<f64>) -> Option<Result<Vec<DMatrix<f64>>>> {
        let (kappa, nu) = (p[0], p[1]);
        if kappa <= 0.0 || nu <= 0.0 {
            return Some(Err(Error::Domain("gamma parameters must be positive".into())));
        }
        let mut d_kappa = DMatrix::zeros(2, 2);
        d_kappa[(0, 0)] = tetragamma(kappa);
        d_kappa[(1, 1)] = 1.0 / (nu * nu);
        let mut d_nu = DMatrix::zeros(2, 2);
        d_nu[(0, 1)] = 1.0 / (nu * nu);
        d_nu[(1, 0)] = 1.0 / (nu * nu);
        d_nu[(1, 1)] = -2.0 * kappa / nu.powi(3);
        Some(Ok(vec![d_kappa, d_nu]))
    }

    fn boundary_clearance(&self, p: &DVector<f64>) -> f64 {
        p[0].min(p[1])
    }
}
