//! Dirichlet manifold on (R_+*)^n (beta distributions are n = 2).
//!
//! The Fisher-Rao metric is I(alpha) = diag(psi'(alpha_i)) -
//! psi'(alpha_bar) 1 1^T with alpha_bar = sum alpha_i. Geodesics have no
//! closed form and run through the numeric solver. The manifold embeds
//! isometrically in flat Minkowski space through the coordinate eta with
//! eta'(x) = sqrt(psi'(x)), kept here as a validation device.

use crate::error::{Error, Result};
use crate::geometry::manifold::Manifold;
use crate::numerics::quadrature::gauss_legendre;
use crate::numerics::special::{ln_gamma, tetragamma, trigamma};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Dirichlet manifold of a fixed dimension n >= 2; points are the
/// concentration vectors alpha with all entries positive.
#[derive(Debug, Clone, Copy)]
pub struct DirichletManifold {
    pub n: usize,
}

impl DirichletManifold {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("Dirichlet dimension must be at least 2".into()));
        }
        Ok(DirichletManifold { n })
    }

    /// The beta sub-family: n = 2, parameters (alpha, beta).
    pub fn beta() -> Self {
        DirichletManifold { n: 2 }
    }

    fn check_point(&self, alpha: &DVector<f64>) -> Result<()> {
        if alpha.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: alpha.len() });
        }
        if alpha.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::Domain("concentration parameters must be positive".into()));
        }
        Ok(())
    }

    /// Density at a simplex point x (all entries in (0, 1), summing to 1):
    /// Gamma(alpha_bar)/prod Gamma(alpha_i) * prod x_i^{alpha_i - 1}.
    pub fn pdf_at(&self, alpha: &DVector<f64>, x: &DVector<f64>) -> Result<f64> {
        self.check_point(alpha)?;
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        let sum: f64 = x.iter().sum();
        if x.iter().any(|&xi| xi <= 0.0 || xi >= 1.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Domain("density argument must lie in the open simplex".into()));
        }
        let mut logp = ln_gamma(alpha.sum())?;
        for (&a, &xi) in alpha.iter().zip(x.iter()) {
            logp += (a - 1.0) * xi.ln() - ln_gamma(a)?;
        }
        Ok(logp.exp())
    }

    /// Beta density on [0, 1]:
    /// x -> Gamma(a+b)/(Gamma(a) Gamma(b)) x^{a-1} (1-x)^{b-1}; zero
    /// outside the unit interval.
    pub fn beta_pdf(a: f64, b: f64) -> Result<impl Fn(f64) -> f64> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Domain("beta shape parameters must be positive".into()));
        }
        let log_norm = ln_gamma(a + b)? - ln_gamma(a)? - ln_gamma(b)?;
        Ok(move |x: f64| {
            if !(0.0..=1.0).contains(&x) {
                return 0.0;
            }
            let t1 = if a == 1.0 { 0.0 } else { (a - 1.0) * x.ln() };
            let t2 = if b == 1.0 { 0.0 } else { (b - 1.0) * (1.0 - x).ln() };
            (log_norm + t1 + t2).exp()
        })
    }

    /// Draws simplex points: independent Gamma(alpha_i, 1) normalized by
    /// their sum.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        alpha: &DVector<f64>,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<DVector<f64>>> {
        self.check_point(alpha)?;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let mut g = DVector::from_iterator(
                self.n,
                alpha.iter().map(|&a| crate::gamma::sample_standard_gamma(a, rng)),
            );
            let total = g.sum();
            g /= total;
            out.push(g);
        }
        Ok(out)
    }
}

/// Flat-embedding coordinate eta(x) = integral from 1 to x of
/// sqrt(psi'(t)) dt; the base point 1 is an arbitrary normalization, only
/// differences carry meaning. Computed by composite Gauss-Legendre
/// quadrature with panels graded toward 0 where the integrand blows up.
pub fn minkowski_coord(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("embedding coordinate needs x > 0, got {x}")));
    }
    if x == 1.0 {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if x < 1.0 { (x, 1.0, -1.0) } else { (1.0, x, 1.0) };
    let (nodes, weights) = gauss_legendre(40);
    // geometric panel grading keeps accuracy near the 1/t singularity at 0
    let panels = 16usize;
    let ratio = (hi / lo).powf(1.0 / panels as f64);
    let mut total = 0.0;
    let mut a = lo;
    for _ in 0..panels {
        let b = a * ratio;
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for (&t, &w) in nodes.iter().zip(weights.iter()) {
            total += w * half * trigamma(mid + half * t).sqrt();
        }
        a = b;
    }
    Ok(sign * total)
}

impl Manifold for DirichletManifold {
    fn dim(&self) -> usize {
        self.n
    }

    fn belongs(&self, p: &DVector<f64>) -> bool {
        self.check_point(p).is_ok()
    }

    fn metric_matrix(&self, p: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let bar = trigamma(p.sum());
        let mut g = DMatrix::from_element(self.n, self.n, -bar);
        for i in 0..self.n {
            g[(i, i)] += trigamma(p[i]);
        }
        Ok(g)
    }

    fn metric_partials(&self, p: &DVector<f64>) -> Option<Result<Vec<DMatrix<f64>>>> {
        if let Err(e) = self.check_point(p) {
            return Some(Err(e));
        }
        let bar = tetragamma(p.sum());
        let mut partials = Vec::with_capacity(self.n);
        for l in 0..self.n {
            let mut d = DMatrix::from_element(self.n, self.n, -bar);
            d[(l, l)] += tetragamma(p[l]);
            partials.push(d);
        }
        Some(Ok(partials))
    }

    fn boundary_clearance(&self, p: &DVector<f64>) -> f64 {
        p.iter().fold(f64::INFINITY, |acc, &x| acc.min(x))
    }
}
