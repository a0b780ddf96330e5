//! Numeric Fisher information metric for any user-supplied parameterized
//! density: I(theta) = -E[ Hess_theta log f(X | theta) ], with the Hessian
//! by central differences and the expectation by quadrature over the
//! declared support. Wrapping a model in [`FisherManifold`] makes every
//! geometric operation (exp, log, dist, curvature) available without
//! closed forms.

use crate::error::{Error, Result};
use crate::geometry::manifold::{ChristoffelTensor, Manifold};
use crate::geometry::ops::GeodesicSolver;
use crate::numerics::fd::{fd_hessian, fd_matrix_partials_with_step};
use crate::numerics::quadrature::{gauss_legendre, QuadratureRule};
use crate::numerics::special::ln_gamma;
use nalgebra::{DMatrix, DVector};

type LogDensity = Box<dyn Fn(f64, &DVector<f64>) -> Result<f64> + Send + Sync>;
type DomainCheck = Box<dyn Fn(&DVector<f64>) -> bool + Send + Sync>;
type Clearance = Box<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;

/// A parameterized density over a declared scalar support.
pub struct DensityModel {
    /// Parameter dimension.
    pub dim: usize,
    /// Where (and how) expectations over x are evaluated.
    pub support: QuadratureRule,
    log_density: LogDensity,
    contains: DomainCheck,
    clearance: Option<Clearance>,
}

impl DensityModel {
    pub fn new(
        dim: usize,
        support: QuadratureRule,
        log_density: impl Fn(f64, &DVector<f64>) -> Result<f64> + Send + Sync + 'static,
        contains: impl Fn(&DVector<f64>) -> bool + Send + Sync + 'static,
    ) -> Self {
        DensityModel {
            dim,
            support,
            log_density: Box::new(log_density),
            contains: Box::new(contains),
            clearance: None,
        }
    }

    /// Distance from a parameter to the domain boundary; used by the
    /// geodesic solver to stop integration before leaving the domain.
    pub fn with_clearance(
        mut self,
        clearance: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.clearance = Some(Box::new(clearance));
        self
    }

    pub fn log_density(&self, x: f64, theta: &DVector<f64>) -> Result<f64> {
        (self.log_density)(x, theta)
    }

    /// Univariate normal in (mean, standard deviation) coordinates.
    pub fn univariate_normal(a: f64, b: f64, nodes: usize) -> Result<Self> {
        let support = QuadratureRule::continuous(a, b, nodes)?;
        Ok(Self::new(
            2,
            support,
            |x, th| {
                let (m, s) = (th[0], th[1]);
                if s <= 0.0 {
                    return Err(Error::Domain("standard deviation must be positive".into()));
                }
                let z = (x - m) / s;
                Ok(-0.5 * (2.0 * std::f64::consts::PI).ln() - s.ln() - 0.5 * z * z)
            },
            |th| th.len() == 2 && th[1] > 0.0,
        )
        .with_clearance(|th| th[1]))
    }

    /// Exponential distribution with rate parameter lambda.
    pub fn exponential(hi: f64, nodes: usize) -> Result<Self> {
        let support = QuadratureRule::continuous(0.0, hi, nodes)?;
        Ok(Self::new(
            1,
            support,
            |x, th| {
                let lam = th[0];
                if lam <= 0.0 {
                    return Err(Error::Domain("rate must be positive".into()));
                }
                Ok(lam.ln() - lam * x)
            },
            |th| th.len() == 1 && th[0] > 0.0,
        )
        .with_clearance(|th| th[0]))
    }

    /// Gamma distribution in (shape kappa, mean gamma) coordinates.
    pub fn gamma(hi: f64, nodes: usize) -> Result<Self> {
        let support = QuadratureRule::continuous(0.0, hi, nodes)?;
        Ok(Self::new(
            2,
            support,
            |x, th| {
                let (k, g) = (th[0], th[1]);
                if k <= 0.0 || g <= 0.0 {
                    return Err(Error::Domain("gamma parameters must be positive".into()));
                }
                Ok(k * k.ln() - k * g.ln() - ln_gamma(k)? + (k - 1.0) * x.ln() - k * x / g)
            },
            |th| th.len() == 2 && th[0] > 0.0 && th[1] > 0.0,
        )
        .with_clearance(|th| th[0].min(th[1])))
    }

    /// Beta distribution with shape parameters (alpha, beta).
    pub fn beta(nodes: usize) -> Result<Self> {
        let support = QuadratureRule::continuous(0.0, 1.0, nodes)?;
        Ok(Self::new(
            2,
            support,
            |x, th| {
                let (a, b) = (th[0], th[1]);
                if a <= 0.0 || b <= 0.0 {
                    return Err(Error::Domain("beta parameters must be positive".into()));
                }
                Ok(ln_gamma(a + b)? - ln_gamma(a)? - ln_gamma(b)?
                    + (a - 1.0) * x.ln()
                    + (b - 1.0) * (1.0 - x).ln())
            },
            |th| th.len() == 2 && th[0] > 0.0 && th[1] > 0.0,
        )
        .with_clearance(|th| th[0].min(th[1])))
    }

    /// Poisson distribution with mean lambda over the nonnegative integers.
    pub fn poisson() -> Self {
        Self::new(
            1,
            QuadratureRule::Discrete { lo: 0, hi: None },
            |x, th| {
                let lam = th[0];
                if lam <= 0.0 {
                    return Err(Error::Domain("mean must be positive".into()));
                }
                Ok(x * lam.ln() - lam - ln_gamma(x + 1.0)?)
            },
            |th| th.len() == 1 && th[0] > 0.0,
        )
        .with_clearance(|th| th[0])
    }
}

/// Fisher information matrix I(theta) = -int Hess_theta[log f(x|theta)]
/// f(x|theta) dx, symmetrized and verified positive definite.
pub fn fisher_matrix(model: &DensityModel, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
    if theta.len() != model.dim {
        return Err(Error::DimensionMismatch { expected: model.dim, got: theta.len() });
    }
    if !(model.contains)(theta) {
        return Err(Error::Domain("parameter outside the model domain".into()));
    }
    let d = model.dim;
    // density value and -f(x) * Hessian of log f at one support point
    let term = |x: f64| -> Result<(f64, Option<DMatrix<f64>>)> {
        let logf = model.log_density(x, theta)?;
        let f = logf.exp();
        if !f.is_finite() {
            return Err(Error::BadIntegrand { node: x });
        }
        if f <= 1e-300 {
            return Ok((f, None));
        }
        let hess = fd_hessian(|th| model.log_density(x, th), theta)?;
        if hess.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadIntegrand { node: x });
        }
        Ok((f, Some(-hess * f)))
    };
    let mut acc = DMatrix::zeros(d, d);
    match model.support {
        QuadratureRule::Continuous { a, b, nodes } => {
            let (xs, ws) = gauss_legendre(nodes);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, w) in xs.iter().zip(&ws) {
                let node = mid + half * x;
                if let (_, Some(t)) = term(node)? {
                    acc += t * (w * half);
                }
            }
        }
        QuadratureRule::Discrete { lo, hi } => {
            let mut mass = 0.0;
            let mut k = lo;
            loop {
                let (f, t) = term(k as f64)?;
                if let Some(t) = t {
                    acc += t;
                }
                mass += f;
                match hi {
                    Some(h) if k >= h => break,
                    Some(_) => {}
                    None => {
                        if k > lo + 4 && f < 1e-14 * mass.max(1e-300) {
                            break;
                        }
                        if k - lo > 10_000_000 {
                            return Err(Error::Domain(
                                "discrete support truncation failed".into(),
                            ));
                        }
                    }
                }
                k += 1;
            }
        }
    }
    let sym = (&acc + acc.transpose()) * 0.5;
    let min_eig = sym.clone().symmetric_eigen().eigenvalues.min();
    if min_eig <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            point: theta.clone(),
            hint: "information matrix is not positive definite; enlarge the support \
                   or increase the quadrature node count"
                .into(),
        });
    }
    Ok(sym)
}

/// Christoffel symbols from finite differences of [`fisher_matrix`].
pub fn fisher_christoffels(model: &DensityModel, theta: &DVector<f64>) -> Result<ChristoffelTensor> {
    let manifold = FisherManifold::new(model);
    GeodesicSolver::default().christoffels(&manifold, theta)
}

/// A [`Manifold`] whose metric is the numeric Fisher information of a
/// density model; all geometry-engine operations apply.
pub struct FisherManifold<'a> {
    model: &'a DensityModel,
}

impl<'a> FisherManifold<'a> {
    pub fn new(model: &'a DensityModel) -> Self {
        FisherManifold { model }
    }
}

impl Manifold for FisherManifold<'_> {
    fn dim(&self) -> usize {
        self.model.dim
    }

    fn belongs(&self, p: &DVector<f64>) -> bool {
        p.len() == self.model.dim && (self.model.contains)(p)
    }

    fn metric_matrix(&self, p: &DVector<f64>) -> Result<DMatrix<f64>> {
        fisher_matrix(self.model, p)
    }

    fn metric_partials(&self, p: &DVector<f64>) -> Option<Result<Vec<DMatrix<f64>>>> {
        // The quadrature-based metric carries evaluation noise well above
        // machine epsilon, so differentiate it with a wider step than the
        // generic eps^(1/3) default.
        Some(fd_matrix_partials_with_step(
            |th| fisher_matrix(self.model, th),
            p,
            Some(5e-3),
        ))
    }

    fn boundary_clearance(&self, p: &DVector<f64>) -> f64 {
        match &self.model.clearance {
            Some(c) => c(p),
            None => {
                if self.belongs(p) {
                    f64::INFINITY
                } else {
                    -1.0
                }
            }
        }
    }
}
