//! Family selection and coordinate plumbing: maps a `--family` name (plus
//! integer options) to the manifold types of the core crate, converts
//! between the documented CSV coordinate layout and the manifold's chart,
//! and routes family-specific operations (distance, sampling, densities).

use infogeo::dirichlet::DirichletManifold;
use infogeo::error::{Error, Result};
use infogeo::gamma::GammaManifold;
use infogeo::multinomial::MultinomialManifold;
use infogeo::normal::{diagonal_dist, CenteredNormal, UnivariateNormal};
use infogeo::scalar::{ScalarFamily, ScalarManifold};
use infogeo::{GeodesicSolver, Manifold};
use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;

/// A resolved family: name plus whatever manifold object backs it.
pub enum Family {
    Scalar(ScalarManifold),
    /// Categorical (trials = 1) and multinomial simplex families; points
    /// are full simplex vectors, the manifold chart drops the last entry.
    Simplex(MultinomialManifold),
    Normal,
    NormalDiagonal { dim: usize },
    NormalCentered(CenteredNormal),
    Gamma,
    /// Dirichlet concentration parameters; beta is the n = 2 case.
    Dirichlet(DirichletManifold),
}

impl Family {
    /// Builds the family from its CLI name, the integer options and the
    /// coordinate width observed in the input.
    pub fn build(name: &str, n: Option<u32>, dim: Option<usize>, width: usize) -> Result<Family> {
        let need_width = |expected: usize| -> Result<()> {
            if width == expected {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected, got: width })
            }
        };
        match name {
            "bernoulli" => {
                need_width(1)?;
                Ok(Family::Scalar(ScalarManifold::new(ScalarFamily::Bernoulli)?))
            }
            "binomial" => {
                need_width(1)?;
                let n = n.ok_or_else(|| {
                    Error::Domain("binomial requires --n (number of trials)".into())
                })?;
                Ok(Family::Scalar(ScalarManifold::new(ScalarFamily::Binomial(n))?))
            }
            "poisson" => {
                need_width(1)?;
                Ok(Family::Scalar(ScalarManifold::new(ScalarFamily::Poisson)?))
            }
            "exponential" => {
                need_width(1)?;
                Ok(Family::Scalar(ScalarManifold::new(ScalarFamily::Exponential)?))
            }
            "geometric" => {
                need_width(1)?;
                Ok(Family::Scalar(ScalarManifold::new(ScalarFamily::Geometric)?))
            }
            "categorical" => Ok(Family::Simplex(MultinomialManifold::categorical(width)?)),
            "multinomial" => {
                let n = n.ok_or_else(|| {
                    Error::Domain("multinomial requires --n (number of trials)".into())
                })?;
                Ok(Family::Simplex(MultinomialManifold::new(width, n)?))
            }
            "normal" => {
                need_width(2)?;
                Ok(Family::Normal)
            }
            "normal-diagonal" => {
                let dim = dim.ok_or_else(|| {
                    Error::Domain("normal-diagonal requires --dim (number of components)".into())
                })?;
                need_width(2 * dim)?;
                Ok(Family::NormalDiagonal { dim })
            }
            "normal-centered" => {
                let dim = dim.ok_or_else(|| {
                    Error::Domain("normal-centered requires --dim (matrix size)".into())
                })?;
                need_width(dim * dim)?;
                Ok(Family::NormalCentered(CenteredNormal::new(DVector::zeros(dim))))
            }
            "gamma" => {
                need_width(2)?;
                Ok(Family::Gamma)
            }
            "beta" => {
                need_width(2)?;
                Ok(Family::Dirichlet(DirichletManifold::beta()))
            }
            "dirichlet" => {
                let dim = dim.ok_or_else(|| {
                    Error::Domain("dirichlet requires --dim (number of parameters)".into())
                })?;
                need_width(dim)?;
                Ok(Family::Dirichlet(DirichletManifold::new(dim)?))
            }
            other => Err(Error::Domain(format!(
                "unknown family '{other}' (expected one of bernoulli, binomial, poisson, \
                 exponential, geometric, categorical, multinomial, normal, normal-diagonal, \
                 normal-centered, gamma, beta, dirichlet)"
            ))),
        }
    }

    /// The geodesic-engine manifold behind the family, when it has one.
    pub fn manifold(&self) -> Result<&dyn Manifold> {
        match self {
            Family::Scalar(m) => Ok(m),
            Family::Simplex(m) => Ok(m),
            Family::Normal => Ok(&UnivariateNormal),
            Family::Gamma => Ok(&GammaManifold),
            Family::Dirichlet(m) => Ok(m),
            Family::NormalDiagonal { .. } | Family::NormalCentered(_) => Err(Error::Domain(
                "this operation is not supported for the diagonal/centered normal families"
                    .into(),
            )),
        }
    }

    /// CSV coordinates -> manifold chart (drops the dependent simplex
    /// entry for categorical/multinomial, identity elsewhere).
    pub fn to_internal(&self, raw: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            Family::Simplex(m) => {
                m.check_interior(raw)?;
                Ok(m.to_chart(raw))
            }
            _ => Ok(raw.clone()),
        }
    }

    /// Manifold chart -> CSV coordinates (restores the dependent simplex
    /// entry).
    pub fn from_internal(&self, internal: &DVector<f64>) -> DVector<f64> {
        match self {
            Family::Simplex(m) => m.from_chart(internal),
            _ => internal.clone(),
        }
    }

    /// Fisher-Rao distance between two points in CSV coordinates.
    /// `legacy_halfplane` switches the normal family to the isometric
    /// half-plane distance (sqrt(2) mean scaling).
    pub fn dist(
        &self,
        a: &DVector<f64>,
        b: &DVector<f64>,
        solver: &GeodesicSolver,
        legacy_halfplane: bool,
    ) -> Result<f64> {
        match self {
            Family::Normal if legacy_halfplane => {
                UnivariateNormal::legacy_halfplane_dist((a[0], a[1]), (b[0], b[1]))
            }
            Family::NormalDiagonal { dim } => {
                let pairs = |p: &DVector<f64>| -> Vec<(f64, f64)> {
                    (0..*dim).map(|i| (p[2 * i], p[2 * i + 1])).collect()
                };
                diagonal_dist(&pairs(a), &pairs(b))
            }
            Family::NormalCentered(m) => {
                let p = m.mean.len();
                let mat = |v: &DVector<f64>| DMatrix::from_row_slice(p, p, v.as_slice());
                m.dist(&mat(a), &mat(b))
            }
            _ => {
                if legacy_halfplane {
                    return Err(Error::Domain(
                        "--legacy-halfplane only applies to the normal family".into(),
                    ));
                }
                let manifold = self.manifold()?;
                solver.dist(manifold, &self.to_internal(a)?, &self.to_internal(b)?)
            }
        }
    }

    /// Draws `count` observations from the distribution at `point`.
    /// Returned as rows so that scalar draws are one-element rows.
    pub fn sample(
        &self,
        point: &DVector<f64>,
        count: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Vec<f64>>> {
        match self {
            Family::Scalar(m) => {
                Ok(m.sample(point[0], count, rng)?.into_iter().map(|x| vec![x]).collect())
            }
            Family::Simplex(m) => Ok(m
                .sample(point, count, rng)?
                .into_iter()
                .map(|counts| counts.into_iter().map(|c| c as f64).collect())
                .collect()),
            Family::Normal => Ok(UnivariateNormal::sample(point[0], point[1], count, rng)?
                .into_iter()
                .map(|x| vec![x])
                .collect()),
            Family::Gamma => Ok(GammaManifold::sample(point[0], point[1], count, rng)?
                .into_iter()
                .map(|x| vec![x])
                .collect()),
            Family::Dirichlet(m) => Ok(m
                .sample(point, count, rng)?
                .into_iter()
                .map(|v| v.as_slice().to_vec())
                .collect()),
            Family::NormalDiagonal { .. } | Family::NormalCentered(_) => Err(Error::Domain(
                "sampling is not supported for the diagonal/centered normal families".into(),
            )),
        }
    }

    /// Density (or probability mass) of the distribution at `point`,
    /// evaluated at observation `x`. Simplex families interpret `x` as a
    /// count vector; the Dirichlet takes a simplex point, with the beta
    /// case also accepting a scalar in (0, 1).
    pub fn pdf(&self, point: &DVector<f64>, x: &[f64]) -> Result<f64> {
        let scalar_x = |x: &[f64]| -> Result<f64> {
            if x.len() == 1 {
                Ok(x[0])
            } else {
                Err(Error::DimensionMismatch { expected: 1, got: x.len() })
            }
        };
        match self {
            Family::Scalar(m) => m.density(point[0], scalar_x(x)?),
            Family::Simplex(m) => {
                let counts: Vec<u32> = x
                    .iter()
                    .map(|&c| {
                        if c >= 0.0 && c.fract() == 0.0 {
                            Ok(c as u32)
                        } else {
                            Err(Error::Domain(format!("count {c} is not a nonnegative integer")))
                        }
                    })
                    .collect::<Result<_>>()?;
                m.pmf(point, &counts)
            }
            Family::Normal => Ok(UnivariateNormal::pdf(point[0], point[1])?(scalar_x(x)?)),
            Family::Gamma => Ok(GammaManifold::pdf(point[0], point[1])?(scalar_x(x)?)),
            Family::Dirichlet(m) => {
                if m.n == 2 && x.len() == 1 {
                    return Ok(DirichletManifold::beta_pdf(point[0], point[1])?(x[0]));
                }
                m.pdf_at(point, &DVector::from_column_slice(x))
            }
            Family::NormalDiagonal { .. } | Family::NormalCentered(_) => Err(Error::Domain(
                "pdf is not supported for the diagonal/centered normal families".into(),
            )),
        }
    }

    /// Sectional curvature at `point`: the family's constant when it has
    /// one, otherwise the numeric Riemann tensor on the first coordinate
    /// plane (basis-independent for two-parameter families).
    pub fn curvature(&self, point: &DVector<f64>, solver: &GeodesicSolver) -> Result<f64> {
        match self {
            Family::Scalar(_) => Err(Error::Domain(
                "sectional curvature needs at least two parameters".into(),
            )),
            Family::Normal => Ok(UnivariateNormal::sectional_curvature()),
            Family::Gamma => GammaManifold::sectional_curvature(point[0]),
            Family::Simplex(m) => m.sectional_curvature(),
            Family::Dirichlet(_) => {
                let manifold = self.manifold()?;
                let d = manifold.dim();
                let mut u = DVector::zeros(d);
                let mut v = DVector::zeros(d);
                u[0] = 1.0;
                v[1] = 1.0;
                solver.sectional_curvature(manifold, &self.to_internal(point)?, &u, &v)
            }
            Family::NormalDiagonal { .. } | Family::NormalCentered(_) => Err(Error::Domain(
                "curvature is not supported for the diagonal/centered normal families".into(),
            )),
        }
    }
}
