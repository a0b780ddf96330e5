//! One-dimensional families: Bernoulli, binomial (fixed n), Poisson,
//! exponential and geometric distributions.
//!
//! Each family carries an arclength coordinate phi with phi' = sqrt(I), in
//! which the Fisher-Rao geometry is Euclidean: distances are |phi(a) -
//! phi(b)| and geodesics are affine interpolations pulled back through
//! phi^{-1}.

use crate::error::{Error, Result};
use crate::geometry::manifold::{ChristoffelTensor, Manifold};
use crate::numerics::special::ln_gamma;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Tag of a one-parameter family. The binomial index n is fixed per
/// manifold instance; Bernoulli is the binomial with n = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarFamily {
    Bernoulli,
    Binomial(u32),
    Poisson,
    Exponential,
    Geometric,
}

impl ScalarFamily {
    /// Binomial index, with Bernoulli folded in as n = 1.
    fn index(self) -> Option<u32> {
        match self {
            ScalarFamily::Bernoulli => Some(1),
            ScalarFamily::Binomial(n) => Some(n),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScalarFamily::Bernoulli => "bernoulli",
            ScalarFamily::Binomial(_) => "binomial",
            ScalarFamily::Poisson => "poisson",
            ScalarFamily::Exponential => "exponential",
            ScalarFamily::Geometric => "geometric",
        }
    }

    /// Is the parameter a success probability in (0, 1)?
    fn is_probability(self) -> bool {
        !matches!(self, ScalarFamily::Poisson | ScalarFamily::Exponential)
    }
}

/// One-dimensional information manifold.
#[derive(Debug, Clone, Copy)]
pub struct ScalarManifold {
    pub family: ScalarFamily,
}

impl ScalarManifold {
    pub fn new(family: ScalarFamily) -> Result<Self> {
        if let ScalarFamily::Binomial(n) = family {
            if n == 0 {
                return Err(Error::Domain("binomial index must be >= 1".into()));
            }
        }
        Ok(ScalarManifold { family })
    }

    fn check_param(&self, theta: f64) -> Result<()> {
        let ok = if self.family.is_probability() {
            theta > 0.0 && theta < 1.0
        } else {
            theta > 0.0 && theta.is_finite()
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "parameter {theta} is outside the open domain of the {} family",
                self.family.name()
            )))
        }
    }

    /// P.d.f. or p.m.f. at a sample value.
    pub fn density(&self, theta: f64, x: f64) -> Result<f64> {
        self.check_param(theta)?;
        match self.family {
            ScalarFamily::Poisson => {
                let k = as_count(x, 0, i64::MAX)?;
                let logp = k as f64 * theta.ln() - theta - ln_gamma(k as f64 + 1.0)?;
                Ok(logp.exp())
            }
            ScalarFamily::Exponential => {
                if x < 0.0 {
                    return Err(Error::Domain(format!("sample {x} < 0")));
                }
                Ok(theta * (-theta * x).exp())
            }
            ScalarFamily::Bernoulli | ScalarFamily::Binomial(_) => {
                let n = self.family.index().unwrap() as i64;
                let k = as_count(x, 0, n)?;
                let log_choose = ln_gamma(n as f64 + 1.0)?
                    - ln_gamma(k as f64 + 1.0)?
                    - ln_gamma((n - k) as f64 + 1.0)?;
                let logp =
                    log_choose + k as f64 * theta.ln() + (n - k) as f64 * (1.0 - theta).ln();
                Ok(logp.exp())
            }
            ScalarFamily::Geometric => {
                let k = as_count(x, 1, i64::MAX)?;
                Ok((1.0 - theta).powi((k - 1) as i32) * theta)
            }
        }
    }

    /// Fisher information I(theta).
    pub fn fisher_information(&self, theta: f64) -> Result<f64> {
        self.check_param(theta)?;
        Ok(match self.family {
            ScalarFamily::Poisson => 1.0 / theta,
            ScalarFamily::Exponential => 1.0 / (theta * theta),
            ScalarFamily::Bernoulli | ScalarFamily::Binomial(_) => {
                self.family.index().unwrap() as f64 / (theta * (1.0 - theta))
            }
            ScalarFamily::Geometric => 1.0 / (theta * theta * (1.0 - theta)),
        })
    }

    /// Arclength coordinate phi(theta); phi' = sqrt(I).
    pub fn arclength_coord(&self, theta: f64) -> Result<f64> {
        // closed endpoints are accepted whenever phi stays finite there
        let phi = match self.family {
            ScalarFamily::Poisson => {
                require_range(theta, 0.0..=f64::INFINITY, "poisson")?;
                2.0 * theta.sqrt()
            }
            ScalarFamily::Exponential => {
                if theta <= 0.0 {
                    return Err(Error::InfiniteDistance(
                        "exponential arclength diverges as the rate approaches 0".into(),
                    ));
                }
                theta.ln()
            }
            ScalarFamily::Bernoulli | ScalarFamily::Binomial(_) => {
                require_range(theta, 0.0..=1.0, "binomial")?;
                let n = self.family.index().unwrap() as f64;
                2.0 * n.sqrt() * theta.sqrt().asin()
            }
            ScalarFamily::Geometric => {
                if theta <= 0.0 {
                    return Err(Error::InfiniteDistance(
                        "geometric arclength diverges as p approaches 0".into(),
                    ));
                }
                require_range(theta, 0.0..=1.0, "geometric")?;
                -2.0 * (1.0 - theta).sqrt().atanh()
            }
        };
        Ok(phi)
    }

    /// Inverse of the arclength coordinate.
    pub fn arclength_inverse(&self, phi: f64) -> Result<f64> {
        match self.family {
            ScalarFamily::Poisson => {
                if phi < 0.0 {
                    return Err(Error::Domain(format!("phi {phi} below the poisson range")));
                }
                Ok((phi / 2.0).powi(2))
            }
            ScalarFamily::Exponential => Ok(phi.exp()),
            ScalarFamily::Bernoulli | ScalarFamily::Binomial(_) => {
                let n = self.family.index().unwrap() as f64;
                let s = phi / (2.0 * n.sqrt());
                if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&s) {
                    return Err(Error::Domain(format!("phi {phi} outside the binomial range")));
                }
                Ok(s.sin().powi(2))
            }
            ScalarFamily::Geometric => {
                if phi > 0.0 {
                    return Err(Error::Domain(format!("phi {phi} outside the geometric range")));
                }
                let t = (phi / 2.0).tanh();
                Ok(1.0 - t * t)
            }
        }
    }

    /// Closed-form Fisher-Rao distance |phi(a) - phi(b)|.
    pub fn dist(&self, a: f64, b: f64) -> Result<f64> {
        Ok((self.arclength_coord(a)? - self.arclength_coord(b)?).abs())
    }

    /// Constant-speed geodesic point at parameter t in [0, 1].
    pub fn geodesic(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        let pa = self.arclength_coord(a)?;
        let pb = self.arclength_coord(b)?;
        self.arclength_inverse((1.0 - t) * pa + t * pb)
    }

    /// Draws `count` samples from the distribution with parameter `theta`.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        theta: f64,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        self.check_param(theta)?;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let v = match self.family {
                ScalarFamily::Exponential => -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln() / theta,
                ScalarFamily::Geometric => {
                    let u: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
                    (u.ln() / (1.0 - theta).ln()).ceil().max(1.0)
                }
                ScalarFamily::Bernoulli | ScalarFamily::Binomial(_) => {
                    let n = self.family.index().unwrap();
                    (0..n).filter(|_| rng.gen::<f64>() < theta).count() as f64
                }
                ScalarFamily::Poisson => {
                    // Knuth's product method
                    let limit = (-theta).exp();
                    let mut k = 0u64;
                    let mut prod: f64 = 1.0;
                    loop {
                        prod *= rng.gen::<f64>();
                        if prod <= limit {
                            break;
                        }
                        k += 1;
                    }
                    k as f64
                }
            };
            out.push(v);
        }
        Ok(out)
    }

    fn phi_prime(&self, theta: f64) -> Result<f64> {
        Ok(self.fisher_information(theta)?.sqrt())
    }
}

fn as_count(x: f64, lo: i64, hi: i64) -> Result<i64> {
    if x.fract() != 0.0 || x < lo as f64 || x > hi as f64 {
        return Err(Error::Domain(format!("sample {x} outside the discrete support")));
    }
    Ok(x as i64)
}

fn require_range(
    theta: f64,
    range: std::ops::RangeInclusive<f64>,
    family: &str,
) -> Result<()> {
    if range.contains(&theta) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "parameter {theta} outside the closed domain of the {family} family"
        )))
    }
}

impl Manifold for ScalarManifold {
    fn dim(&self) -> usize {
        1
    }

    fn belongs(&self, point: &DVector<f64>) -> bool {
        point.len() == 1 && self.check_param(point[0]).is_ok()
    }

    fn metric_matrix(&self, point: &DVector<f64>) -> Result<DMatrix<f64>> {
        Ok(DMatrix::from_element(1, 1, self.fisher_information(point[0])?))
    }

    fn metric_partials(&self, point: &DVector<f64>) -> Option<Result<Vec<DMatrix<f64>>>> {
        let theta = point[0];
        if self.check_param(theta).is_err() {
            return Some(Err(Error::Domain(format!("parameter {theta} outside domain"))));
        }
        let q = 1.0 - theta;
        let deriv = match self.family {
            ScalarFamily::Poisson => -1.0 / (theta * theta),
            ScalarFamily::Exponential => -2.0 / (theta * theta * theta),
            ScalarFamily::Bernoulli | ScalarFamily::Binomial(_) => {
                let n = self.family.index().unwrap() as f64;
                n * (2.0 * theta - 1.0) / (theta * theta * q * q)
            }
            ScalarFamily::Geometric => (3.0 * theta - 2.0) / (theta * theta * theta * q * q),
        };
        Some(Ok(vec![DMatrix::from_element(1, 1, deriv)]))
    }

    fn christoffels_closed(&self, point: &DVector<f64>) -> Option<Result<ChristoffelTensor>> {
        // Gamma = (1/2) g^{-1} g' in one dimension
        let partial = match self.metric_partials(point)? {
            Ok(p) => p[0][(0, 0)],
            Err(e) => return Some(Err(e)),
        };
        let g = match self.fisher_information(point[0]) {
            Ok(g) => g,
            Err(e) => return Some(Err(e)),
        };
        let mut tensor = ChristoffelTensor::zeros(1);
        tensor.gamma[0][(0, 0)] = 0.5 * partial / g;
        Some(Ok(tensor))
    }

    fn dist_closed(&self, a: &DVector<f64>, b: &DVector<f64>) -> Option<Result<f64>> {
        Some(self.dist(a[0], b[0]))
    }

    fn exp_closed(
        &self,
        point: &DVector<f64>,
        tangent: &DVector<f64>,
    ) -> Option<Result<DVector<f64>>> {
        let run = || -> Result<DVector<f64>> {
            let phi = self.arclength_coord(point[0])? + self.phi_prime(point[0])? * tangent[0];
            let theta = self.arclength_inverse(phi).map_err(|_| Error::IncompleteGeodesic {
                exit_time: 1.0,
            })?;
            if self.check_param(theta).is_err() {
                return Err(Error::IncompleteGeodesic { exit_time: 1.0 });
            }
            Ok(DVector::from_element(1, theta))
        };
        Some(run())
    }

    fn log_closed(&self, x: &DVector<f64>, y: &DVector<f64>) -> Option<Result<DVector<f64>>> {
        let run = || -> Result<DVector<f64>> {
            let v = (self.arclength_coord(y[0])? - self.arclength_coord(x[0])?)
                / self.phi_prime(x[0])?;
            Ok(DVector::from_element(1, v))
        };
        Some(run())
    }

    fn geodesic_closed(
        &self,
        a: &DVector<f64>,
        b: &DVector<f64>,
        t: f64,
    ) -> Option<Result<(DVector<f64>, DVector<f64>)>> {
        let run = || -> Result<(DVector<f64>, DVector<f64>)> {
            let theta = self.geodesic(a[0], b[0], t)?;
            let dphi = self.arclength_coord(b[0])? - self.arclength_coord(a[0])?;
            // velocity: d theta / dt = (phi(b) - phi(a)) / phi'(theta(t))
            let v = dphi / self.phi_prime(theta)?;
            Ok((DVector::from_element(1, theta), DVector::from_element(1, v)))
        };
        Some(run())
    }

    fn boundary_clearance(&self, point: &DVector<f64>) -> f64 {
        let theta = point[0];
        if !theta.is_finite() {
            return -1.0;
        }
        if self.family.is_probability() {
            theta.min(1.0 - theta)
        } else {
            theta
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn poisson() -> ScalarManifold {
        ScalarManifold::new(ScalarFamily::Poisson).unwrap()
    }

    fn geometric() -> ScalarManifold {
        ScalarManifold::new(ScalarFamily::Geometric).unwrap()
    }

    #[test]
    fn densities() {
        assert_relative_eq!(poisson().density(1.0, 0.0).unwrap(), (-1.0f64).exp(), epsilon = 1e-12);
        let bern = ScalarManifold::new(ScalarFamily::Bernoulli).unwrap();
        assert_relative_eq!(bern.density(0.5, 1.0).unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(geometric().density(0.5, 1.0).unwrap(), 0.5, epsilon = 1e-12);
        assert!(geometric().density(0.5, 0.0).is_err());
        assert!(bern.density(0.5, 2.0).is_err());
    }

    #[test]
    fn fisher_information_values() {
        assert_relative_eq!(geometric().fisher_information(0.5).unwrap(), 8.0, epsilon = 1e-12);
        let expf = ScalarManifold::new(ScalarFamily::Exponential).unwrap();
        assert_relative_eq!(expf.fisher_information(2.0).unwrap(), 0.25, epsilon = 1e-12);
        let bin5 = ScalarManifold::new(ScalarFamily::Binomial(5)).unwrap();
        assert_relative_eq!(bin5.fisher_information(0.5).unwrap(), 20.0, epsilon = 1e-12);
    }

    #[test]
    fn arclength_round_trip() {
        let g = geometric();
        let phi = g.arclength_coord(0.3).unwrap();
        assert_relative_eq!(g.arclength_inverse(phi).unwrap(), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn poisson_distance() {
        let p = poisson();
        assert_relative_eq!(
            (p.arclength_coord(1.0).unwrap() - p.arclength_coord(4.0).unwrap()).abs(),
            2.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(p.dist(1.0, 4.0).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn binomial_arclength_gap() {
        let b = ScalarManifold::new(ScalarFamily::Binomial(5)).unwrap();
        let d = (b.arclength_coord(0.7).unwrap() - b.arclength_coord(0.4).unwrap()).abs();
        let expected = 2.0 * 5.0_f64.sqrt()
            * ((0.7_f64.sqrt()).asin() - (0.4_f64.sqrt()).asin());
        assert_relative_eq!(d, expected, epsilon = 1e-12);
        assert_relative_eq!(d, 1.37043, epsilon = 1e-5);
    }

    #[test]
    fn exponential_distance_matches_log_ratio() {
        let e = ScalarManifold::new(ScalarFamily::Exponential).unwrap();
        assert_relative_eq!(e.dist(0.1, 2.0).unwrap(), 20.0_f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn geodesic_endpoints_and_midpoints() {
        let b = ScalarManifold::new(ScalarFamily::Binomial(5)).unwrap();
        assert_relative_eq!(b.geodesic(0.4, 0.7, 0.0).unwrap(), 0.4, epsilon = 1e-12);
        assert_relative_eq!(b.geodesic(0.4, 0.7, 1.0).unwrap(), 0.7, epsilon = 1e-12);
        // phi-midpoint oracle computed from the arclength coordinate
        let mid_phi =
            0.5 * (b.arclength_coord(0.4).unwrap() + b.arclength_coord(0.7).unwrap());
        let oracle = b.arclength_inverse(mid_phi).unwrap();
        assert_relative_eq!(b.geodesic(0.4, 0.7, 0.5).unwrap(), oracle, epsilon = 1e-12);
        assert_relative_eq!(oracle, 0.5524430967504949, epsilon = 1e-12);
        assert!(oracle > 0.55, "midpoint is pulled above the affine midpoint");
    }

    #[test]
    fn exponential_geodesic_is_geometric_mean() {
        let e = ScalarManifold::new(ScalarFamily::Exponential).unwrap();
        let mid = e.geodesic(0.1, 2.0, 0.5).unwrap();
        assert_relative_eq!(mid, 0.2_f64.sqrt(), epsilon = 1e-12);
        assert!((mid - 1.05).abs() > 0.5, "geodesic midpoint differs from affine midpoint");
    }

    #[test]
    fn geodesic_symmetry() {
        let b = ScalarManifold::new(ScalarFamily::Binomial(3)).unwrap();
        for &t in &[0.0, 0.25, 0.5, 0.9] {
            assert_relative_eq!(
                b.geodesic(0.2, 0.8, t).unwrap(),
                b.geodesic(0.8, 0.2, 1.0 - t).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn geometric_distance_monotone() {
        let g = geometric();
        let mut last = 0.0;
        for &p in &[0.45, 0.6, 0.75, 0.9] {
            let d = g.dist(0.4, p).unwrap();
            assert!(d > last);
            last = d;
        }
    }

    #[test]
    fn geometric_boundary_divergence() {
        let g = geometric();
        assert!(matches!(g.dist(0.0, 0.5), Err(Error::InfiniteDistance(_))));
        // p = 1 has finite phi
        assert!(g.dist(1.0, 0.5).is_ok());
    }

    #[test]
    fn sampling_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let e = ScalarManifold::new(ScalarFamily::Exponential).unwrap();
        let draws = e.sample(2.0, 100_000, &mut rng).unwrap();
        let mean: f64 = draws.iter().sum::<f64>() / draws.len() as f64;
        // Var = 1/lambda^2 -> 3 sigma CLT bound
        assert!((mean - 0.5).abs() < 3.0 * 0.5 / (draws.len() as f64).sqrt());

        let p = poisson();
        let draws = p.sample(4.0, 100_000, &mut rng).unwrap();
        let mean: f64 = draws.iter().sum::<f64>() / draws.len() as f64;
        let var: f64 =
            draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / draws.len() as f64;
        // Var of the sample variance is approx (mu4 - var^2)/n; generous 3 sigma
        assert!((var - 4.0).abs() < 0.2, "poisson sample variance {var}");

        let bern = ScalarManifold::new(ScalarFamily::Bernoulli).unwrap();
        let draws = bern.sample(0.999, 10_000, &mut rng).unwrap();
        let ones = draws.iter().filter(|&&x| x == 1.0).count();
        assert!(ones > 9_900);
    }
}
