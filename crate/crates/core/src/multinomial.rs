//! Multinomial / categorical manifold on the open probability simplex.
//!
//! The Fisher-Rao geometry is the pullback of the round metric on the
//! positive orthant of the sphere of radius 2 sqrt(n) through
//! R(theta) = (2 sqrt(n theta_1), ..., 2 sqrt(n theta_k)); distances and
//! geodesics are computed through that map. For matrix-form operations the
//! simplex is charted by its first k-1 coordinates.

use crate::error::{Error, Result};
use crate::geometry::manifold::Manifold;
use crate::numerics::special::ln_gamma;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// The n-multinomial manifold over k outcomes (n = 1 is categorical).
#[derive(Debug, Clone, Copy)]
pub struct MultinomialManifold {
    pub outcomes: usize,
    pub trials: u32,
}

impl MultinomialManifold {
    pub fn new(outcomes: usize, trials: u32) -> Result<Self> {
        if outcomes < 2 {
            return Err(Error::Domain("need at least 2 outcomes".into()));
        }
        if trials == 0 {
            return Err(Error::Domain("trial count must be >= 1".into()));
        }
        Ok(MultinomialManifold { outcomes, trials })
    }

    pub fn categorical(outcomes: usize) -> Result<Self> {
        Self::new(outcomes, 1)
    }

    fn radius(&self) -> f64 {
        2.0 * (self.trials as f64).sqrt()
    }

    /// Validates a point of the open simplex.
    pub fn check_interior(&self, theta: &DVector<f64>) -> Result<()> {
        self.check_closed(theta)?;
        if theta.iter().any(|&x| x <= 0.0) {
            return Err(Error::Domain("simplex point has a zero or negative entry".into()));
        }
        Ok(())
    }

    /// Validates a point of the closed simplex (boundary allowed).
    pub fn check_closed(&self, theta: &DVector<f64>) -> Result<()> {
        if theta.len() != self.outcomes {
            return Err(Error::DimensionMismatch { expected: self.outcomes, got: theta.len() });
        }
        if theta.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::Domain("simplex entries must be nonnegative".into()));
        }
        let sum: f64 = theta.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("simplex entries sum to {sum}, not 1")));
        }
        Ok(())
    }

    /// P.m.f. of the n-multinomial at a count vector.
    pub fn pmf(&self, theta: &DVector<f64>, counts: &[u32]) -> Result<f64> {
        self.check_interior(theta)?;
        if counts.len() != self.outcomes {
            return Err(Error::DimensionMismatch { expected: self.outcomes, got: counts.len() });
        }
        let n = self.trials;
        if counts.iter().sum::<u32>() != n {
            return Err(Error::Domain(format!(
                "counts sum to {}, expected {n}",
                counts.iter().sum::<u32>()
            )));
        }
        let mut logp = ln_gamma(n as f64 + 1.0)?;
        for (&x, &p) in counts.iter().zip(theta.iter()) {
            logp += x as f64 * p.ln() - ln_gamma(x as f64 + 1.0)?;
        }
        Ok(logp.exp())
    }

    /// Inner product of two tangent vectors (full k coordinates, components
    /// summing to zero) at an interior point: n sum u_i v_i / theta_i.
    pub fn inner_product_full(
        &self,
        theta: &DVector<f64>,
        u: &DVector<f64>,
        v: &DVector<f64>,
    ) -> Result<f64> {
        self.check_interior(theta)?;
        for w in [u, v] {
            let sum: f64 = w.iter().sum();
            if sum.abs() > 1e-9 {
                return Err(Error::NotTangent { sum });
            }
        }
        let n = self.trials as f64;
        Ok(n * u
            .iter()
            .zip(v.iter())
            .zip(theta.iter())
            .map(|((a, b), p)| a * b / p)
            .sum::<f64>())
    }

    /// Image of a simplex point on the sphere of radius 2 sqrt(n).
    pub fn sphere_map(&self, theta: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_closed(theta)?;
        let n = self.trials as f64;
        Ok(theta.map(|p| 2.0 * (n * p).sqrt()))
    }

    /// Inverse of the sphere map: theta_i = r_i^2 / (4n).
    pub fn sphere_map_inverse(&self, r: &DVector<f64>) -> Result<DVector<f64>> {
        if r.len() != self.outcomes {
            return Err(Error::DimensionMismatch { expected: self.outcomes, got: r.len() });
        }
        if r.iter().any(|&x| x <= 0.0) {
            return Err(Error::Domain("sphere image entries must be positive".into()));
        }
        let n = self.trials as f64;
        Ok(r.map(|x| x * x / (4.0 * n)))
    }

    /// Closed-form Fisher-Rao distance 2 sqrt(n) arccos(sum sqrt(a_i b_i)).
    /// Accepts the closed simplex; the formula is continuous up to the
    /// boundary.
    pub fn dist(&self, a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
        self.check_closed(a)?;
        self.check_closed(b)?;
        let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x * y).sqrt()).sum();
        Ok(self.radius() * dot.clamp(-1.0, 1.0).acos())
    }

    /// Constant-speed geodesic between interior points: great-circle
    /// interpolation of the sphere images pulled back to the simplex.
    /// Returns (point, velocity) in full coordinates.
    pub fn geodesic(
        &self,
        a: &DVector<f64>,
        b: &DVector<f64>,
        t: f64,
    ) -> Result<(DVector<f64>, DVector<f64>)> {
        self.check_interior(a)?;
        self.check_interior(b)?;
        let ra = self.sphere_map(a)?;
        let rb = self.sphere_map(b)?;
        let radius = self.radius();
        let cosang = (ra.dot(&rb) / (radius * radius)).clamp(-1.0, 1.0);
        let omega = cosang.acos();
        if omega < 1e-14 {
            return Ok((a.clone(), DVector::zeros(self.outcomes)));
        }
        // antipodal images cannot occur on the positive orthant
        assert!(omega < std::f64::consts::PI - 1e-9);
        let sin_omega = omega.sin();
        let r = (&ra * ((1.0 - t) * omega).sin() + &rb * (t * omega).sin()) / sin_omega;
        let dr = (&ra * (-omega * ((1.0 - t) * omega).cos())
            + &rb * (omega * (t * omega).cos()))
            / sin_omega;
        let n = self.trials as f64;
        let point = r.map(|x| x * x / (4.0 * n));
        let velocity = DVector::from_iterator(
            self.outcomes,
            r.iter().zip(dr.iter()).map(|(ri, dri)| ri * dri / (2.0 * n)),
        );
        Ok((point, velocity))
    }

    /// Constant sectional curvature 1/(4n) of the sphere of radius
    /// 2 sqrt(n). Requires k >= 3 so that a tangent 2-plane exists.
    pub fn sectional_curvature(&self) -> Result<f64> {
        if self.outcomes < 3 {
            return Err(Error::Domain(
                "sectional curvature needs at least 3 outcomes (a tangent 2-plane)".into(),
            ));
        }
        Ok(1.0 / (4.0 * self.trials as f64))
    }

    /// Draws `count` count-vectors of n categorical trials each.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        theta: &DVector<f64>,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<Vec<u32>>> {
        self.check_interior(theta)?;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let mut counts = vec![0u32; self.outcomes];
            for _ in 0..self.trials {
                let mut u: f64 = rng.gen();
                let mut idx = self.outcomes - 1;
                for (i, &p) in theta.iter().enumerate() {
                    if u < p {
                        idx = i;
                        break;
                    }
                    u -= p;
                }
                counts[idx] += 1;
            }
            out.push(counts);
        }
        Ok(out)
    }

    /// Chart coordinates (first k-1 simplex entries) of a full point.
    pub fn to_chart(&self, theta: &DVector<f64>) -> DVector<f64> {
        DVector::from_column_slice(&theta.as_slice()[..self.outcomes - 1])
    }

    /// Full simplex point from chart coordinates.
    pub fn from_chart(&self, chart: &DVector<f64>) -> DVector<f64> {
        let mut theta = DVector::zeros(self.outcomes);
        let mut sum = 0.0;
        for i in 0..self.outcomes - 1 {
            theta[i] = chart[i];
            sum += chart[i];
        }
        theta[self.outcomes - 1] = 1.0 - sum;
        theta
    }

    fn chart_tangent_to_full(&self, u: &DVector<f64>) -> DVector<f64> {
        let mut full = DVector::zeros(self.outcomes);
        let mut sum = 0.0;
        for i in 0..self.outcomes - 1 {
            full[i] = u[i];
            sum += u[i];
        }
        full[self.outcomes - 1] = -sum;
        full
    }
}

/// The manifold interface works in the chart given by the first k-1
/// simplex coordinates.
impl Manifold for MultinomialManifold {
    fn dim(&self) -> usize {
        self.outcomes - 1
    }

    fn belongs(&self, chart: &DVector<f64>) -> bool {
        chart.len() == self.outcomes - 1
            && self.check_interior(&self.from_chart(chart)).is_ok()
    }

    fn metric_matrix(&self, chart: &DVector<f64>) -> Result<DMatrix<f64>> {
        let theta = self.from_chart(chart);
        self.check_interior(&theta)?;
        let d = self.dim();
        let n = self.trials as f64;
        let last = theta[self.outcomes - 1];
        let mut g = DMatrix::from_element(d, d, n / last);
        for i in 0..d {
            g[(i, i)] += n / theta[i];
        }
        Ok(g)
    }

    fn metric_partials(&self, chart: &DVector<f64>) -> Option<Result<Vec<DMatrix<f64>>>> {
        let theta = self.from_chart(chart);
        if self.check_interior(&theta).is_err() {
            return Some(Err(Error::Domain("point outside the open simplex".into())));
        }
        let d = self.dim();
        let n = self.trials as f64;
        let last = theta[self.outcomes - 1];
        let mut partials = Vec::with_capacity(d);
        for l in 0..d {
            // d theta_k / d chart_l = -1
            let mut p = DMatrix::from_element(d, d, n / (last * last));
            p[(l, l)] -= n / (theta[l] * theta[l]);
            partials.push(p);
        }
        Some(Ok(partials))
    }

    fn dist_closed(&self, a: &DVector<f64>, b: &DVector<f64>) -> Option<Result<f64>> {
        Some(self.dist(&self.from_chart(a), &self.from_chart(b)))
    }

    fn exp_closed(
        &self,
        chart: &DVector<f64>,
        tangent: &DVector<f64>,
    ) -> Option<Result<DVector<f64>>> {
        let run = || -> Result<DVector<f64>> {
            let theta = self.from_chart(chart);
            self.check_interior(&theta)?;
            let u = self.chart_tangent_to_full(tangent);
            let n = self.trials as f64;
            let r = self.sphere_map(&theta)?;
            let w = DVector::from_iterator(
                self.outcomes,
                u.iter().zip(theta.iter()).map(|(ui, ti)| n.sqrt() * ui / ti.sqrt()),
            );
            let norm = w.norm();
            if norm == 0.0 {
                return Ok(chart.clone());
            }
            let radius = self.radius();
            let ang = norm / radius;
            let r_end = &r * ang.cos() + &w * (ang.sin() * radius / norm);
            if r_end.iter().any(|&x| x <= 0.0) {
                return Err(Error::IncompleteGeodesic { exit_time: 1.0 });
            }
            let theta_end = self.sphere_map_inverse(&r_end)?;
            Ok(self.to_chart(&theta_end))
        };
        Some(run())
    }

    fn log_closed(&self, x: &DVector<f64>, y: &DVector<f64>) -> Option<Result<DVector<f64>>> {
        let run = || -> Result<DVector<f64>> {
            let ta = self.from_chart(x);
            let tb = self.from_chart(y);
            self.check_interior(&ta)?;
            self.check_interior(&tb)?;
            let ra = self.sphere_map(&ta)?;
            let rb = self.sphere_map(&tb)?;
            let radius = self.radius();
            let cosang = (ra.dot(&rb) / (radius * radius)).clamp(-1.0, 1.0);
            let omega = cosang.acos();
            if omega < 1e-14 {
                return Ok(DVector::zeros(self.dim()));
            }
            let w = (&rb - &ra * cosang) * (omega / omega.sin());
            let n = self.trials as f64;
            let u = DVector::from_iterator(
                self.outcomes,
                w.iter().zip(ta.iter()).map(|(wi, ti)| wi * ti.sqrt() / n.sqrt()),
            );
            Ok(self.to_chart(&u))
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
            let (p, v) = self.geodesic(&self.from_chart(a), &self.from_chart(b), t)?;
            Ok((self.to_chart(&p), self.to_chart(&v)))
        };
        Some(run())
    }

    fn boundary_clearance(&self, chart: &DVector<f64>) -> f64 {
        let theta = self.from_chart(chart);
        theta.iter().fold(f64::INFINITY, |acc, &x| acc.min(x))
    }
}
