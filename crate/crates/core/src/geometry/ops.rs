//! Geodesic solver: Christoffel symbols, exponential and logarithm maps,
//! distances, discretized geodesics and parallel transport on any
//! [`Manifold`].

use crate::error::{Error, Result};
use crate::geometry::manifold::{
    metric_norm, ChristoffelTensor, GeodesicPath, GeodesicSample, Manifold,
};
use crate::numerics::fd::fd_matrix_partials;
use crate::numerics::ode::{integrate_ode, OdeProblem, Trajectory};
use nalgebra::{DMatrix, DVector};

/// Margin kept between an integrated geodesic and the coordinate boundary.
const BOUNDARY_MARGIN: f64 = 1e-8;

/// Tolerances and policies for the geodesic boundary value problems.
#[derive(Debug, Clone)]
pub struct GeodesicSolver {
    /// Relative tolerance of the geodesic ODE integration.
    pub rtol: f64,
    /// Absolute tolerance of the geodesic ODE integration.
    pub atol: f64,
    /// Shooting convergence threshold: |exp_x(v) - y|_inf <= shoot_tol * (1 + |y|_inf).
    pub shoot_tol: f64,
    /// Maximum Newton iterations of the shooting solver.
    pub max_newton: usize,
    /// When false, closed forms supplied by the family are ignored and
    /// everything is computed numerically. Used by cross-validation tests.
    pub use_closed_forms: bool,
}

impl Default for GeodesicSolver {
    fn default() -> Self {
        GeodesicSolver {
            rtol: 1e-10,
            atol: 1e-12,
            shoot_tol: 1e-9,
            max_newton: 100,
            use_closed_forms: true,
        }
    }
}

/// Endpoint specification for [`GeodesicSolver::geodesic`].
pub enum GeodesicEnd {
    Point(DVector<f64>),
    Tangent(DVector<f64>),
}

impl GeodesicSolver {
    /// Looser tolerances suitable for bulk distance computations in the
    /// learning algorithms.
    pub fn fast() -> Self {
        GeodesicSolver {
            rtol: 1e-7,
            atol: 1e-9,
            shoot_tol: 1e-6,
            ..Default::default()
        }
    }

    /// Christoffel symbols at a point: closed form when the family provides
    /// one, otherwise the Levi-Civita formula with metric partials (closed
    /// form or central differences).
    pub fn christoffels(
        &self,
        manifold: &dyn Manifold,
        point: &DVector<f64>,
    ) -> Result<ChristoffelTensor> {
        if self.use_closed_forms {
            if let Some(res) = manifold.christoffels_closed(point) {
                return res;
            }
        }
        let d = manifold.dim();
        let g = manifold.metric_matrix(point)?;
        let partials = match manifold.metric_partials(point) {
            Some(res) if self.use_closed_forms => res?,
            _ => fd_matrix_partials(|p| manifold.metric_matrix(p), point)?,
        };
        let g_inv = g.clone().try_inverse().ok_or_else(|| Error::SingularMetric {
            point: point.clone(),
        })?;
        let mut tensor = ChristoffelTensor::zeros(d);
        for k in 0..d {
            for i in 0..d {
                for j in i..d {
                    let mut sum = 0.0;
                    for l in 0..d {
                        sum += g_inv[(k, l)]
                            * (partials[i][(l, j)] + partials[j][(l, i)] - partials[l][(i, j)]);
                    }
                    let v = 0.5 * sum;
                    tensor.gamma[k][(i, j)] = v;
                    tensor.gamma[k][(j, i)] = v;
                }
            }
        }
        Ok(tensor)
    }

    fn geodesic_rhs(
        &self,
        manifold: &dyn Manifold,
        _t: f64,
        state: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let d = manifold.dim();
        let point = DVector::from_column_slice(&state.as_slice()[..d]);
        let velocity = DVector::from_column_slice(&state.as_slice()[d..]);
        if manifold.boundary_clearance(&point) < BOUNDARY_MARGIN {
            return Err(Error::Domain("geodesic reached the domain boundary".into()));
        }
        let gamma = self.christoffels(manifold, &point)?;
        let accel = -gamma.contract(&velocity, &velocity);
        let mut rhs = DVector::zeros(2 * d);
        rhs.rows_mut(0, d).copy_from(&velocity);
        rhs.rows_mut(d, d).copy_from(&accel);
        Ok(rhs)
    }

    /// Integrates the geodesic equation from `(point, tangent)` over
    /// t in [0, 1] and returns the full phase-space trajectory.
    pub fn exp_trajectory(
        &self,
        manifold: &dyn Manifold,
        point: &DVector<f64>,
        tangent: &DVector<f64>,
    ) -> Result<Trajectory> {
        let d = manifold.dim();
        if tangent.len() != d || point.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: tangent.len() });
        }
        let mut state = DVector::zeros(2 * d);
        state.rows_mut(0, d).copy_from(point);
        state.rows_mut(d, d).copy_from(tangent);
        let rhs = |t: f64, s: &DVector<f64>| self.geodesic_rhs(manifold, t, s);
        let problem = OdeProblem::new(&rhs, state, 0.0, 1.0, self.rtol, self.atol)?;
        integrate_ode(&problem).map_err(|e| match e {
            Error::IntegrationFailure { t, .. } => Error::IncompleteGeodesic { exit_time: t },
            other => other,
        })
    }

    /// Riemannian exponential map: endpoint of the geodesic departing from
    /// `point` with initial velocity `tangent`.
    pub fn exp(
        &self,
        manifold: &dyn Manifold,
        point: &DVector<f64>,
        tangent: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        if tangent.iter().all(|&c| c == 0.0) {
            return Ok(point.clone());
        }
        if self.use_closed_forms {
            if let Some(res) = manifold.exp_closed(point, tangent) {
                return res;
            }
        }
        let d = manifold.dim();
        let traj = self.exp_trajectory(manifold, point, tangent)?;
        Ok(DVector::from_column_slice(&traj.end().as_slice()[..d]))
    }

    /// Riemannian logarithm map solved by shooting: find `v` with
    /// exp_x(v) = y. Newton iterations with a finite-difference Jacobian,
    /// damped steps on stall, and segment continuation as a fallback.
    pub fn log(
        &self,
        manifold: &dyn Manifold,
        x: &DVector<f64>,
        y: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        if self.use_closed_forms {
            if let Some(res) = manifold.log_closed(x, y) {
                return res;
            }
        }
        let tol = self.shoot_tol * (1.0 + y.amax());
        if (y - x).amax() <= tol {
            return Ok(DVector::zeros(manifold.dim()));
        }
        let guess = y - x;
        match self.shoot(manifold, x, y, &guess, tol) {
            Ok(v) => Ok(v),
            Err(_) => self.log_by_continuation(manifold, x, y, tol),
        }
    }

    /// [`Self::log`] with an optional warm-start tangent. A good guess (for
    /// example the log toward a nearby previous base point) lets the Newton
    /// shooting converge directly, skipping the continuation fallback.
    pub fn log_with_guess(
        &self,
        manifold: &dyn Manifold,
        x: &DVector<f64>,
        y: &DVector<f64>,
        guess: Option<&DVector<f64>>,
    ) -> Result<DVector<f64>> {
        if self.use_closed_forms {
            if let Some(res) = manifold.log_closed(x, y) {
                return res;
            }
        }
        if let Some(g) = guess {
            if g.iter().all(|c| c.is_finite()) && g.amax() > 0.0 {
                let tol = self.shoot_tol * (1.0 + y.amax());
                if (y - x).amax() <= tol {
                    return Ok(DVector::zeros(manifold.dim()));
                }
                if let Ok(v) = self.shoot_capped(manifold, x, y, g, tol, self.max_newton) {
                    return Ok(v);
                }
            }
        }
        self.log(manifold, x, y)
    }

    /// Newton shooting from an initial tangent guess.
    fn shoot(
        &self,
        manifold: &dyn Manifold,
        x: &DVector<f64>,
        y: &DVector<f64>,
        guess: &DVector<f64>,
        tol: f64,
    ) -> Result<DVector<f64>> {
        self.shoot_capped(manifold, x, y, guess, tol, self.max_newton)
    }

    /// [`Self::shoot`] with an explicit iteration budget, so that probing
    /// attempts during continuation stay cheap when they fail.
    fn shoot_capped(
        &self,
        manifold: &dyn Manifold,
        x: &DVector<f64>,
        y: &DVector<f64>,
        guess: &DVector<f64>,
        tol: f64,
        max_newton: usize,
    ) -> Result<DVector<f64>> {
        // scale the guess down until the geodesic stays inside the domain
        let mut v = guess.clone();
        let mut endpoint = loop {
            match self.exp_numeric(manifold, x, &v) {
                Ok(p) => break p,
                Err(_) => {
                    v *= 0.5;
                    if v.norm() < 1e-14 * (1.0 + guess.norm()) {
                        return Err(Error::NonConvergence { iterations: 0, residual: f64::INFINITY });
                    }
                }
            }
        };
        let mut residual = (&endpoint - y).amax();
        let mut best = (v.clone(), residual);
        // Forward-difference Jacobian of v -> exp_x(v), reusing the already
        // known endpoint as the base value (d integrations instead of 2d).
        let forward_jac = |v: &DVector<f64>, endpoint: &DVector<f64>| -> Result<DMatrix<f64>> {
            let d = v.len();
            let mut cols = Vec::with_capacity(d);
            for i in 0..d {
                let attempt = |h: f64| -> Result<DVector<f64>> {
                    let mut vp = v.clone();
                    vp[i] += h;
                    Ok((self.exp_numeric(manifold, x, &vp)? - endpoint) / h)
                };
                let h = f64::EPSILON.powf(1.0 / 3.0) * v[i].abs().max(1.0);
                let col = match attempt(h) {
                    Ok(c) => c,
                    Err(_) => attempt(-h)?,
                };
                cols.push(col);
            }
            Ok(DMatrix::from_columns(&cols))
        };
        let mut jac = forward_jac(&v, &endpoint)?;
        let mut jac_fresh = true;
        for it in 0..max_newton {
            if residual <= tol {
                return Ok(v);
            }
            let rhs = y - &endpoint;
            let delta = match jac.clone().lu().solve(&rhs) {
                Some(d) => d,
                None => {
                    if jac_fresh {
                        return Err(Error::NonConvergence { iterations: it, residual });
                    }
                    jac = forward_jac(&v, &endpoint)?;
                    jac_fresh = true;
                    continue;
                }
            };
            // damped update: halve the step until the residual decreases
            let mut accepted = false;
            let mut alpha = 1.0;
            for _ in 0..10 {
                let trial = &v + &delta * alpha;
                if let Ok(p) = self.exp_numeric(manifold, x, &trial) {
                    let r = (&p - y).amax();
                    if r < residual {
                        // Broyden rank-1 update keeps the Jacobian current
                        // without further integrations
                        let step = &trial - &v;
                        let df = &p - &endpoint;
                        let denom = step.dot(&step);
                        if denom > 0.0 {
                            jac += (df - &jac * &step) * step.transpose() / denom;
                            jac_fresh = false;
                        }
                        v = trial;
                        endpoint = p;
                        residual = r;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                if !jac_fresh {
                    jac = forward_jac(&v, &endpoint)?;
                    jac_fresh = true;
                    continue;
                }
                return Err(Error::NonConvergence { iterations: it, residual: best.1 });
            }
            if residual < best.1 {
                best = (v.clone(), residual);
            }
        }
        if best.1 <= tol {
            Ok(best.0)
        } else {
            Err(Error::NonConvergence { iterations: max_newton, residual: best.1 })
        }
    }

    /// Continuation fallback: lift the coordinate segment from x to y
    /// through intermediate shooting targets, warm-starting each solve from
    /// the previous tangent.
    fn log_by_continuation(
        &self,
        manifold: &dyn Manifold,
        x: &DVector<f64>,
        y: &DVector<f64>,
        tol: f64,
    ) -> Result<DVector<f64>> {
        let mut last_err = Error::NonConvergence { iterations: 0, residual: f64::INFINITY };
        // March the shooting target from x toward y along the coordinate
        // segment, warm-starting each solve from the previous tangent and
        // adapting the step to the difficulty of the local solves.
        let mut done = 0.0f64;
        let mut v: Option<DVector<f64>> = None;
        let mut step = 0.5f64;
        while done < 1.0 {
            if step < 1.0 / 1024.0 {
                return Err(last_err);
            }
            let s = (done + step).min(1.0);
            let target = x + (y - x) * s;
            if !manifold.belongs(&target) {
                step *= 0.5;
                continue;
            }
            let guess = match &v {
                Some(prev) => prev * (s / done),
                None => (y - x) * s,
            };
            // intermediate targets get a small iteration budget so failed
            // probes stay cheap; the final target gets the full budget
            let budget = if s >= 1.0 { self.max_newton } else { 25 };
            match self.shoot_capped(manifold, x, &target, &guess, tol, budget) {
                Ok(w) => {
                    v = Some(w);
                    done = s;
                    step *= 1.7;
                }
                Err(e) => {
                    last_err = e;
                    step *= 0.5;
                }
            }
        }
        v.ok_or(last_err)
    }

    /// Numeric exponential, bypassing closed forms (shooting must invert
    /// the same map it iterates on).
    fn exp_numeric(
        &self,
        manifold: &dyn Manifold,
        point: &DVector<f64>,
        tangent: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        if tangent.iter().all(|&c| c == 0.0) {
            return Ok(point.clone());
        }
        let d = manifold.dim();
        let traj = self.exp_trajectory(manifold, point, tangent)?;
        Ok(DVector::from_column_slice(&traj.end().as_slice()[..d]))
    }

    /// Geodesic distance: the family's closed form when available,
    /// otherwise |log_x(y)|_x.
    pub fn dist(&self, manifold: &dyn Manifold, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        if self.use_closed_forms {
            if let Some(res) = manifold.dist_closed(x, y) {
                return res;
            }
        }
        let v = self.log(manifold, x, y)?;
        metric_norm(manifold, x, &v)
    }

    /// Discretized constant-speed geodesic with `n_samples + 1` samples.
    pub fn geodesic(
        &self,
        manifold: &dyn Manifold,
        x: &DVector<f64>,
        end: GeodesicEnd,
        n_samples: usize,
    ) -> Result<GeodesicPath> {
        if n_samples == 0 {
            return Err(Error::Domain("n_samples must be positive".into()));
        }
        if self.use_closed_forms {
            if let GeodesicEnd::Point(ref y) = end {
                if manifold.geodesic_closed(x, y, 0.0).is_some() {
                    let mut samples = Vec::with_capacity(n_samples + 1);
                    for i in 0..=n_samples {
                        let t = i as f64 / n_samples as f64;
                        let (p, v) = manifold
                            .geodesic_closed(x, y, t)
                            .expect("closed-form geodesic")?;
                        samples.push(GeodesicSample { t, point: p, velocity: v });
                    }
                    let length = metric_norm(manifold, x, &samples[0].velocity)?;
                    return Ok(GeodesicPath { samples, length });
                }
            }
        }
        let v = match end {
            GeodesicEnd::Point(ref y) => self.log(manifold, x, y)?,
            GeodesicEnd::Tangent(v) => v,
        };
        let d = manifold.dim();
        if v.iter().all(|&c| c == 0.0) {
            let samples = (0..=n_samples)
                .map(|i| GeodesicSample {
                    t: i as f64 / n_samples as f64,
                    point: x.clone(),
                    velocity: DVector::zeros(d),
                })
                .collect();
            return Ok(GeodesicPath { samples, length: 0.0 });
        }
        let traj = self.exp_trajectory(manifold, x, &v)?;
        let mut samples = Vec::with_capacity(n_samples + 1);
        for i in 0..=n_samples {
            let t = i as f64 / n_samples as f64;
            let (state, _) = traj.sample(t);
            samples.push(GeodesicSample {
                t,
                point: DVector::from_column_slice(&state.as_slice()[..d]),
                velocity: DVector::from_column_slice(&state.as_slice()[d..]),
            });
        }
        let length = metric_norm(manifold, x, &v)?;
        Ok(GeodesicPath { samples, length })
    }

    /// Parallel transport of `u` along a discretized geodesic path.
    pub fn parallel_transport(
        &self,
        manifold: &dyn Manifold,
        u: &DVector<f64>,
        path: &GeodesicPath,
    ) -> Result<DVector<f64>> {
        let d = manifold.dim();
        if u.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: u.len() });
        }
        if path.length == 0.0 {
            return Ok(u.clone());
        }
        // Hermite interpolation of the path: positions with their exact
        // velocities as derivatives.
        let curve = Trajectory {
            ts: path.samples.iter().map(|s| s.t).collect(),
            ys: path.samples.iter().map(|s| s.point.clone()).collect(),
            dys: path.samples.iter().map(|s| s.velocity.clone()).collect(),
        };
        let rhs = |t: f64, w: &DVector<f64>| -> Result<DVector<f64>> {
            let (point, velocity) = curve.sample(t);
            let gamma = self.christoffels(manifold, &point)?;
            Ok(-gamma.contract(&velocity, w))
        };
        let problem = OdeProblem::new(&rhs, u.clone(), 0.0, 1.0, self.rtol.max(1e-10), self.atol)?;
        let traj = integrate_ode(&problem)?;
        Ok(traj.end().clone())
    }

    /// Logarithm map with closed forms disabled: always solves the
    /// boundary value problem numerically. Cross-validation helper.
    pub fn log_numeric(
        &self,
        manifold: &dyn Manifold,
        x: &DVector<f64>,
        y: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let mut solver = self.clone();
        solver.use_closed_forms = false;
        solver.log(manifold, x, y)
    }

    /// Distance with closed forms disabled. Cross-validation helper.
    pub fn dist_numeric(
        &self,
        manifold: &dyn Manifold,
        x: &DVector<f64>,
        y: &DVector<f64>,
    ) -> Result<f64> {
        let mut solver = self.clone();
        solver.use_closed_forms = false;
        solver.dist(manifold, x, y)
    }

    /// Christoffel symbols from central differences of the metric matrix,
    /// ignoring any closed forms. Cross-validation helper.
    pub fn christoffels_numeric(
        &self,
        manifold: &dyn Manifold,
        point: &DVector<f64>,
    ) -> Result<ChristoffelTensor> {
        let mut solver = self.clone();
        solver.use_closed_forms = false;
        solver.christoffels(manifold, point)
    }

    /// Speed profile check helper: metric norm of the velocity at each
    /// sample of a path.
    pub fn speeds(&self, manifold: &dyn Manifold, path: &GeodesicPath) -> Result<Vec<f64>> {
        path.samples
            .iter()
            .map(|s| metric_norm(manifold, &s.point, &s.velocity))
            .collect()
    }
}

/// Convenience free function mirroring [`inner_product`].
pub fn norm(manifold: &dyn Manifold, point: &DVector<f64>, u: &DVector<f64>) -> Result<f64> {
    metric_norm(manifold, point, u)
}

/// Length of a discretized path by trapezoidal integration of the metric
/// speed. Independent of the |log|-based distance route; used as an oracle
/// in tests and exposed for diagnostics.
pub fn path_length(manifold: &dyn Manifold, path: &GeodesicPath) -> Result<f64> {
    let mut total = 0.0;
    for pair in path.samples.windows(2) {
        let s0 = metric_norm(manifold, &pair[0].point, &pair[0].velocity)?;
        let s1 = metric_norm(manifold, &pair[1].point, &pair[1].velocity)?;
        total += 0.5 * (s0 + s1) * (pair[1].t - pair[0].t);
    }
    Ok(total)
}

/// Pushes a matrix through `inner_product` checks: verifies symmetry and
/// positive definiteness of a metric matrix.
pub fn check_metric(point: &DVector<f64>, g: &DMatrix<f64>) -> Result<()> {
    let d = g.nrows();
    for i in 0..d {
        for j in (i + 1)..d {
            let denom = g[(i, j)].abs().max(g[(j, i)].abs()).max(1.0);
            if (g[(i, j)] - g[(j, i)]).abs() > 1e-10 * denom {
                return Err(Error::NotPositiveDefinite {
                    point: point.clone(),
                    hint: "matrix is not symmetric".into(),
                });
            }
        }
    }
    let eig = g.clone().symmetric_eigen();
    let min = eig.eigenvalues.min();
    if min <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            point: point.clone(),
            hint: format!("smallest eigenvalue {min:.3e}"),
        });
    }
    Ok(())
}

/// Inner product re-export at module level for discoverability.
pub use crate::geometry::manifold::inner_product as metric_inner_product;
