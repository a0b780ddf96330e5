//! Adaptive Dormand-Prince 4(5) integration with cubic Hermite dense output.

use crate::error::{Error, Result};
use nalgebra::DVector;

/// An initial value problem y' = f(t, y) on [t0, t1].
pub struct OdeProblem<'a> {
    pub rhs: &'a dyn Fn(f64, &DVector<f64>) -> Result<DVector<f64>>,
    pub y0: DVector<f64>,
    pub t0: f64,
    pub t1: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl<'a> OdeProblem<'a> {
    pub fn new(
        rhs: &'a dyn Fn(f64, &DVector<f64>) -> Result<DVector<f64>>,
        y0: DVector<f64>,
        t0: f64,
        t1: f64,
        rtol: f64,
        atol: f64,
    ) -> Result<Self> {
        if !(t1 > t0) {
            return Err(Error::Domain(format!("time span [{t0}, {t1}] is empty")));
        }
        if !(rtol > 0.0 && atol > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        Ok(OdeProblem { rhs, y0, t0, t1, rtol, atol })
    }
}

/// Accepted steps of an integration, with dense evaluation in between.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub ts: Vec<f64>,
    pub ys: Vec<DVector<f64>>,
    /// f(t_i, y_i) at each accepted step, for Hermite interpolation.
    pub dys: Vec<DVector<f64>>,
}

impl Trajectory {
    pub fn end(&self) -> &DVector<f64> {
        self.ys.last().expect("trajectory has at least one sample")
    }

    /// Cubic Hermite interpolation of the state at time `t` (clamped to the
    /// integrated span). Returns (state, derivative).
    pub fn sample(&self, t: f64) -> (DVector<f64>, DVector<f64>) {
        let t = t.clamp(self.ts[0], *self.ts.last().unwrap());
        let idx = match self.ts.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return (self.ys[i].clone(), self.dys[i].clone()),
            Err(i) => i.saturating_sub(1).min(self.ts.len() - 2),
        };
        let (t0, t1) = (self.ts[idx], self.ts[idx + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (y0, y1) = (&self.ys[idx], &self.ys[idx + 1]);
        let (d0, d1) = (&self.dys[idx], &self.dys[idx + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let y = y0 * h00 + d0 * (h10 * h) + y1 * h01 + d1 * (h11 * h);
        // derivative of the Hermite cubic
        let g00 = (6.0 * s2 - 6.0 * s) / h;
        let g10 = 3.0 * s2 - 4.0 * s + 1.0;
        let g01 = (-6.0 * s2 + 6.0 * s) / h;
        let g11 = 3.0 * s2 - 2.0 * s;
        let dy = y0 * g00 + d0 * g10 + y1 * g01 + d1 * g11;
        (y, dy)
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates the problem with the adaptive Dormand-Prince 4(5) scheme.
pub fn integrate_ode(problem: &OdeProblem) -> Result<Trajectory> {
    let rhs = problem.rhs;
    let mut t = problem.t0;
    let mut y = problem.y0.clone();
    let mut dy = (rhs)(t, &y)?;
    let span = problem.t1 - problem.t0;
    let mut h = (span / 100.0).min(0.1 * span.max(1e-6));
    let h_min = 1e-14 * span.max(1.0);

    let mut traj = Trajectory {
        ts: vec![t],
        ys: vec![y.clone()],
        dys: vec![dy.clone()],
    };

    let mut k: Vec<DVector<f64>> = vec![DVector::zeros(y.len()); 7];
    let mut rejected_in_a_row = 0usize;
    // hard cap on accepted steps: anything beyond this signals a wildly
    // diverging trajectory, not a tolerance problem
    let max_steps = 20_000usize;
    while t < problem.t1 {
        if traj.ts.len() > max_steps {
            return Err(Error::IntegrationFailure {
                t,
                reason: "step budget exhausted".into(),
                state: y,
            });
        }
        if h < h_min {
            return Err(Error::IntegrationFailure {
                t,
                reason: "step size underflow".into(),
                state: y,
            });
        }
        if t + h > problem.t1 {
            h = problem.t1 - t;
        }
        k[0] = dy.clone();
        let mut failed = false;
        for i in 1..7 {
            let mut yi = y.clone();
            for (j, kj) in k.iter().enumerate().take(i) {
                if A[i][j] != 0.0 {
                    yi += kj * (h * A[i][j]);
                }
            }
            match (rhs)(t + C[i] * h, &yi) {
                Ok(v) => k[i] = v,
                Err(_) => {
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            h *= 0.25;
            rejected_in_a_row += 1;
            if rejected_in_a_row > 60 {
                return Err(Error::IntegrationFailure {
                    t,
                    reason: "right-hand side repeatedly failed".into(),
                    state: y,
                });
            }
            continue;
        }

        let mut y5 = y.clone();
        let mut y4 = y.clone();
        for i in 0..7 {
            if B5[i] != 0.0 {
                y5 += &k[i] * (h * B5[i]);
            }
            if B4[i] != 0.0 {
                y4 += &k[i] * (h * B4[i]);
            }
        }
        // scaled error norm
        let mut err: f64 = 0.0;
        for i in 0..y.len() {
            let scale = problem.atol + problem.rtol * y[i].abs().max(y5[i].abs());
            err = err.max(((y5[i] - y4[i]) / scale).abs());
        }
        if !err.is_finite() {
            h *= 0.25;
            rejected_in_a_row += 1;
            if rejected_in_a_row > 60 {
                return Err(Error::IntegrationFailure {
                    t,
                    reason: "non-finite error estimate".into(),
                    state: y,
                });
            }
            continue;
        }
        if err <= 1.0 {
            t += h;
            y = y5;
            dy = k[6].clone(); // FSAL
            traj.ts.push(t);
            traj.ys.push(y.clone());
            traj.dys.push(dy.clone());
            rejected_in_a_row = 0;
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            rejected_in_a_row += 1;
            if rejected_in_a_row > 60 {
                return Err(Error::IntegrationFailure {
                    t,
                    reason: "error control failed to accept a step".into(),
                    state: y,
                });
            }
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    Ok(traj)
}
