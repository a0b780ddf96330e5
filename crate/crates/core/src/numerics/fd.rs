//! Central finite differences for gradients, Hessians and per-coordinate
//! partials of matrix-valued functions.
//!
//! Step sizes follow the usual optimal-order choices: eps^(1/3) for first
//! derivatives and eps^(1/4) for second derivatives, scaled by the
//! coordinate magnitude. If an evaluation lands outside the function's
//! domain, the step is shrunk once (h/4) before giving up.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

fn step_first(x: f64) -> f64 {
    f64::EPSILON.powf(1.0 / 3.0) * x.abs().max(1.0)
}

fn step_second(x: f64) -> f64 {
    f64::EPSILON.powf(0.25) * x.abs().max(1.0)
}

fn central<F: Fn(&DVector<f64>) -> Result<f64>>(
    f: &F,
    x: &DVector<f64>,
    i: usize,
    h: f64,
) -> Result<f64> {
    let mut xp = x.clone();
    let mut xm = x.clone();
    xp[i] += h;
    xm[i] -= h;
    Ok((f(&xp)? - f(&xm)?) / (2.0 * h))
}

/// Gradient of a scalar function by central differences.
pub fn fd_gradient<F: Fn(&DVector<f64>) -> Result<f64>>(
    f: F,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    let mut g = DVector::zeros(x.len());
    for i in 0..x.len() {
        let h = step_first(x[i]);
        g[i] = match central(&f, x, i, h) {
            Ok(v) => v,
            Err(_) => central(&f, x, i, h / 4.0).map_err(|_| Error::FiniteDifference {
                point: x.clone(),
                reason: format!("evaluation failed along coordinate {i}"),
            })?,
        };
    }
    Ok(g)
}

/// Symmetrized Hessian of a scalar function by central differences.
pub fn fd_hessian<F: Fn(&DVector<f64>) -> Result<f64>>(
    f: F,
    x: &DVector<f64>,
) -> Result<DMatrix<f64>> {
    let d = x.len();
    let mut hess = DMatrix::zeros(d, d);
    let f0 = f(x)?;
    let hs: Vec<f64> = x.iter().map(|&xi| step_second(xi)).collect();
    for i in 0..d {
        // diagonal: (f(x+h) - 2 f(x) + f(x-h)) / h^2
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += hs[i];
        xm[i] -= hs[i];
        hess[(i, i)] = (f(&xp)? - 2.0 * f0 + f(&xm)?) / (hs[i] * hs[i]);
        for j in (i + 1)..d {
            let mut xpp = x.clone();
            let mut xpm = x.clone();
            let mut xmp = x.clone();
            let mut xmm = x.clone();
            xpp[i] += hs[i];
            xpp[j] += hs[j];
            xpm[i] += hs[i];
            xpm[j] -= hs[j];
            xmp[i] -= hs[i];
            xmp[j] += hs[j];
            xmm[i] -= hs[i];
            xmm[j] -= hs[j];
            let v = (f(&xpp)? - f(&xpm)? - f(&xmp)? + f(&xmm)?) / (4.0 * hs[i] * hs[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    // symmetrize against rounding noise
    let sym = (&hess + hess.transpose()) * 0.5;
    Ok(sym)
}

/// Partial derivatives of a matrix-valued function: returns one matrix
/// dF/dx_i per coordinate.
pub fn fd_matrix_partials<F: Fn(&DVector<f64>) -> Result<DMatrix<f64>>>(
    f: F,
    x: &DVector<f64>,
) -> Result<Vec<DMatrix<f64>>> {
    fd_matrix_partials_with_step(f, x, None)
}

/// [`fd_matrix_partials`] with an explicit relative step, for functions
/// whose own evaluation error dominates rounding (a larger step trades
/// truncation error against that noise).
pub fn fd_matrix_partials_with_step<F: Fn(&DVector<f64>) -> Result<DMatrix<f64>>>(
    f: F,
    x: &DVector<f64>,
    rel_step: Option<f64>,
) -> Result<Vec<DMatrix<f64>>> {
    let mut partials = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let attempt = |h: f64| -> Result<DMatrix<f64>> {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            Ok((f(&xp)? - f(&xm)?) / (2.0 * h))
        };
        let h = match rel_step {
            Some(r) => r * x[i].abs().max(1.0),
            None => step_first(x[i]),
        };
        let p = match attempt(h) {
            Ok(v) => v,
            Err(_) => attempt(h / 4.0).map_err(|_| Error::FiniteDifference {
                point: x.clone(),
                reason: format!("matrix evaluation failed along coordinate {i}"),
            })?,
        };
        partials.push(p);
    }
    Ok(partials)
}

/// Jacobian of a vector-valued function by central differences.
pub fn fd_jacobian<F: Fn(&DVector<f64>) -> Result<DVector<f64>>>(
    f: F,
    x: &DVector<f64>,
) -> Result<DMatrix<f64>> {
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let attempt = |h: f64| -> Result<DVector<f64>> {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            Ok((f(&xp)? - f(&xm)?) / (2.0 * h))
        };
        let h = step_first(x[i]);
        let col = match attempt(h) {
            Ok(v) => v,
            Err(_) => attempt(h / 4.0).map_err(|_| Error::FiniteDifference {
                point: x.clone(),
                reason: format!("evaluation failed along coordinate {i}"),
            })?,
        };
        cols.push(col);
    }
    Ok(DMatrix::from_columns(&cols))
}
