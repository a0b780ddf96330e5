//! Gauss-Legendre quadrature and expectation over continuous or discrete
//! supports.

use crate::error::{Error, Result};

/// Support over which an expectation is evaluated.
#[derive(Debug, Clone)]
pub enum QuadratureRule {
    /// Gauss-Legendre on a real interval [a, b] with the given node count.
    Continuous { a: f64, b: f64, nodes: usize },
    /// Plain summation over the integer range [lo, hi]. When `hi` is `None`
    /// the sum runs upward from `lo` and truncates once a term falls below
    /// 1e-14 of the accumulated sum.
    Discrete { lo: i64, hi: Option<i64> },
}

impl QuadratureRule {
    pub fn continuous(a: f64, b: f64, nodes: usize) -> Result<Self> {
        if !(a < b) {
            return Err(Error::Domain(format!("interval [{a}, {b}] is empty")));
        }
        if nodes == 0 {
            return Err(Error::Domain("node count must be positive".into()));
        }
        Ok(QuadratureRule::Continuous { a, b, nodes })
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre polynomial with the Chebyshev-style initial guess.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_n'(x)
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integrates `f` over the rule's support: Gauss-Legendre weighted sum for
/// continuous supports, plain (possibly truncated) summation for discrete
/// ones.
pub fn quadrature_expectation<F: Fn(f64) -> f64>(f: F, rule: &QuadratureRule) -> Result<f64> {
    match *rule {
        QuadratureRule::Continuous { a, b, nodes } => {
            let (xs, ws) = gauss_legendre(nodes);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            let mut acc = 0.0;
            for (x, w) in xs.iter().zip(&ws) {
                let node = mid + half * x;
                let fx = f(node);
                if !fx.is_finite() {
                    return Err(Error::BadIntegrand { node });
                }
                acc += w * fx;
            }
            Ok(acc * half)
        }
        QuadratureRule::Discrete { lo, hi } => {
            let mut acc = 0.0;
            let mut k = lo;
            loop {
                let fk = f(k as f64);
                if !fk.is_finite() {
                    return Err(Error::BadIntegrand { node: k as f64 });
                }
                acc += fk;
                match hi {
                    Some(h) => {
                        if k >= h {
                            break;
                        }
                    }
                    None => {
                        // truncate when the tail term is negligible
                        if k > lo + 4 && fk.abs() < 1e-14 * acc.abs().max(1e-300) {
                            break;
                        }
                        if k - lo > 10_000_000 {
                            return Err(Error::Domain(
                                "discrete expectation did not truncate".into(),
                            ));
                        }
                    }
                }
                k += 1;
            }
            Ok(acc)
        }
    }
}
