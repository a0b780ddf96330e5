//! Special functions, quadrature, adaptive ODE integration and numerical
//! differentiation shared by every geometry module.

pub mod fd;
pub mod ode;
pub mod quadrature;
pub mod special;

pub use fd::{fd_gradient, fd_hessian, fd_jacobian, fd_matrix_partials};
pub use ode::{integrate_ode, OdeProblem, Trajectory};
pub use quadrature::{gauss_legendre, quadrature_expectation, QuadratureRule};
pub use special::{digamma, ln_gamma, polygamma, tetragamma, trigamma};
