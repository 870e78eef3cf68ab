//! Special functions and quadrature shared by the evaluators.

mod quadrature;
mod special;

pub use quadrature::{
    gauss_legendre, integrate_1d, integrate_smooth, try_integrate_1d, try_integrate_smooth,
    GaussLegendre, QuadratureSpec,
};
pub use special::{binomial, factorial, gamma_int, kummer_1f1, pochhammer};
