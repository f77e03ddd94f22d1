//! Special functions and quadrature primitives.

mod adaptive;
mod gauss_hermite;
mod hermite;
mod special;
mod tensor;

pub use adaptive::{
    adaptive_integral_1d, integrate_adaptive, integrate_with_breakpoints, AdaptiveOptions, Quad, QuadValue, MAX_INTERVALS,
};
pub use gauss_hermite::{gauss_hermite_rule, QuadratureRule, DEFAULT_ORDER, MAX_ORDER};
pub use hermite::{
    hermite_functions, hermite_poly, hg_mode_eval, log_mode_normalization, HermiteGaussianMode,
};
pub use special::{bessel_i0_scaled, gaussian_cdf};
pub(crate) use special::gaussian_interval_mass;
pub use tensor::{tensor_gaussian_integral, MAX_TENSOR_DIM};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MathError {
    #[error("H_{n}({x}) overflows f64")]
    Overflow { n: usize, x: f64 },
    #[error("non-finite input {0}")]
    NonFinite(f64),
    #[error("mode width must be positive, got {0}")]
    InvalidWidth(f64),
    #[error("Gauss-Hermite order {0} outside 1..={max}", max = MAX_ORDER)]
    OrderOutOfRange(usize),
    #[error("Newton iteration for Gauss-Hermite node {index} of order {order} did not converge")]
    NodeNotConverged { order: usize, index: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
    #[error(
        "adaptive quadrature hit the {intervals}-interval cap; best estimate {best} \u{00b1} {err:.3e}"
    )]
    NonConvergence {
        best: Complex64,
        err: f64,
        intervals: usize,
    },
}

impl MathError {
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            MathError::Overflow { .. }
                | MathError::NodeNotConverged { .. }
                | MathError::NonConvergence { .. }
        )
    }
}
