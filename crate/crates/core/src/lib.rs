//! Generic chaining machinery and Monte Carlo checks for non-asymptotic
//! random matrix bounds: extreme singular values of matrices with
//! independent rows, covariance estimation, and quadratic empirical
//! processes indexed by sets of linear functionals.

pub mod chaining;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod norms;
pub(crate) mod par;
pub mod samplers;
pub mod seed;

pub use error::{Error, Result};
