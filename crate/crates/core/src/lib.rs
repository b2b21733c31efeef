//! Runge-Kutta convolution quadrature based on Gauss and Radau IIA methods.
//!
//! The crate builds the tableaux from their order conditions, analyses the
//! Padé stability functions, and evaluates discrete convolutions `K(d_t^h) g`
//! for scalar or operator-valued Laplace-domain symbols `K(s)`.
//!
//! ```
//! use gausscq_core::{cq, kernels::ScalarKernel, tableau::gauss_tableau};
//!
//! let t = gauss_tableau(3).unwrap();
//! let k = ScalarKernel::Power { mu: -1.0 };
//! let u = cq::solve_scalar(&k, &t, |x| x * x, 1.0, 32, &Default::default()).unwrap();
//! // K = 1/s integrates: u(1) = 1/3.
//! assert!((u.scalar()[32] - 1.0 / 3.0).abs() < 1e-9);
//! ```

pub mod artifact;
pub mod cq;
pub mod error;
pub mod kernels;
pub mod legendre;
pub mod linalg;
pub mod poly;
pub mod stability;
pub mod tableau;
pub mod transfer;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
