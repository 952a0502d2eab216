//! Divergences, contraction coefficients and partial orders for finite-dimensional
//! quantum channels.
//!
//! The dense linear-algebra layer in [`numerics`] is generic over [`Real`]; the
//! higher layers work in `f64` through the aliases below.

pub mod error;
pub mod numerics;
pub mod random;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Complex scalar used by the `f64` layers.
pub type C64 = num_complex::Complex<f64>;
/// Complex matrix used by the `f64` layers.
pub type CMat = numerics::ComplexMatrix<f64>;
/// Hermitian eigendecomposition in `f64`.
pub type Eig = numerics::HermitianEig<f64>;

/// Shorthand for a complex number from real and imaginary parts.
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub mod channels;
pub mod convex_opt;
pub mod divergences;
pub mod gaussian;
pub mod weyl;
pub mod capacities;
pub mod contraction;
pub mod functional;
pub mod optim;
pub mod orders;
