//! Fredholm theory for singular integral operators with piecewise continuous
//! matrix coefficients on weighted variable-exponent Lebesgue spaces over
//! curves with logarithmic whirl points.
//!
//! * [`geometry`]: double logarithmic spiral sets.
//! * [`spaces`]: curves, exponents, power weights, norms and checkers.
//! * [`symbols`]: piecewise continuous symbols and operator expressions.
//! * [`calculus`]: the `2n x 2n` symbol map, Fredholm tests, essential
//!   spectrum, and the index of `aP + Q`.
//! * [`oracles`]: independent brute-force validators.

pub mod calculus;
pub mod error;
pub mod geometry;
pub mod oracles;
pub mod spaces;
pub mod symbols;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense complex matrix used for symbol values.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
