//! Numerical toolkit for the Riemann auxiliary function
//!
//! ```text
//! R(s) = ∫_{0↙1} x^{-s} e^{πix²} / (e^{πix} - e^{-πix}) dx
//! ```
//!
//! Every integral representation of `R` is available as an independent
//! evaluator in [`repr`], all built on the adaptive complex-path quadrature
//! in [`quad`] and the kernels in [`integrand`]. The identity
//! `ζ(s) = R(s) + χ(s)·conj(R(1 - conj s))` ties the representations to an
//! independent Euler–Maclaurin zeta ([`zeta_ref`]). [`verify`] scans the
//! bound lemmas on the entire kernel
//!
//! ```text
//! F(z) = (1 - e^{-πz² + πωz}) / (1 - e^{2πωz}),   ω = e^{iπ/4}
//! ```
//!
//! and [`xray`] extracts the curves `Re f = 0`, `Im f = 0` of `F` (or of `R`).
//!
//! ```
//! use num_complex::Complex64;
//! use riemann_aux::repr;
//!
//! let s = Complex64::new(2.0, 0.0);
//! let zeta = repr::zeta_from_r(s, 1e-10).unwrap();
//! assert!((zeta.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-9);
//! ```

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Test oracles keep every digit mpmath printed.
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod cli;
pub mod error;
pub mod integrand;
pub mod quad;
pub mod repr;
pub mod special;
pub mod verify;
pub mod xray;
pub mod zeta_ref;

pub use error::{Error, Result};
pub use quad::{ContourPath, EvalResult, TailEnvelope};

/// Complex value type used for `s`, `z` and every integral.
pub type ComplexScalar = num_complex::Complex64;
/// Real value type.
pub type RealScalar = f64;
