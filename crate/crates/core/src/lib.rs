//! Best constants of the Markov inequality `‖p′‖ ≤ c_n(α)‖p‖` in the
//! L2 norm with Laguerre weight `t^α e^{−t}` on `(0, ∞)`.
//!
//! The squared constant `c_n(α)²` is the largest eigenvalue of an explicit
//! `n × n` positive matrix built from Laguerre normalisation constants
//! ([`matrix`]). The crate computes it ([`spectral`]), evaluates the known
//! closed-form bounds around it ([`bounds`]), realises the asymptotic
//! constant through the first zero of a Bessel function ([`bessel`]), and
//! checks everything against a quadrature path that never touches the
//! matrix ([`quadrature`]). [`verify`] sweeps all of it over parameter
//! grids and [`report`] serialises the results.

// `!(x > y)` guards reject NaN together with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod bounds;
mod dd;
pub mod error;
pub mod gamma;
pub mod matrix;
pub mod quadrature;
pub mod report;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use gamma::Alpha;
