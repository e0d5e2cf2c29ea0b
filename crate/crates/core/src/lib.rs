//! Open-loop input synthesis for parameter-dependent linear systems.
//!
//! A single parameter-independent input is constructed so that the whole
//! family `x' = A(θ)x + b(θ)u` (or its discrete-time counterpart) lands
//! uniformly close to a target family `f(θ)`. All sup-norms over the
//! parameter space are measured on a finite [`ParameterGrid`]; every error
//! this crate reports is therefore an on-grid statement.
//!
//! The crate is organised in three layers:
//!
//! * [`ensemble`]: domain types, simulation (discrete recursion and the
//!   closed-form piecewise-constant continuous response), sup-norm
//!   measurement and the reachability condition checkers.
//! * [`approx`]: constructive uniform approximation (Bernstein, Fejér,
//!   the four-step Runge construction) plus an adaptive least-squares path.
//! * [`synthesis`]: the input construction methods built on the two layers
//!   above and the Hermite multi-input decomposition.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod ensemble;
mod error;
pub mod synthesis;

pub use approx::polynomial::{ComplexPolynomial, LaurentPolynomial};
pub use ensemble::{
    ArcKind, EigenDecomposition, EnsembleSystem, InputSequence, ParameterGrid,
    PiecewiseConstantInput, StateFamily, TargetFamily,
};
pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

#[cfg(test)]
pub(crate) fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
