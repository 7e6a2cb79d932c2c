//! Numerical core for the massive fractional operator (−Δ + m²)^s: special
//! functions, periodic grids, three operator representations, kernels, the
//! degenerate extension and a Nehari-manifold ground-state solver.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod extension;
mod fft;
pub mod fit;
pub mod grid;
pub mod kernels;
pub mod operator;
pub mod quadrature;
pub mod specfun;
pub mod variational;
pub mod zeta;

pub use error::{Error, Result};
