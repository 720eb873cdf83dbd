//! Numerics for the Bogoliubov variational free energy of the dilute Bose gas.

// NaN inputs must fail the `!(x > 0.0)` style guards
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// quadrature nodes and reference constants are quoted at full published precision
#![allow(clippy::excessive_precision)]

pub mod critical;
pub mod error;
pub mod freegas;
pub mod functional;
pub mod integrals;
pub mod optimize;
pub mod quadrature;
pub mod scattering;
pub mod sweep;
pub mod thermo;

pub use error::{Error, Result};
