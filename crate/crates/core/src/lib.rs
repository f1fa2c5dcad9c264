//! Unitary-evolution simulators for the classical behaviour of large quantum
//! systems. [`ensemble`] shows the relative fluctuations of N independent
//! two-level systems shrinking as 1/√N, and [`spin_boson`] drives a boson
//! mode into a coherent state at leading order of a strong-coupling
//! expansion.
//!
//! [`zurek`] follows one spin flopping against a spin bath. Its coherences
//! vanish once the divergent N → ∞ limit is given a meaning by Abel
//! summation or time averaging ([`regularization`]).
//!
//! Every closed form has a dense state-vector counterpart in [`numerics`]
//! that it is validated against.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensemble;
pub mod error;
pub mod numerics;
pub mod regularization;
pub mod spin_boson;
pub mod zurek;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
