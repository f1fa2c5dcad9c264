//! Dense complex linear algebra and state utilities.
//!
//! Everything here is exact up to floating point and serves as the oracle
//! the model-specific closed forms are checked against.

mod eigen;
mod matrix;
pub mod ops;
pub mod quad;
mod state;
mod trace;

pub use eigen::{matexp_hermitian_prop, HermitianEigen, Propagator};
pub use matrix::{
    expectation, frobenius_distance, kron, kron_capped, trace_distance, ComplexMatrix,
};
pub use state::StateVector;
pub use trace::{partial_trace, partial_trace_outer};

/// Largest total Hilbert-space dimension any builder will produce.
pub const MAX_DIM: usize = 1 << 22;

/// Absolute tolerance on max |H_ij − conj(H_ji)|.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Tolerance on ‖ψ‖ for states flagged normalized.
pub const NORM_TOL: f64 = 1e-10;
