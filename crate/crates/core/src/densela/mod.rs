//! Dense complex linear algebra sized for matrices up to a few thousand rows.

mod general;
mod hermitian;
mod householder;
mod lu;
mod matrix;
mod svd;

pub use general::{gen_eigvals, QR_SWEEPS_PER_DIM};
pub use hermitian::{herm_eigvals, HERMITIAN_TOL};
pub use lu::{lu_logdet, wrap_phase, Lu, PIVOT_FLOOR};
pub use matrix::ComplexMatrix;
pub use svd::singular_values;
