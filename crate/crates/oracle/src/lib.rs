//! Dense, slow, independent reference computations for the channel
//! `[-pi, pi) x [0, pi]`.
//!
//! Nothing in this crate uses fast transforms or the analytic diagonal
//! structure of the spectral operators. Every operator is assembled from
//! point evaluations of the basis functions, quadrature, and dense LU
//! solves, so it can serve as a second route for checking the solver.
//!
//! Coefficient vectors use the *real form* of a real-valued field: for each
//! `k1` in `0..=n1/2` and each `x2` mode index in `0..n2`, the real part is
//! stored, followed by the imaginary part when `0 < k1 < n1/2`. The length is
//! always `n1 * n2`.

pub mod basis;
pub mod fd;
pub mod galerkin;
pub mod quad;
pub mod systems;

pub use basis::{BasisFn, Deriv, Parity, RealBasis};
pub use galerkin::QuadGrid;

/// Maximum absolute entry of a matrix or vector.
pub fn max_abs<'a>(values: impl IntoIterator<Item = &'a f64>) -> f64 {
    values.into_iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
