//! Grids, trigonometric bases and spectral operators on the channel
//! `[-pi, pi) x [0, pi]`.

mod field;
mod grid;
mod ops;

pub use field::{BasisTag, SpectralField};
pub use grid::Grid;
