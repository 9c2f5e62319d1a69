//! Pseudo-spectral Keller–Segel solver on the channel `[-pi, pi) x [0, pi]`
//! with optional buoyancy-driven flow.

pub mod checkpoint;
pub mod diagnostics;
pub mod error;
pub mod integrate;
pub mod rhs;
pub mod spectral;
pub mod state;
pub mod velocity;

pub use error::{Error, Result};
pub use spectral::{BasisTag, Grid, SpectralField};
pub use state::{Density, FlowState, ModelParams, SimState, VelocityLaw};
pub use velocity::Velocity;
