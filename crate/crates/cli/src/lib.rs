//! Batch experiment driver for the chemotaxis solver.

pub mod calibrate;
pub mod config;
pub mod datum;
pub mod error;
pub mod plots;
pub mod run;
pub mod verify;

pub use error::{CliError, Result};
