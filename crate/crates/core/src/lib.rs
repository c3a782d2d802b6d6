//! Digital-analog simulation on cross-resonance hardware.
pub mod analysis;
pub mod cli;
pub mod compiler;
pub mod device;
pub mod error;
pub mod frames;
pub mod hamiltonian;
pub mod pauli;
pub use error::{Error, Result};
