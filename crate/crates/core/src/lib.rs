//! Finite-time quantum Stirling engine with a driven two-level working
//! substance coupled to non-Markovian resonator baths.

pub mod bath;
pub mod cli;
pub mod config;
pub mod cycle;
pub mod drive;
pub mod error;
pub mod generator;
pub mod propagator;
pub mod qops;
pub mod thermo;

pub use error::{Error, Result};
