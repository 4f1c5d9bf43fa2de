//! Experiment harness for the `rrccm-core` beamformers: scenario files,
//! parallel Monte Carlo runs, CSV and state-dump formats, and the `rrccm`
//! command line.

pub mod cli;
pub mod dump;
mod error;
pub mod plot;
pub mod runner;
pub mod setup;
pub mod table;

pub use error::{Error, Result};
