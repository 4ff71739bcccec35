//! Simulation and numerical analysis of multitype PCR branching processes.
//!
//! * [`model`] holds validated parameters and population states.
//! * [`maps`] evaluates the deterministic density maps and the limit
//!   functions `H` and `G_i` with certified error bounds.
//! * [`sim`] simulates the density-dependent chain, its coupled
//!   Galton–Watson majorant and the martingale limits.
//! * [`harness`] runs paired Monte Carlo experiments against the limits.
//! * [`table`] and [`cli`] serialize results and drive the `mpcr` binary.

pub mod cli;
pub mod error;
pub mod harness;
pub mod maps;
pub mod model;
pub mod presets;
pub mod sim;
pub mod table;

pub use error::{Error, Result};
pub use maps::{LimitEval, PsiRoot, TheoremLimits};
pub use model::{validate, ModelParams, PopulationState, Rates, RawParams};
pub use sim::{RngStream, SimMode, Trajectory};
