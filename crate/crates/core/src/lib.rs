//! Analytical models and a bit-exact simulator for inter-temperature
//! communication in cryogenic QAOA machines.
//!
//! The crate is split along the data path of one QAOA run:
//!
//! - [`ising`]: the classical problem, its cost function and instance files.
//! - [`qaoa`]: exact statevector simulation and synthetic bitstring sources.
//! - [`timing`]: per-layer and per-circuit execution time.
//! - [`bandwidth`]: baseline and counter-based link bandwidth, counter sizing.
//! - [`counter`]: the 4-K counter bank with MSB streaming and readout.
//! - [`power`]: cable and ERSFQ counter dissipation, crossover search.

pub mod bandwidth;
pub mod counter;
mod error;
pub mod ising;
pub mod kv;
pub mod power;
pub mod qaoa;
pub mod timing;

pub use error::{Error, Result};

/// Exact rational used for cost estimates over integer coefficients.
pub type Exact = num_rational::Ratio<i128>;
