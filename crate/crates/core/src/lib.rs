//! Percolation laboratory.
//!
//! Bernoulli bond percolation on boxes of Z^d and the Poisson-Boolean
//! continuum model, with exact small-instance oracles and Monte Carlo
//! estimators for the quantities behind the sharpness of the phase
//! transition: FKG, Russo's formula, the OSSS inequality, Mecke's formula
//! and the differential inequality linking theta to its partial sums.

pub mod bernoulli;
pub mod boolean;
pub mod cli;
pub mod error;
pub mod exact;
pub mod lattice;
pub mod osss;
pub mod ppp;
pub mod rng;
pub mod sharpness;
pub mod stats;

pub use error::{Error, Result};
pub use stats::{Estimate, Verdict};
