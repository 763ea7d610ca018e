//! Overlaid primary and cognitive secondary ad-hoc networks: Poisson
//! fields, sensing-gated ALOHA, random half-disk routing, closed-form
//! throughput factors and the Monte Carlo machinery that checks them.

pub mod analytic;
pub mod config;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod grid;
pub mod montecarlo;
pub mod pointprocess;
pub mod protocol;
pub mod quadrature;
pub mod routing;
pub mod stats;
pub mod streams;
pub mod verify;

pub use config::{NetworkConfig, Regime, Schedule, Tier, TierParams};
pub use error::{Error, Result};
pub use geometry::{Disk, HalfDisk, Point};
pub use stats::EstimateWithCI;
