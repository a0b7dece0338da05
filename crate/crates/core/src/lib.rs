//! Delivery-latency simulation for fog radio access networks whose edge
//! nodes share one multicast fronthaul link.
//!
//! The library covers randomized fractional edge caching, three fronthaul
//! delivery strategies (uncoded unicast, uncoded multicast and coded
//! multicast by conflict-graph coloring), max-min multi-connectivity
//! beamforming on the wireless edge, and seeded Monte Carlo evaluation of
//! the pipelined latency `max(T_F, T_E)`.
//!
//! Public indices of UEs, ENs, files and subfiles are 1-based.

pub mod cache;
pub mod edge;
pub mod error;
pub mod fronthaul;
pub mod model;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
pub use fronthaul::Strategy;
pub use model::SystemConfig;
