//! Simulation and analysis of GHZ-state distribution over a symmetric star
//! network, where N end nodes connect to one central node.
//!
//! Two central-node designs are modelled:
//!
//! * a factory node, which prepares the GHZ state locally and teleports one
//!   qubit to each end node ([`factory`]);
//! * a 2-switch, which can only perform Bell-state measurements and lets the
//!   end nodes build the GHZ state by fusing Bell pairs ([`switch`]).
//!
//! [`analytics`] holds closed-form rates and fidelities for the factory node,
//! and [`oracles`] holds brute-force references used to check them. Both
//! engines run on the density-matrix engine in [`dm`].

pub mod analytics;
pub mod cli;
pub mod config;
pub mod dm;
pub mod error;
pub mod factory;
pub mod model;
pub mod oracles;
pub mod stats;
pub mod switch;
pub mod verify;

pub use error::{Error, Result};
pub use model::SimParams;
pub use stats::Estimates;
