//! Round-based simulator for energy-aware routing in wireless sensor networks.
//!
//! Three routing strategies are available: every node talking straight to the
//! base station ([`Strategy::Direct`]), minimum-transmission-energy forwarding
//! to the nearest node closer to the base ([`Strategy::Mte`]), and diffusion
//! routing ([`Strategy::Diffusion`]), where relays refuse traffic from richer
//! senders or when drained or overloaded so that the whole network runs down
//! its batteries at roughly the same rate.

pub mod config;
pub mod engine;
pub mod error;
pub mod output;
pub mod radio;
pub mod rng;
pub mod routing;
pub mod runner;
pub mod topology;

pub use config::{load_config, QueueCapacity, SimConfig};
pub use engine::{run_simulation, utility_pct, SimResult, Simulation};
pub use error::{Error, Result};
pub use radio::RadioParams;
pub use routing::{HopTarget, Strategy};
pub use topology::{Position, Topology};
