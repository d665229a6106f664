//! Monte Carlo harness for the `qbc-core` bit-commitment simulator: JSON
//! configuration, seeded batch execution, interval estimates, the hiding
//! test, parameter sweeps and transcript files.

pub mod config;
pub mod error;
pub mod fig2;
pub mod hiding;
pub mod runner;
pub mod stats;
pub mod sweep;
pub mod transcript_io;

pub use config::SimConfig;
pub use error::{Result, SimError};
pub use runner::{run_monte_carlo, run_session, AggregateStats, PooledCounts, SessionOutput};
