//! Simulation core for a practical quantum bit-commitment protocol.
//!
//! Bob sends faint time-bin pulses at random times, Alice commits to a bit by
//! picking the basis she measures every photon in, and at opening Bob checks
//! her outcomes against the states he prepared. The crate models:
//!
//! - [`qstate`]: exact two-level state arithmetic (BB84 and Breidbart states)
//! - [`photonics`]: Poisson sources, lossy noisy channels, detectors and the
//!   two-interferometer time-bin measurement
//! - [`protocol`]: Alice and Bob's commit/announce/open/verify steps
//! - [`adversary`]: cheating strategies that try to postpone the commitment
//! - [`session`]: end-to-end drivers for the protocol and the role-swapped
//!   legacy variant
//! - [`transcript`]: the public message log of one session
//!
//! Everything is `no_std` + `alloc` and takes an explicit random stream, see
//! [`stream::session_stream`] for the reproducible stream-splitting rule.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adversary;
pub mod error;
pub mod photonics;
pub mod protocol;
pub mod qstate;
pub mod session;
pub mod stream;
pub mod transcript;

pub use error::{ConfigError, ProtocolError, StateError};
