//! Exact and oracle-backed performance analysis of a single-server queue
//! with two Poisson customer classes, a shared exponential server and
//! non-preemptive priority for class 1.
//!
//! Three independent engines live here:
//!
//! * [`analytic`] evaluates the generating-function solution in closed form
//!   (server occupancy, mean queue lengths, the boundary function and the
//!   joint PGF).
//! * [`ctmc`] builds a finite truncation of the underlying Markov chain from
//!   its balance equations and solves for the stationary vector.
//! * [`sim`] is the per-replication discrete-event engine.
//!
//! The crate is `no_std` and only needs `alloc`. IO, replication statistics
//! and the command line live in the `prioq` companion crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod ctmc;
mod error;
pub mod model;
pub mod sim;

pub use error::{Error, Result};
pub use model::{ModelParams, ServerPhase, SystemState, Traffic};
