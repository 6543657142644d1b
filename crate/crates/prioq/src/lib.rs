//! Std companion to `prioq-core`: replicated simulation with confidence
//! intervals, the event-trace format and its audit, cross-engine validation
//! reports, output formats and the `prioq` command line.

pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod sim;
pub mod trace;
pub mod validate;

pub use error::CliError;
