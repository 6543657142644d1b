//! Discrete-event simulation of the physical queue, one replication at a
//! time. Replication statistics and confidence intervals are assembled by the
//! caller.

mod engine;
mod rng;

pub use engine::{simulate_replication, EventKind, ReplicationResult, TraceEvent};
pub use rng::{replication_rng, replication_seed, ExpSampler, SimRng};

use alloc::format;

use crate::error::{Error, Result};

/// Run-length and replication settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub replications: usize,
    /// Departures per replication, warm-up included.
    pub horizon_events: u64,
    /// Departures discarded before measurement starts.
    pub warmup_events: u64,
    /// Two-sided confidence level for interval estimates.
    pub confidence: f64,
}

impl SimConfig {
    /// `horizon` departures per replication with the default 10% warm-up.
    pub fn new(seed: u64, replications: usize, horizon_events: u64) -> Self {
        Self {
            seed,
            replications,
            horizon_events,
            warmup_events: horizon_events / 10,
            confidence: 0.95,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("at least one replication is required".into()));
        }
        if self.horizon_events == 0 {
            return Err(Error::Config(
                "horizon must be at least one departure".into(),
            ));
        }
        if self.warmup_events >= self.horizon_events {
            return Err(Error::Config(format!(
                "warm-up ({}) must be shorter than the horizon ({})",
                self.warmup_events, self.horizon_events
            )));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::Config(format!(
                "confidence level {} is outside (0, 1)",
                self.confidence
            )));
        }
        Ok(())
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::new(0x5EED, 10, 500_000)
    }
}
