//! Brute-force stationary oracle: a finite truncation of the
//! `(n1, n2, phase)` Markov chain, solved numerically.
//!
//! The truncation drops arrivals that would push a class count past its cap.
//! How much probability sits on the caps is always reported as the tail
//! mass, and [`auto_truncate`] grows the caps until that mass is negligible.

mod chain;
mod extract;
mod solve;
mod truncate;

pub use chain::{build_generator, Transition, TruncatedChain, TruncationSpec};
pub use extract::{
    marginal_distributions, metrics, pgf_partial_sums, CtmcMetrics, Marginals, PgfSums,
};
pub use solve::{
    solve_stationary, solve_stationary_with, SolveMethod, SolverOptions, StationarySolution,
};
pub use truncate::{auto_truncate, TruncationOutcome, DEFAULT_MAX_STATES};
