use super::chain::{build_generator, TruncatedChain, TruncationSpec};
use super::solve::{solve_stationary, StationarySolution};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Default hard budget on the number of states while growing caps.
pub const DEFAULT_MAX_STATES: usize = 10_000_000;

#[derive(Debug, Clone)]
pub struct TruncationOutcome {
    /// The caps that were finally used.
    pub spec: TruncationSpec,
    pub chain: TruncatedChain,
    pub solution: StationarySolution,
}

impl TruncationOutcome {
    pub fn tail_mass(&self) -> f64 {
        self.solution.tail_mass
    }
}

/// Builds and solves, doubling caps until the boundary mass drops below
/// `spec.tail_eps`.
///
/// Only caps whose boundary carries at least half the target are grown, so
/// the fast-decaying class-1 axis does not inflate the state space. With
/// `auto_grow` off this is a single build and solve.
pub fn auto_truncate(params: &ModelParams, spec: &TruncationSpec) -> Result<TruncationOutcome> {
    params.require_stable()?;
    spec.validate()?;
    let mut current = *spec;
    loop {
        let chain = build_generator(params, &current)?;
        let solution = solve_stationary(&chain)?;
        if !current.auto_grow || solution.tail_mass < current.tail_eps {
            return Ok(TruncationOutcome {
                spec: current,
                chain,
                solution,
            });
        }

        let (mut edge1, mut edge2) = (0.0, 0.0);
        for (s, p) in solution.iter() {
            if s.n1 == current.n1_max {
                edge1 += p;
            }
            if s.n2 == current.n2_max {
                edge2 += p;
            }
        }
        let mut next = current;
        if edge1 >= 0.5 * current.tail_eps {
            next.n1_max *= 2;
        }
        if edge2 >= 0.5 * current.tail_eps {
            next.n2_max *= 2;
        }
        if next.state_count() > current.max_states {
            return Err(Error::TruncationBudget {
                n1_max: current.n1_max,
                n2_max: current.n2_max,
                tail_mass: solution.tail_mass,
                tail_eps: current.tail_eps,
            });
        }
        current = next;
    }
}
