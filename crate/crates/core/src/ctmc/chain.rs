use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{ModelParams, ServerPhase, SystemState};

/// Caps and tail-mass target for a truncated chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    pub n1_max: usize,
    pub n2_max: usize,
    /// Largest acceptable stationary mass on the cap boundary.
    pub tail_eps: f64,
    /// Let [`auto_truncate`](super::auto_truncate) grow the caps.
    pub auto_grow: bool,
    /// Hard budget on the number of states when growing.
    pub max_states: usize,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self {
            n1_max: 16,
            n2_max: 16,
            tail_eps: 1e-12,
            auto_grow: true,
            max_states: super::DEFAULT_MAX_STATES,
        }
    }
}

impl TruncationSpec {
    pub fn with_caps(n1_max: usize, n2_max: usize) -> Self {
        Self {
            n1_max,
            n2_max,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1_max < 2 || self.n2_max < 2 {
            return Err(Error::Config(format!(
                "truncation caps ({}, {}) must both be at least 2",
                self.n1_max, self.n2_max
            )));
        }
        if self.tail_eps.is_nan() || self.tail_eps <= 0.0 {
            return Err(Error::Config(format!(
                "tail_eps must be positive, got {}",
                self.tail_eps
            )));
        }
        Ok(())
    }

    /// Number of valid states with `n1 <= n1_max` and `n2 <= n2_max`.
    pub fn state_count(&self) -> usize {
        state_count(self.n1_max, self.n2_max)
    }
}

fn state_count(n1_max: usize, n2_max: usize) -> usize {
    1 + n1_max * (n2_max + 1) + (n1_max + 1) * n2_max
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub to: usize,
    pub rate: f64,
}

/// Enumerated state space and sparse transition rates of the truncation.
///
/// States are numbered lexicographically by `(phase, n1, n2)`. Rates are kept
/// in compressed rows; every stored rate is strictly positive and there are
/// no self-loops.
#[derive(Debug, Clone)]
pub struct TruncatedChain {
    params: ModelParams,
    n1_max: usize,
    n2_max: usize,
    states: Vec<SystemState>,
    row_start: Vec<usize>,
    transitions: Vec<Transition>,
}

impl TruncatedChain {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn caps(&self) -> (usize, usize) {
        (self.n1_max, self.n2_max)
    }

    pub fn states(&self) -> &[SystemState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: &SystemState) -> Option<usize> {
        index_of(self.n1_max, self.n2_max, state)
    }

    pub fn transitions(&self, from: usize) -> &[Transition] {
        &self.transitions[self.row_start[from]..self.row_start[from + 1]]
    }

    /// Total outgoing rate of a state.
    pub fn outflow(&self, from: usize) -> f64 {
        self.transitions(from).iter().map(|t| t.rate).sum()
    }

    pub fn rate(&self, from: &SystemState, to: &SystemState) -> f64 {
        match (self.index_of(from), self.index_of(to)) {
            (Some(i), Some(j)) => self
                .transitions(i)
                .iter()
                .find(|t| t.to == j)
                .map_or(0.0, |t| t.rate),
            _ => 0.0,
        }
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    /// True for states on the cap boundary (`n1 = n1_max` or `n2 = n2_max`).
    pub fn on_boundary(&self, state: &SystemState) -> bool {
        state.n1 == self.n1_max || state.n2 == self.n2_max
    }
}

pub(crate) fn index_of(n1_max: usize, n2_max: usize, s: &SystemState) -> Option<usize> {
    if !s.is_valid() || s.n1 > n1_max || s.n2 > n2_max {
        return None;
    }
    Some(match s.phase {
        ServerPhase::Free => 0,
        ServerPhase::ServingClass1 => 1 + (s.n1 - 1) * (n2_max + 1) + s.n2,
        ServerPhase::ServingClass2 => 1 + n1_max * (n2_max + 1) + s.n1 * n2_max + (s.n2 - 1),
    })
}

fn enumerate(n1_max: usize, n2_max: usize) -> Vec<SystemState> {
    let mut states = Vec::with_capacity(state_count(n1_max, n2_max));
    states.push(SystemState::EMPTY);
    for n1 in 1..=n1_max {
        for n2 in 0..=n2_max {
            states.push(SystemState::new(n1, n2, ServerPhase::ServingClass1));
        }
    }
    for n1 in 0..=n1_max {
        for n2 in 1..=n2_max {
            states.push(SystemState::new(n1, n2, ServerPhase::ServingClass2));
        }
    }
    states
}

/// State reached when the customer in service completes.
fn after_service(s: &SystemState) -> SystemState {
    use ServerPhase::*;
    match (s.phase, s.n1, s.n2) {
        (Free, _, _) => unreachable!("idle server has no service completion"),
        (ServingClass1, 1, 0) | (ServingClass2, 0, 1) => SystemState::EMPTY,
        // Last class-1 customer leaves; the head of the class-2 line starts.
        (ServingClass1, 1, n2) => SystemState::new(0, n2, ServingClass2),
        (ServingClass1, n1, n2) => SystemState::new(n1 - 1, n2, ServingClass1),
        // A class-2 service ends with class-1 customers waiting: the
        // head-of-line class-1 customer is next.
        (ServingClass2, 0, n2) => SystemState::new(0, n2 - 1, ServingClass2),
        (ServingClass2, n1, n2) => SystemState::new(n1, n2 - 1, ServingClass1),
    }
}

/// Builds the truncated generator for `params`.
///
/// Stability is not required to build, only to solve.
pub fn build_generator(params: &ModelParams, spec: &TruncationSpec) -> Result<TruncatedChain> {
    params.validate()?;
    spec.validate()?;
    let (n1_max, n2_max) = (spec.n1_max, spec.n2_max);
    let states = enumerate(n1_max, n2_max);

    let mut row_start = Vec::with_capacity(states.len() + 1);
    let mut transitions = Vec::with_capacity(3 * states.len());
    row_start.push(0);
    for s in &states {
        let mut push = |target: SystemState, rate: f64| {
            if rate > 0.0 {
                if let Some(to) = index_of(n1_max, n2_max, &target) {
                    transitions.push(Transition { to, rate });
                }
            }
        };
        match s.phase {
            ServerPhase::Free => {
                push(
                    SystemState::new(1, 0, ServerPhase::ServingClass1),
                    params.lambda1,
                );
                push(
                    SystemState::new(0, 1, ServerPhase::ServingClass2),
                    params.lambda2,
                );
            }
            phase => {
                // index_of rejects targets past the caps, which drops the arrival.
                push(SystemState::new(s.n1 + 1, s.n2, phase), params.lambda1);
                push(SystemState::new(s.n1, s.n2 + 1, phase), params.lambda2);
                push(after_service(s), params.mu);
            }
        }
        row_start.push(transitions.len());
    }

    Ok(TruncatedChain {
        params: *params,
        n1_max,
        n2_max,
        states,
        row_start,
        transitions,
    })
}
