//! Stationary vector of a truncated chain.
//!
//! The direct path exploits that every transition changes the class count
//! along one axis (the "level") by at most one, so the generator is block
//! tridiagonal in that ordering. Linear level reduction eliminates levels
//! from the top down:
//!
//! ```text
//! S_L = A(L,L)
//! S_k = A(k,k) + R(k+1) A(k+1,k)
//! R_k = -A(k-1,k) S_k^-1
//! pi_0 S_0 = 0,   pi_k = pi_(k-1) R_k
//! ```
//!
//! All `R_k` are non-negative, which keeps the recursion free of
//! cancellation. Large chains fall back to power iteration on the uniformized
//! chain.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::chain::{index_of, TruncatedChain};
use crate::error::{Error, Result};
use crate::model::SystemState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Block-tridiagonal level reduction.
    Direct,
    /// Power iteration on the uniformized chain.
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Chains with more states than this use the iterative method.
    pub direct_threshold: usize,
    /// Admissible balance residual, relative to `max(1, lambda1 + lambda2 + mu)`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Force a method regardless of size.
    pub method: Option<SolveMethod>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            direct_threshold: 200_000,
            tolerance: 1e-10,
            max_iterations: 200_000,
            method: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StationarySolution {
    pub(crate) states: Vec<SystemState>,
    pub(crate) caps: (usize, usize),
    pub probs: Vec<f64>,
    /// `max_s |(pi Q)_s|`.
    pub residual: f64,
    /// Stationary mass on states with `n1 = n1_max` or `n2 = n2_max`.
    pub tail_mass: f64,
    pub method: SolveMethod,
    /// Power-iteration sweeps; zero for the direct method.
    pub iterations: usize,
}

impl StationarySolution {
    pub fn states(&self) -> &[SystemState] {
        &self.states
    }

    pub fn caps(&self) -> (usize, usize) {
        self.caps
    }

    pub fn prob(&self, state: &SystemState) -> f64 {
        index_of(self.caps.0, self.caps.1, state).map_or(0.0, |i| self.probs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SystemState, f64)> {
        self.states.iter().zip(self.probs.iter().copied())
    }
}

pub fn solve_stationary(chain: &TruncatedChain) -> Result<StationarySolution> {
    solve_stationary_with(chain, &SolverOptions::default())
}

pub fn solve_stationary_with(
    chain: &TruncatedChain,
    options: &SolverOptions,
) -> Result<StationarySolution> {
    chain.params().require_stable()?;
    let method = options
        .method
        .unwrap_or(if chain.len() <= options.direct_threshold {
            SolveMethod::Direct
        } else {
            SolveMethod::Iterative
        });
    let scale = chain.params().total_rate().max(1.0);
    let (probs, iterations) = match method {
        SolveMethod::Direct => (level_reduction(chain)?, 0),
        SolveMethod::Iterative => {
            power_iteration(chain, options.tolerance * scale, options.max_iterations)?
        }
    };
    let residual = balance_residual(chain, &probs);
    if residual.is_nan() || residual > options.tolerance * scale {
        return Err(Error::Solver(format!(
            "{method:?} solve of {} states left balance residual {residual:e} above {:e}",
            chain.len(),
            options.tolerance * scale
        )));
    }
    let tail_mass = chain
        .states()
        .iter()
        .zip(&probs)
        .filter(|(s, _)| chain.on_boundary(s))
        .map(|(_, p)| p)
        .sum();
    Ok(StationarySolution {
        states: chain.states().to_vec(),
        caps: chain.caps(),
        probs,
        residual,
        tail_mass,
        method,
        iterations,
    })
}

/// `max_s |(pi Q)_s|`.
pub(crate) fn balance_residual(chain: &TruncatedChain, probs: &[f64]) -> f64 {
    flow_balance(chain, probs)
        .into_iter()
        .fold(0.0, |acc, v| acc.max(libm::fabs(v)))
}

/// `pi Q` as a vector: inflow minus outflow per state.
fn flow_balance(chain: &TruncatedChain, probs: &[f64]) -> Vec<f64> {
    let mut net = vec![0.0; chain.len()];
    for (from, &p) in probs.iter().enumerate() {
        for t in chain.transitions(from) {
            let flow = p * t.rate;
            net[t.to] += flow;
            net[from] -= flow;
        }
    }
    net
}

fn normalize(probs: &mut [f64]) -> Result<()> {
    for p in probs.iter_mut() {
        // round-off can leave entries a few ulps below zero
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let total: f64 = probs.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Solver(format!(
            "stationary vector has total mass {total}"
        )));
    }
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(())
}

struct Levels {
    /// Global ids per level, ascending.
    members: Vec<Vec<usize>>,
    /// (level, position within level) per global id.
    slot: Vec<(usize, usize)>,
}

fn partition(chain: &TruncatedChain) -> Levels {
    let (n1_max, n2_max) = chain.caps();
    let by_n2 = n1_max <= n2_max;
    let count = if by_n2 { n2_max } else { n1_max } + 1;
    let mut members = vec![Vec::new(); count];
    let mut slot = Vec::with_capacity(chain.len());
    for (id, s) in chain.states().iter().enumerate() {
        let level = if by_n2 { s.n2 } else { s.n1 };
        slot.push((level, members[level].len()));
        members[level].push(id);
    }
    Levels { members, slot }
}

/// Generator entries of one level split by target level.
struct LevelBlocks {
    diag: DMatrix<f64>,
    /// (local row, local column in level + 1, rate)
    up: Vec<(usize, usize, f64)>,
    /// (local row, local column in level - 1, rate)
    down: Vec<(usize, usize, f64)>,
}

fn level_blocks(chain: &TruncatedChain, levels: &Levels, k: usize) -> Result<LevelBlocks> {
    let size = levels.members[k].len();
    let mut blocks = LevelBlocks {
        diag: DMatrix::zeros(size, size),
        up: Vec::new(),
        down: Vec::new(),
    };
    for (row, &id) in levels.members[k].iter().enumerate() {
        for t in chain.transitions(id) {
            let (level, col) = levels.slot[t.to];
            if level == k {
                blocks.diag[(row, col)] += t.rate;
            } else if level == k + 1 {
                blocks.up.push((row, col, t.rate));
            } else if level + 1 == k {
                blocks.down.push((row, col, t.rate));
            } else {
                return Err(Error::Solver(format!(
                    "transition from level {k} to level {level} is not skip-free"
                )));
            }
            blocks.diag[(row, row)] -= t.rate;
        }
    }
    Ok(blocks)
}

fn level_reduction(chain: &TruncatedChain) -> Result<Vec<f64>> {
    let levels = partition(chain);
    let top = levels.members.len() - 1;

    // rates[k] = R_k for k >= 1; rates[0] unused.
    let mut rates: Vec<DMatrix<f64>> = Vec::with_capacity(top + 1);
    rates.resize_with(top + 1, || DMatrix::zeros(0, 0));

    let mut blocks = level_blocks(chain, &levels, top)?;
    // Down-entries of level k + 1, pairing with rates[k + 1].
    let mut upper_down: Vec<(usize, usize, f64)> = Vec::new();
    let mut k = top;
    let s0 = loop {
        let mut s = core::mem::replace(&mut blocks.diag, DMatrix::zeros(0, 0));
        if k < top {
            // S_k += R_(k+1) A(k+1, k)
            let r_next = &rates[k + 1];
            for &(row, col, rate) in &upper_down {
                for i in 0..s.nrows() {
                    s[(i, col)] += r_next[(i, row)] * rate;
                }
            }
        }
        if k == 0 {
            break s;
        }
        let inverse = s
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::Solver(format!("reduced block at level {k} is singular")))?;
        // R_k = -A(k-1, k) S_k^-1, built from the up-entries of level k-1.
        let below = level_blocks(chain, &levels, k - 1)?;
        let mut r = DMatrix::zeros(levels.members[k - 1].len(), levels.members[k].len());
        for &(row, col, rate) in &below.up {
            for j in 0..r.ncols() {
                r[(row, j)] -= rate * inverse[(col, j)];
            }
        }
        rates[k] = r;
        upper_down = core::mem::take(&mut blocks.down);
        blocks = below;
        k -= 1;
    };

    let n0 = s0.nrows();
    let mut system = s0.transpose();
    for j in 0..n0 {
        system[(n0 - 1, j)] = 1.0;
    }
    let mut rhs = nalgebra::DVector::zeros(n0);
    rhs[n0 - 1] = 1.0;
    let pi0 = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Solver("censored generator at level 0 is singular".into()))?;

    let mut probs = vec![0.0; chain.len()];
    let mut current: Vec<f64> = pi0.iter().copied().collect();
    for (k, members) in levels.members.iter().enumerate() {
        if k > 0 {
            let r = &rates[k];
            let mut next = vec![0.0; r.ncols()];
            for (i, &p) in current.iter().enumerate() {
                if p != 0.0 {
                    for (j, v) in next.iter_mut().enumerate() {
                        *v += p * r[(i, j)];
                    }
                }
            }
            current = next;
        }
        for (pos, &id) in members.iter().enumerate() {
            probs[id] = current[pos];
        }
    }
    normalize(&mut probs)?;
    Ok(probs)
}

fn power_iteration(
    chain: &TruncatedChain,
    tolerance: f64,
    max_iterations: usize,
) -> Result<(Vec<f64>, usize)> {
    let params = chain.params();
    let uniform = params.total_rate();
    let rho = params.rho().clamp(0.0, 0.999_999);

    // Start from the geometric law of the total count.
    let mut probs: Vec<f64> = chain
        .states()
        .iter()
        .map(|s| libm::pow(rho, (s.n1 + s.n2) as f64))
        .collect();
    normalize(&mut probs)?;

    for iteration in 1..=max_iterations {
        let net = flow_balance(chain, &probs);
        let worst = net.iter().fold(0.0f64, |acc, v| acc.max(libm::fabs(*v)));
        if worst <= tolerance {
            return Ok((probs, iteration - 1));
        }
        for (p, v) in probs.iter_mut().zip(&net) {
            *p += v / uniform;
        }
        normalize(&mut probs)?;
    }
    Err(Error::Solver(format!(
        "power iteration on {} states did not reach residual {tolerance:e} within {max_iterations} sweeps",
        chain.len()
    )))
}
