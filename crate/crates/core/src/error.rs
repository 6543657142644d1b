use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A rate is negative, non-finite, or a zero service rate.
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    /// Stationary quantities requested for a system with rho >= 1.
    #[error("system is unstable: rho = {rho} (stationary analysis needs rho < 1)")]
    Unstable { rho: f64 },

    /// A PGF or root argument outside its admissible interval.
    #[error("{name} = {value} is outside the admissible domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("configuration error: {0}")]
    Config(String),

    /// The automatic truncation hit its state budget before the tail
    /// probability dropped below the requested threshold.
    #[error(
        "truncation budget exhausted at caps ({n1_max}, {n2_max}): tail mass {tail_mass:e} \
         still above {tail_eps:e}; raise the state budget or loosen tail_eps"
    )]
    TruncationBudget {
        n1_max: usize,
        n2_max: usize,
        tail_mass: f64,
        tail_eps: f64,
    },

    #[error("stationary solver failed: {0}")]
    Solver(String),
}
