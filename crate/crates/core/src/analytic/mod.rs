//! Closed-form engine built on the generating-function solution.
//!
//! Everything here is evaluated on the real square `[0, 1]^2`. On that domain
//! the characteristic quadratic
//!
//! ```text
//! lambda1 * z1^2 - (lambda1 + lambda2 (1 - z2) + mu) * z1 + mu = 0
//! ```
//!
//! has a positive discriminant and exactly one root in the closed unit disk,
//! so no complex arithmetic is needed.

mod boundary;
mod lengths;
mod pgf;
mod root;

pub use boundary::{
    boundary_values, f0_2, f0_2_prime_at_1, f0_2_prime_at_1_printed, idle_probability,
    BoundaryFunctionValues, DerivativeVariant,
};
pub use lengths::{
    mean_length_class1, mean_length_class2, mean_length_class2_printed, mean_lengths,
    mean_total_length, server_occupancy, L2Route, MeanLengths, ServerOccupancy,
};
pub use pgf::{pgf_f1, pgf_f2, pgf_joint};
pub use root::{root_f, RootInfo};

use crate::error::{Error, Result};

/// Relative tolerance on the root residual, scaled by `mu^2`.
pub const ROOT_TOLERANCE: f64 = 1e-12;

/// Half-width of the band around a removable singularity inside which the
/// limit form is used instead of the raw quotient.
pub const GUARD_BAND: f64 = 1e-6;

/// Base step for the Richardson-extrapolated derivatives at `z2 = 1`.
pub const DERIVATIVE_STEP: f64 = 1e-3;

/// One-sided (left) derivative at `x` with one level of Richardson
/// extrapolation on steps `h` and `h / 2`.
///
/// `g_at_x` is passed separately so callers can supply a limit value when the
/// function itself is singular at `x`.
pub(crate) fn left_derivative<G>(g: G, x: f64, g_at_x: f64, h: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let coarse = (g_at_x - g(x - h)?) / h;
    let fine = (g_at_x - g(x - 0.5 * h)?) / (0.5 * h);
    Ok(2.0 * fine - coarse)
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain: "[0, 1]",
        })
    }
}
