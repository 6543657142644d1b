//! The boundary function `F0_2(z2) = sum_j p(0, j, 2) z2^j` and its values at
//! `z2 = 1`.

use super::root::{linear_coefficient, smaller_root};
use super::{check_unit, left_derivative, DERIVATIVE_STEP, GUARD_BAND};
use crate::error::Result;
use crate::model::ModelParams;

/// How `F0_2'(1)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeVariant {
    /// The printed closed form, evaluated verbatim.
    Printed,
    /// Richardson-extrapolated left difference of [`f0_2`].
    Numeric,
}

/// Root and boundary-function values at `z2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFunctionValues {
    pub f1: f64,
    pub fp1: f64,
    pub fpp1: f64,
    pub f02_at_1: f64,
    pub f02_prime_at_1: f64,
}

/// Stationary probability of the empty system, `(mu - lambda1 - lambda2) / mu`.
pub fn idle_probability(params: &ModelParams) -> Result<f64> {
    params.require_stable()?;
    Ok((params.mu - params.lambda1 - params.lambda2) / params.mu)
}

/// `F0_2(z2) / z2` straight from the root-elimination identity, with
/// numerator and denominator multiplied through by `z2` so that `z2 = 0` is
/// regular. Singular (0/0) at `z2 = 1`.
fn boundary_over_z2_raw(params: &ModelParams, z2: f64, p000: f64) -> f64 {
    let ModelParams {
        lambda1: l1,
        lambda2: l2,
        mu,
    } = *params;
    let f = smaller_root(params, z2);
    let b = linear_coefficient(params, z2);
    let a = l1 * (1.0 - f) + l2 * (1.0 - z2);
    a * (a + mu) * p000 / (b * (mu - z2 * (a + mu)))
}

/// Limit of `F0_2` at `z2 = 1`, resolved by L'Hospital's rule.
fn f0_2_at_one(params: &ModelParams, p000: f64) -> f64 {
    let ModelParams {
        lambda1: l1,
        lambda2: l2,
        mu,
    } = *params;
    mu * l2 / ((l1 + mu) * (mu - l1 - l2)) * p000
}

fn f0_2_numeric_derivative(params: &ModelParams, p000: f64) -> Result<f64> {
    if params.lambda2 == 0.0 {
        return Ok(0.0);
    }
    let at_one = f0_2_at_one(params, p000);
    left_derivative(
        |z2| Ok(z2 * boundary_over_z2_raw(params, z2, p000)),
        1.0,
        at_one,
        DERIVATIVE_STEP,
    )
}

/// `F0_2(z2)` and `F0_2(z2) / z2` together; the quotient form is what the
/// class-1 generating function needs, and it stays finite at `z2 = 0`.
pub(crate) fn f0_2_parts(params: &ModelParams, z2: f64, p000: f64) -> Result<(f64, f64)> {
    if params.lambda2 == 0.0 {
        return Ok((0.0, 0.0));
    }
    if 1.0 - z2 < GUARD_BAND {
        // First-order expansion around the L'Hospital limit.
        let value = f0_2_at_one(params, p000) + f0_2_numeric_derivative(params, p000)? * (z2 - 1.0);
        return Ok((value, value / z2));
    }
    let over_z2 = boundary_over_z2_raw(params, z2, p000);
    Ok((z2 * over_z2, over_z2))
}

pub fn f0_2(params: &ModelParams, z2: f64) -> Result<f64> {
    let p000 = idle_probability(params)?;
    check_unit("z2", z2)?;
    Ok(f0_2_parts(params, z2, p000)?.0)
}

/// The printed closed form for `F0_2'(1)`, reproduced term for term
/// (including the `2 lambda2^2 mu` term inside the bracket).
pub fn f0_2_prime_at_1_printed(params: &ModelParams) -> Result<f64> {
    params.require_stable()?;
    let ModelParams {
        lambda1: l1,
        lambda2: l2,
        mu,
    } = *params;
    let bracket = l1 * l1 * l1
        + l1 * l1 * (3.0 * l2 - mu)
        + mu * mu * mu
        + l1 * (2.0 * l2 * l2 * mu - l2 * mu - mu * mu);
    Ok(mu * l2 * bracket / ((mu + l1) * (mu + l1) * (mu - l1) * (mu - l1 - l2)))
}

pub fn f0_2_prime_at_1(params: &ModelParams, variant: DerivativeVariant) -> Result<f64> {
    match variant {
        DerivativeVariant::Printed => f0_2_prime_at_1_printed(params),
        DerivativeVariant::Numeric => {
            let p000 = idle_probability(params)?;
            f0_2_numeric_derivative(params, p000)
        }
    }
}

/// `f(1)`, `f'(1)`, `f''(1)`, `F0_2(1)` and the numeric `F0_2'(1)`.
pub fn boundary_values(params: &ModelParams) -> Result<BoundaryFunctionValues> {
    let p000 = idle_probability(params)?;
    let ModelParams {
        lambda1: l1,
        lambda2: l2,
        mu,
    } = *params;
    let gap = mu - l1;
    Ok(BoundaryFunctionValues {
        f1: 1.0,
        fp1: l2 / gap,
        fpp1: 2.0 * mu * l2 * l2 / (gap * gap * gap),
        f02_at_1: f0_2_at_one(params, p000),
        f02_prime_at_1: f0_2_numeric_derivative(params, p000)?,
    })
}
