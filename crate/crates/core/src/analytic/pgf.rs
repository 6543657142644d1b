//! Generating functions of the joint class-1/class-2 count distribution,
//! split by server phase: `F1` (serving class 1), `F2` (serving class 2) and
//! the joint `F = F1 + F2 + p000`.

use super::boundary::{f0_2_parts, idle_probability};
use super::root::{linear_coefficient, smaller_root};
use super::{check_unit, GUARD_BAND};
use crate::error::{Error, Result};
use crate::model::ModelParams;

fn second_denominator(params: &ModelParams, z1: f64, z2: f64) -> f64 {
    params.lambda1 * (1.0 - z1) + params.lambda2 * (1.0 - z2) + params.mu
}

/// `F2(z1, z2) = B(z2) F0_2(z2) / (lambda1 (1 - z1) + lambda2 (1 - z2) + mu)`.
pub fn pgf_f2(params: &ModelParams, z1: f64, z2: f64) -> Result<f64> {
    let p000 = idle_probability(params)?;
    check_unit("z1", z1)?;
    check_unit("z2", z2)?;
    let (boundary, _) = f0_2_parts(params, z2, p000)?;
    Ok(linear_coefficient(params, z2) * boundary / second_denominator(params, z1, z2))
}

/// `F1(z1, z2)`.
///
/// The denominator `lambda1 (1 - z1) + lambda2 (1 - z2) + mu (1 - 1/z1)`
/// vanishes at `z1 = f(z2)`, where the numerator vanishes too. Inside the
/// guard band around that point the quotient of the `z1`-derivatives is used,
/// taken at the midpoint between `z1` and `f(z2)` so that the error is
/// quadratic in the distance to the singularity.
pub fn pgf_f1(params: &ModelParams, z1: f64, z2: f64) -> Result<f64> {
    let p000 = idle_probability(params)?;
    if !(z1 > 0.0 && z1 <= 1.0) {
        return Err(Error::Domain {
            name: "z1",
            value: z1,
            domain: "(0, 1]",
        });
    }
    check_unit("z2", z2)?;
    if params.lambda1 == 0.0 {
        // Numerator is identically zero: no class-1 customer is ever served.
        return Ok(0.0);
    }
    let ModelParams {
        lambda1: l1,
        lambda2: l2,
        mu,
    } = *params;
    let (boundary, boundary_over_z2) = f0_2_parts(params, z2, p000)?;
    let b = linear_coefficient(params, z2);
    let root = smaller_root(params, z2);

    if libm::fabs(z1 - root) < GUARD_BAND {
        let mid = 0.5 * (z1 + root);
        let d2 = second_denominator(params, mid, z2);
        let numerator_slope = l1 * (b * mu * boundary_over_z2 / (d2 * d2) + p000);
        let denominator_slope = mu / (mid * mid) - l1;
        return Ok(numerator_slope / denominator_slope);
    }

    let d2 = second_denominator(params, z1, z2);
    let numerator =
        b * (mu * boundary_over_z2 / d2 - boundary) - (l1 * (1.0 - z1) + l2 * (1.0 - z2)) * p000;
    let denominator = l1 * (1.0 - z1) + l2 * (1.0 - z2) + mu * (1.0 - 1.0 / z1);
    Ok(numerator / denominator)
}

/// `F(z1, z2) = F1 + F2 + p000`. At `z1 = 0` only the `i = 0` terms survive,
/// and `F1(0, z2) = 0`.
pub fn pgf_joint(params: &ModelParams, z1: f64, z2: f64) -> Result<f64> {
    let p000 = idle_probability(params)?;
    check_unit("z1", z1)?;
    let f1 = if z1 == 0.0 {
        0.0
    } else {
        pgf_f1(params, z1, z2)?
    };
    Ok(f1 + pgf_f2(params, z1, z2)? + p000)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::root_f;

    fn p(l1: f64, l2: f64, mu: f64) -> ModelParams {
        ModelParams::new(l1, l2, mu).unwrap()
    }

    /// Removable singularity cancelled by hand: with `f` and `g = mu /
    /// (lambda1 f)` the two roots,
    /// `F1 = z1 (B mu G / (D2(z1) D2(f)) + p000) / (g - z1)`
    /// where `G = F0_2 / z2`. Agrees with the raw quotient everywhere the
    /// latter is defined.
    fn factored_f1(params: &ModelParams, z1: f64, z2: f64) -> f64 {
        let ModelParams {
            lambda1: l1,
            lambda2: l2,
            mu,
        } = *params;
        let p000 = 1.0 - params.rho();
        let f = root_f(params, z2).unwrap().f;
        let other = mu / (l1 * f);
        let b = l1 + l2 * (1.0 - z2) + mu;
        let over_z2 = crate::analytic::f0_2(params, z2).unwrap() / z2;
        let d2 = |x: f64| l1 * (1.0 - x) + l2 * (1.0 - z2) + mu;
        z1 * (b * mu * over_z2 / (d2(z1) * d2(f)) + p000) / (other - z1)
    }

    #[test]
    fn occupancy_at_one() {
        let params = p(1.0, 1.0, 4.0);
        assert!((pgf_f1(&params, 1.0, 1.0).unwrap() - 0.25).abs() < 1e-12);
        assert!((pgf_f2(&params, 1.0, 1.0).unwrap() - 0.25).abs() < 1e-12);
        assert!((pgf_joint(&params, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn guard_band_agrees_with_factored_form() {
        let params = p(1.0, 1.0, 4.0);
        for z2 in [0.2, 0.6, 0.95] {
            let f = root_f(&params, z2).unwrap().f;
            for offset in [0.0, 3e-7, -3e-7, 1e-4, -1e-3] {
                let z1 = f + offset;
                let got = pgf_f1(&params, z1, z2).unwrap();
                let want = factored_f1(&params, z1, z2);
                assert!(
                    (got - want).abs() < 1e-9,
                    "z1={z1} z2={z2}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn raw_quotient_agrees_with_factored_form_off_singularity() {
        let params = p(2.0, 1.0, 5.0);
        for z1 in [0.1, 0.5, 0.8, 1.0] {
            for z2 in [0.1, 0.25, 0.75] {
                let got = pgf_f1(&params, z1, z2).unwrap();
                let want = factored_f1(&params, z1, z2);
                assert!((got - want).abs() < 1e-12, "({z1}, {z2}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn single_class_reductions() {
        let only2 = p(0.0, 1.0, 2.0);
        for z2 in [0.0, 0.5, 0.9] {
            assert_eq!(pgf_f1(&only2, 0.7, z2).unwrap(), 0.0);
            let mm1 = 0.5 / (1.0 - 0.5 * z2);
            assert!((pgf_joint(&only2, 0.4, z2).unwrap() - mm1).abs() < 1e-12);
        }

        let only1 = p(1.0, 0.0, 2.0);
        for z1 in [0.0, 0.5, 0.9, 1.0] {
            assert_eq!(pgf_f2(&only1, z1, 0.3).unwrap(), 0.0);
            let mm1 = 0.5 / (1.0 - 0.5 * z1);
            assert!((pgf_joint(&only1, z1, 0.3).unwrap() - mm1).abs() < 1e-12);
        }
    }

    #[test]
    fn domain_checks() {
        let params = p(1.0, 1.0, 4.0);
        assert!(matches!(
            pgf_f1(&params, 0.0, 0.5),
            Err(Error::Domain { name: "z1", .. })
        ));
        assert!(pgf_f2(&params, 1.1, 0.5).is_err());
        assert!(pgf_joint(&params, 0.5, -0.5).is_err());
        assert!(pgf_joint(&p(2.0, 2.0, 4.0), 0.5, 0.5).is_err());
    }
}
