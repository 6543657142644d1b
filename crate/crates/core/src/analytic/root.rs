use super::check_unit;
use crate::error::Result;
use crate::model::ModelParams;

/// The in-disk root `f(z2)` of the characteristic quadratic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootInfo {
    pub z2: f64,
    pub f: f64,
    /// `|lambda1 f^2 - B f + mu|` at the returned root.
    pub residual: f64,
}

/// Linear coefficient `B(z2) = lambda1 + lambda2 (1 - z2) + mu`.
pub(crate) fn linear_coefficient(params: &ModelParams, z2: f64) -> f64 {
    params.lambda1 + params.lambda2 * (1.0 - z2) + params.mu
}

/// Smaller root of `lambda1 z^2 - B z + mu`, unchecked.
///
/// Written as `2 mu / (B + sqrt(B^2 - 4 lambda1 mu))`, which never subtracts
/// nearly equal quantities and reduces to the linear root `mu / B` when
/// `lambda1 = 0`.
pub(crate) fn smaller_root(params: &ModelParams, z2: f64) -> f64 {
    let b = linear_coefficient(params, z2);
    let disc = b * b - 4.0 * params.lambda1 * params.mu;
    2.0 * params.mu / (b + libm::sqrt(disc.max(0.0)))
}

pub fn root_f(params: &ModelParams, z2: f64) -> Result<RootInfo> {
    params.require_stable()?;
    check_unit("z2", z2)?;
    let f = smaller_root(params, z2);
    let b = linear_coefficient(params, z2);
    let residual = libm::fabs((params.lambda1 * f - b) * f + params.mu);
    Ok(RootInfo { z2, f, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::ROOT_TOLERANCE;
    use crate::Error;

    fn p(l1: f64, l2: f64, mu: f64) -> ModelParams {
        ModelParams::new(l1, l2, mu).unwrap()
    }

    #[test]
    fn root_at_one_is_one() {
        let r = root_f(&p(1.0, 1.0, 4.0), 1.0).unwrap();
        assert!((r.f - 1.0).abs() < 1e-15);
    }

    #[test]
    fn root_at_zero_matches_quadratic_formula() {
        // z^2 - 6z + 4 = 0
        let r = root_f(&p(1.0, 1.0, 4.0), 0.0).unwrap();
        let expected = 3.0 - 5.0f64.sqrt();
        assert!((r.f - expected).abs() < 1e-15);
        assert!(r.residual < ROOT_TOLERANCE * 16.0);
    }

    #[test]
    fn no_class2_traffic_pins_root_to_one() {
        let params = p(1.0, 0.0, 4.0);
        for z2 in [0.0, 0.3, 0.9, 1.0] {
            assert!((root_f(&params, z2).unwrap().f - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_branch_without_class1() {
        let params = p(0.0, 1.0, 2.0);
        let r = root_f(&params, 0.5).unwrap();
        assert!((r.f - 2.0 / 2.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_domain_and_unstable() {
        assert!(matches!(
            root_f(&p(1.0, 1.0, 4.0), 1.5),
            Err(Error::Domain { name: "z2", .. })
        ));
        assert!(matches!(
            root_f(&p(3.0, 2.0, 4.0), 0.5),
            Err(Error::Unstable { .. })
        ));
    }
}
