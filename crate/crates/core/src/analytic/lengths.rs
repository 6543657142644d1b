use super::boundary::idle_probability;
use super::{left_derivative, pgf_joint, DERIVATIVE_STEP};
use crate::error::Result;
use crate::model::ModelParams;

/// Long-run fraction of time the server spends in each phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServerOccupancy {
    pub p_class1: f64,
    pub p_class2: f64,
    pub p_free: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanLengths {
    pub l1: f64,
    pub l2: f64,
    pub l_total: f64,
}

/// Ways of obtaining the class-2 mean length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum L2Route {
    /// `rho / (1 - rho) - L1`: the total count is an ordinary M/M/1 queue.
    #[default]
    Conservation,
    /// Numerical derivative of `F(1, z2)` at `z2 = 1`.
    PgfDerivative,
    /// The printed closed form, evaluated verbatim.
    Printed,
}

pub fn server_occupancy(params: &ModelParams) -> Result<ServerOccupancy> {
    let p_free = idle_probability(params)?;
    Ok(ServerOccupancy {
        p_class1: params.lambda1 / params.mu,
        p_class2: params.lambda2 / params.mu,
        p_free,
    })
}

/// `L1 = lambda1 (mu + lambda2) / (mu (mu - lambda1))`.
pub fn mean_length_class1(params: &ModelParams) -> Result<f64> {
    params.require_stable()?;
    let ModelParams {
        lambda1: l1,
        lambda2: l2,
        mu,
    } = *params;
    Ok(l1 * (mu + l2) / (mu * (mu - l1)))
}

/// Mean total number in system, `rho / (1 - rho)`.
pub fn mean_total_length(params: &ModelParams) -> Result<f64> {
    let rho = params.require_stable()?.rho;
    Ok(rho / (1.0 - rho))
}

/// The printed class-2 mean length, term for term.
pub fn mean_length_class2_printed(params: &ModelParams) -> Result<f64> {
    params.require_stable()?;
    let ModelParams {
        lambda1: l1,
        lambda2: l2,
        mu,
    } = *params;
    let first =
        (l1 * l1 * l2 + mu * mu * mu + l1 * (2.0 * l2 * l2 + mu * mu)) / (mu * mu * (l1 + mu));
    let bracket = mu * mu * mu
        + l1 * l1 * l1
        + l1 * l1 * (3.0 * l2 - mu)
        + l1 * (2.0 * l2 * l2 - mu * l2 - mu * mu);
    let gap = mu - l1 - l2;
    let second = mu * bracket / ((mu * mu - l1 * l1) * gap * gap);
    Ok(first + second)
}

pub fn mean_length_class2(params: &ModelParams, route: L2Route) -> Result<f64> {
    match route {
        L2Route::Conservation => Ok(mean_total_length(params)? - mean_length_class1(params)?),
        L2Route::PgfDerivative => {
            if params.lambda2 == 0.0 {
                params.require_stable()?;
                return Ok(0.0);
            }
            let at_one = pgf_joint(params, 1.0, 1.0)?;
            left_derivative(
                |z2| pgf_joint(params, 1.0, z2),
                1.0,
                at_one,
                DERIVATIVE_STEP,
            )
        }
        L2Route::Printed => mean_length_class2_printed(params),
    }
}

/// `L1`, `L2` (conservation route) and their sum.
pub fn mean_lengths(params: &ModelParams) -> Result<MeanLengths> {
    let l1 = mean_length_class1(params)?;
    let l2 = mean_length_class2(params, L2Route::Conservation)?;
    Ok(MeanLengths {
        l1,
        l2,
        l_total: l1 + l2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(l1: f64, l2: f64, mu: f64) -> ModelParams {
        ModelParams::new(l1, l2, mu).unwrap()
    }

    #[test]
    fn occupancy_values() {
        let o = server_occupancy(&p(1.0, 1.0, 4.0)).unwrap();
        assert_eq!((o.p_class1, o.p_class2, o.p_free), (0.25, 0.25, 0.5));
        let o = server_occupancy(&p(0.0, 0.0, 1.0)).unwrap();
        assert_eq!((o.p_class1, o.p_class2, o.p_free), (0.0, 0.0, 1.0));
        let o = server_occupancy(&p(2.0, 1.0, 5.0)).unwrap();
        assert!((o.p_class1 - 0.4).abs() < 1e-15);
        assert!((o.p_class2 - 0.2).abs() < 1e-15);
        assert!((o.p_free - 0.4).abs() < 1e-15);
    }

    #[test]
    fn class1_length_values() {
        assert!((mean_length_class1(&p(1.0, 1.0, 4.0)).unwrap() - 5.0 / 12.0).abs() < 1e-15);
        assert!((mean_length_class1(&p(1.0, 0.0, 2.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!((mean_length_class1(&p(0.5, 2.0, 4.0)).unwrap() - 3.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn class2_routes() {
        let params = p(1.0, 1.0, 4.0);
        let cons = mean_length_class2(&params, L2Route::Conservation).unwrap();
        assert!((cons - 7.0 / 12.0).abs() < 1e-15);
        let pgf = mean_length_class2(&params, L2Route::PgfDerivative).unwrap();
        assert!(((pgf - cons) / cons).abs() < 1e-5, "{pgf} vs {cons}");
        let printed = mean_length_class2(&params, L2Route::Printed).unwrap();
        assert!((printed - (83.0 / 80.0 + 184.0 / 60.0)).abs() < 1e-13);

        let only2 = p(0.0, 1.0, 2.0);
        assert!((mean_length_class2(&only2, L2Route::Conservation).unwrap() - 1.0).abs() < 1e-15);
        assert!((mean_length_class2(&only2, L2Route::PgfDerivative).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn bundle_is_consistent() {
        let m = mean_lengths(&p(0.5, 2.0, 4.0)).unwrap();
        assert_eq!(m.l_total, m.l1 + m.l2);
        assert!((m.l_total - 0.625 / 0.375).abs() < 1e-14);
    }

    #[test]
    fn refuse_unstable() {
        let params = p(3.0, 2.0, 4.0);
        assert!(server_occupancy(&params).is_err());
        assert!(mean_length_class1(&params).is_err());
        for route in [
            L2Route::Conservation,
            L2Route::PgfDerivative,
            L2Route::Printed,
        ] {
            assert!(mean_length_class2(&params, route).is_err());
        }
    }
}
