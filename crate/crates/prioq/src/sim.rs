//! Replicated simulation runs and their interval estimates.

use prioq_core::sim::{simulate_replication, ReplicationResult, SimConfig};
use prioq_core::{ModelParams, Result};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Mean over replications with a Student-t half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean: f64,
    /// `None` with fewer than two replications.
    pub half_width: Option<f64>,
    pub replications: usize,
}

impl SimEstimate {
    pub fn from_samples(samples: &[f64], confidence: f64) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let half_width = (n >= 2).then(|| {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
                .expect("positive degrees of freedom")
                .inverse_cdf(0.5 + 0.5 * confidence);
            t * (var / n as f64).sqrt()
        });
        Self {
            mean,
            half_width,
            replications: n,
        }
    }

    pub fn covers(&self, value: f64) -> Option<bool> {
        self.half_width.map(|hw| (self.mean - value).abs() <= hw)
    }

    pub fn relative_half_width(&self) -> Option<f64> {
        self.half_width.map(|hw| hw / self.mean.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub params: ModelParams,
    pub config: SimConfig,
    /// False when `rho >= 1`; stationary comparisons are meaningless then.
    pub stable: bool,
    pub p_free: SimEstimate,
    pub p_class1: SimEstimate,
    pub p_class2: SimEstimate,
    pub l1: SimEstimate,
    pub l2: SimEstimate,
    /// `None` if no class-1 customer departed in any measurement window.
    pub w1: Option<SimEstimate>,
    pub w2: Option<SimEstimate>,
    pub replications: Vec<ReplicationResult>,
}

/// Runs `config.replications` independent replications.
///
/// Replications execute on the rayon pool but are merged in index order, so
/// the report does not depend on scheduling.
pub fn run(params: &ModelParams, config: &SimConfig) -> Result<SimReport> {
    let traffic = params.validate()?;
    config.validate()?;
    let replications = (0..config.replications)
        .into_par_iter()
        .map(|r| simulate_replication(params, config, r, None))
        .collect::<Result<Vec<_>>>()?;

    let level = config.confidence;
    let estimate = |pick: fn(&ReplicationResult) -> f64| {
        let samples: Vec<f64> = replications.iter().map(pick).collect();
        SimEstimate::from_samples(&samples, level)
    };
    let sojourn = |pick: fn(&ReplicationResult) -> Option<f64>| {
        let samples: Vec<f64> = replications.iter().filter_map(pick).collect();
        (!samples.is_empty()).then(|| SimEstimate::from_samples(&samples, level))
    };
    Ok(SimReport {
        params: *params,
        config: *config,
        stable: traffic.stable,
        p_free: estimate(|r| r.p_free),
        p_class1: estimate(|r| r.p_class1),
        p_class2: estimate(|r| r.p_class2),
        l1: estimate(|r| r.l1),
        l2: estimate(|r| r.l2),
        w1: sojourn(|r| r.w1),
        w2: sojourn(|r| r.w2),
        replications,
    })
}

/// Outcome of comparing `L` with `lambda W` for one class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LittleOutcome {
    /// The class has no arrivals.
    NotApplicable,
    /// The run was unstable; there is no stationary law to check.
    Skipped,
    Checked {
        /// `|L - lambda W|`
        discrepancy: f64,
        /// `discrepancy / L`
        normalized: f64,
        /// `hw(L) + lambda hw(W)`; `None` without interval estimates.
        bound: Option<f64>,
    },
}

impl LittleOutcome {
    /// `Some(true)` when the discrepancy is inside the combined bound.
    pub fn within_bounds(&self) -> Option<bool> {
        match self {
            Self::Checked {
                discrepancy,
                bound: Some(bound),
                ..
            } => Some(discrepancy <= bound),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LittleCheck {
    pub class1: LittleOutcome,
    pub class2: LittleOutcome,
}

pub fn littles_law_check(report: &SimReport, params: &ModelParams) -> LittleCheck {
    let check = |rate: f64, length: &SimEstimate, sojourn: Option<&SimEstimate>| {
        if !report.stable {
            return LittleOutcome::Skipped;
        }
        let Some(sojourn) = sojourn.filter(|_| rate > 0.0) else {
            return LittleOutcome::NotApplicable;
        };
        let discrepancy = (length.mean - rate * sojourn.mean).abs();
        let bound = length
            .half_width
            .zip(sojourn.half_width)
            .map(|(hl, hw)| hl + rate * hw);
        LittleOutcome::Checked {
            discrepancy,
            normalized: discrepancy / length.mean,
            bound,
        }
    };
    LittleCheck {
        class1: check(params.lambda1, &report.l1, report.w1.as_ref()),
        class2: check(params.lambda2, &report.l2, report.w2.as_ref()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_interval_matches_table_value() {
        // t_{0.975, 4} = 2.776445
        let e = SimEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.95);
        assert_eq!(e.mean, 3.0);
        let expected = 2.776_445 * (2.5f64 / 5.0).sqrt();
        assert!((e.half_width.unwrap() - expected).abs() < 1e-5);
        assert_eq!(e.covers(4.9), Some(true));
        assert_eq!(e.covers(5.0), Some(false));
    }

    #[test]
    fn single_replication_has_no_interval() {
        let e = SimEstimate::from_samples(&[0.3], 0.95);
        assert_eq!(e.half_width, None);
        assert_eq!(e.covers(0.3), None);
    }

    #[test]
    fn report_is_reproducible() {
        let params = ModelParams::new(1.0, 1.0, 4.0).unwrap();
        let config = SimConfig::new(7, 4, 20_000);
        assert_eq!(
            run(&params, &config).unwrap(),
            run(&params, &config).unwrap()
        );
    }

    #[test]
    fn little_not_applicable_without_class2() {
        let params = ModelParams::new(1.0, 0.0, 2.0).unwrap();
        let report = run(&params, &SimConfig::new(1, 3, 20_000)).unwrap();
        let check = littles_law_check(&report, &params);
        assert_eq!(check.class2, LittleOutcome::NotApplicable);
        assert!(matches!(check.class1, LittleOutcome::Checked { .. }));
    }

    #[test]
    fn little_skipped_when_unstable() {
        let params = ModelParams::new(3.0, 2.0, 4.0).unwrap();
        let report = run(&params, &SimConfig::new(1, 2, 5_000)).unwrap();
        assert!(!report.stable);
        let check = littles_law_check(&report, &params);
        assert_eq!(check.class1, LittleOutcome::Skipped);
        assert_eq!(check.class2, LittleOutcome::Skipped);
    }
}
