//! Cross-engine validation: closed forms against the truncated chain and the
//! simulator, plus a side-by-side check of the printed closed forms.

use std::fmt::Write as _;

use prioq_core::analytic::{
    boundary_values, f0_2_prime_at_1_printed, mean_length_class2, mean_length_class2_printed,
    mean_lengths, server_occupancy, L2Route,
};
use prioq_core::ctmc::{auto_truncate, metrics, CtmcMetrics, TruncationSpec};
use prioq_core::sim::SimConfig;
use prioq_core::{Error, ModelParams};
use serde_json::{json, Map, Value};

use crate::error::{CliError, EXIT_ENGINE};
use crate::output::{num, opt_num, params_json};
use crate::sim::{self, littles_law_check, LittleOutcome, SimEstimate};

/// Parameter points always included in the printed-form comparison.
pub const FIDELITY_POINTS: [(f64, f64, f64); 3] =
    [(1.0, 1.0, 4.0), (2.0, 1.0, 5.0), (0.5, 2.0, 4.0)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute, on server occupancy fractions.
    pub occupancy: f64,
    /// Relative, on mean lengths and sojourn times.
    pub length: f64,
    /// Relative, on `F0_2(1)`, `F0_2'(1)` and other numerically
    /// differentiated values.
    pub boundary: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            occupancy: 1e-8,
            length: 1e-6,
            boundary: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToleranceKind {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub metric: &'static str,
    pub analytic: f64,
    pub ctmc: f64,
    pub sim: Option<SimEstimate>,
    pub abs_dev: f64,
    pub rel_dev: f64,
    pub kind: ToleranceKind,
    pub tolerance: f64,
    pub ctmc_pass: bool,
    /// Whether the simulation interval covers the analytic value; `None`
    /// for metrics the simulator does not estimate.
    pub sim_covers: Option<bool>,
    pub pass: bool,
}

impl ValidationRow {
    fn new(
        metric: &'static str,
        analytic: f64,
        ctmc: f64,
        sim: Option<SimEstimate>,
        kind: ToleranceKind,
        tolerance: f64,
    ) -> Self {
        let abs_dev = (analytic - ctmc).abs();
        let rel_dev = if analytic == 0.0 {
            abs_dev
        } else {
            abs_dev / analytic.abs()
        };
        let ctmc_pass = match kind {
            ToleranceKind::Absolute => abs_dev <= tolerance,
            ToleranceKind::Relative => rel_dev <= tolerance,
        };
        let sim_covers = sim.map(|s| s.covers(analytic).unwrap_or(false));
        Self {
            metric,
            analytic,
            ctmc,
            sim,
            abs_dev,
            rel_dev,
            kind,
            tolerance,
            ctmc_pass,
            sim_covers,
            pass: ctmc_pass && sim_covers != Some(false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Matches,
    Differs,
    /// The printed form is not finite at this point.
    Undefined,
}

impl Verdict {
    fn judge(printed: f64, oracle: f64, tolerance: f64) -> Self {
        if !printed.is_finite() {
            Self::Undefined
        } else if (printed - oracle).abs() <= tolerance * oracle.abs().max(f64::MIN_POSITIVE) {
            Self::Matches
        } else {
            Self::Differs
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Matches => "MATCHES",
            Self::Differs => "DIFFERS",
            Self::Undefined => "UNDEFINED",
        }
    }
}

/// Printed closed forms next to chain values at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityRow {
    pub params: ModelParams,
    pub printed_f02_prime: f64,
    pub oracle_f02_prime: f64,
    pub f02_prime_verdict: Verdict,
    pub printed_l2: f64,
    pub oracle_l2: f64,
    pub l2_verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LittleRow {
    pub class: u8,
    pub outcome: LittleOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub params: ModelParams,
    pub tolerances: Tolerances,
    pub sim_config: SimConfig,
    pub truncation: TruncationSpec,
    pub ctmc_tail_mass: f64,
    pub ctmc_residual: f64,
    pub rows: Vec<ValidationRow>,
    pub little: Vec<LittleRow>,
    /// Informational; never part of [`Self::pass`].
    pub fidelity: Vec<FidelityRow>,
    pub pass: bool,
}

fn engine_error(err: Error) -> CliError {
    let mut mapped = CliError::from(err);
    if mapped.code != crate::error::EXIT_TRUNCATION {
        mapped.code = EXIT_ENGINE;
    }
    mapped
}

fn fidelity_row(params: ModelParams, oracle: &CtmcMetrics) -> FidelityRow {
    let printed_f02_prime = f0_2_prime_at_1_printed(&params).unwrap_or(f64::NAN);
    let printed_l2 = mean_length_class2_printed(&params).unwrap_or(f64::NAN);
    let tol = Tolerances::default();
    FidelityRow {
        params,
        printed_f02_prime,
        oracle_f02_prime: oracle.f02_prime_at_1,
        f02_prime_verdict: Verdict::judge(printed_f02_prime, oracle.f02_prime_at_1, tol.boundary),
        printed_l2,
        oracle_l2: oracle.l2,
        l2_verdict: Verdict::judge(printed_l2, oracle.l2, tol.length),
    }
}

/// Runs all three engines and compares them.
///
/// Input problems (instability, bad caps, fewer than two replications) are
/// reported before any engine runs.
pub fn run(
    params: &ModelParams,
    tolerances: Tolerances,
    sim_config: &SimConfig,
    truncation: &TruncationSpec,
) -> Result<ValidationReport, CliError> {
    params.require_stable()?;
    truncation.validate()?;
    sim_config.validate()?;
    if sim_config.replications < 2 {
        return Err(CliError::input(
            "validate needs at least 2 replications for interval estimates",
        ));
    }
    if params.total_rate() == 0.0 {
        return Err(CliError::input("validate needs a positive arrival rate"));
    }

    let occupancy = server_occupancy(params).map_err(engine_error)?;
    let lengths = mean_lengths(params).map_err(engine_error)?;
    let l2_derivative = mean_length_class2(params, L2Route::PgfDerivative).map_err(engine_error)?;
    let boundary = boundary_values(params).map_err(engine_error)?;

    let outcome = auto_truncate(params, truncation).map_err(engine_error)?;
    let chain = metrics(&outcome.solution);

    let sim = sim::run(params, sim_config).map_err(engine_error)?;

    use ToleranceKind::{Absolute, Relative};
    let mut rows = vec![
        ValidationRow::new(
            "p_free",
            occupancy.p_free,
            chain.occupancy.p_free,
            Some(sim.p_free),
            Absolute,
            tolerances.occupancy,
        ),
        ValidationRow::new(
            "p_class1",
            occupancy.p_class1,
            chain.occupancy.p_class1,
            Some(sim.p_class1),
            Absolute,
            tolerances.occupancy,
        ),
        ValidationRow::new(
            "p_class2",
            occupancy.p_class2,
            chain.occupancy.p_class2,
            Some(sim.p_class2),
            Absolute,
            tolerances.occupancy,
        ),
        ValidationRow::new(
            "L1",
            lengths.l1,
            chain.l1,
            Some(sim.l1),
            Relative,
            tolerances.length,
        ),
        ValidationRow::new(
            "L2_conservation",
            lengths.l2,
            chain.l2,
            Some(sim.l2),
            Relative,
            tolerances.length,
        ),
        ValidationRow::new(
            "L2_pgf_derivative",
            l2_derivative,
            chain.l2,
            None,
            Relative,
            tolerances.boundary,
        ),
        ValidationRow::new(
            "L_total",
            lengths.l_total,
            chain.l_total,
            None,
            Relative,
            tolerances.length,
        ),
        ValidationRow::new(
            "F02_at_1",
            boundary.f02_at_1,
            chain.f02_at_1,
            None,
            Relative,
            tolerances.boundary,
        ),
        ValidationRow::new(
            "F02_prime_at_1",
            boundary.f02_prime_at_1,
            chain.f02_prime_at_1,
            None,
            Relative,
            tolerances.boundary,
        ),
    ];
    for (metric, rate, l_analytic, l_chain, w_sim) in [
        ("W1", params.lambda1, lengths.l1, chain.l1, sim.w1),
        ("W2", params.lambda2, lengths.l2, chain.l2, sim.w2),
    ] {
        if rate > 0.0 {
            let w_sim = w_sim.or(Some(SimEstimate {
                mean: f64::NAN,
                half_width: None,
                replications: 0,
            }));
            rows.push(ValidationRow::new(
                metric,
                l_analytic / rate,
                l_chain / rate,
                w_sim,
                Relative,
                tolerances.length,
            ));
        }
    }

    let check = littles_law_check(&sim, params);
    let little = vec![
        LittleRow {
            class: 1,
            outcome: check.class1,
        },
        LittleRow {
            class: 2,
            outcome: check.class2,
        },
    ];
    let little_pass = little
        .iter()
        .all(|r| r.outcome.within_bounds() != Some(false));

    let mut fidelity = vec![fidelity_row(*params, &chain)];
    for (l1, l2, mu) in FIDELITY_POINTS {
        let point = ModelParams::new(l1, l2, mu).expect("fixed points are valid");
        if point == *params {
            continue;
        }
        let solved = auto_truncate(&point, &TruncationSpec::default()).map_err(engine_error)?;
        fidelity.push(fidelity_row(point, &metrics(&solved.solution)));
    }

    let pass = rows.iter().all(|r| r.pass) && little_pass;
    Ok(ValidationReport {
        params: *params,
        tolerances,
        sim_config: *sim_config,
        truncation: outcome.spec,
        ctmc_tail_mass: chain.tail_mass,
        ctmc_residual: chain.residual,
        rows,
        little,
        fidelity,
        pass,
    })
}

fn little_json(outcome: &LittleOutcome) -> Value {
    match outcome {
        LittleOutcome::NotApplicable => json!({"status": "not_applicable"}),
        LittleOutcome::Skipped => json!({"status": "skipped_unstable"}),
        LittleOutcome::Checked {
            discrepancy,
            normalized,
            bound,
        } => json!({
            "status": match outcome.within_bounds() {
                Some(true) => "within_bounds",
                Some(false) => "outside_bounds",
                None => "no_interval",
            },
            "discrepancy": num(*discrepancy),
            "normalized": num(*normalized),
            "bound": opt_num(*bound),
        }),
    }
}

impl ValidationReport {
    pub fn to_json(&self) -> Value {
        let mut metrics = Map::new();
        for r in &self.rows {
            metrics.insert(
                r.metric.to_string(),
                json!({
                    "analytic": num(r.analytic),
                    "ctmc": num(r.ctmc),
                    "sim_mean": opt_num(r.sim.map(|s| s.mean)),
                    "sim_half_width": opt_num(r.sim.and_then(|s| s.half_width)),
                    "abs_dev": num(r.abs_dev),
                    "rel_dev": num(r.rel_dev),
                    "tolerance": num(r.tolerance),
                    "tolerance_kind": match r.kind {
                        ToleranceKind::Absolute => "abs",
                        ToleranceKind::Relative => "rel",
                    },
                    "sim_covers": r.sim_covers,
                    "pass": r.pass,
                }),
            );
        }
        let fidelity: Vec<Value> = self
            .fidelity
            .iter()
            .map(|f| {
                json!({
                    "params": params_json(&f.params),
                    "F02_prime_at_1_printed": num(f.printed_f02_prime),
                    "F02_prime_at_1_oracle": num(f.oracle_f02_prime),
                    "F02_prime_at_1_verdict": f.f02_prime_verdict.label(),
                    "L2_printed": num(f.printed_l2),
                    "L2_oracle": num(f.oracle_l2),
                    "L2_verdict": f.l2_verdict.label(),
                })
            })
            .collect();
        let mut little = Map::new();
        for r in &self.little {
            little.insert(format!("class{}", r.class), little_json(&r.outcome));
        }
        json!({
            "params": params_json(&self.params),
            "engine": "validate",
            "metrics": metrics,
            "diagnostics": {
                "pass": self.pass,
                "littles_law": little,
                "printed_forms": fidelity,
                "ctmc": {
                    "n1_max": self.truncation.n1_max,
                    "n2_max": self.truncation.n2_max,
                    "tail_mass": num(self.ctmc_tail_mass),
                    "residual": num(self.ctmc_residual),
                },
                "sim": {
                    "seed": self.sim_config.seed,
                    "replications": self.sim_config.replications,
                    "horizon": self.sim_config.horizon_events,
                    "warmup": self.sim_config.warmup_events,
                    "confidence": num(self.sim_config.confidence),
                },
            },
        })
    }

    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "validation at lambda1 = {}, lambda2 = {}, mu = {} (rho = {})",
            p.lambda1,
            p.lambda2,
            p.mu,
            num(p.rho())
        );
        let _ = writeln!(
            s,
            "ctmc caps ({}, {}), tail mass {:.3e}, residual {:.3e}; sim seed {}, {} x {} departures",
            self.truncation.n1_max,
            self.truncation.n2_max,
            self.ctmc_tail_mass,
            self.ctmc_residual,
            self.sim_config.seed,
            self.sim_config.replications,
            self.sim_config.horizon_events
        );
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:<18} {:>14} {:>14} {:>12} {:>26} {:>8}  result",
            "metric", "analytic", "ctmc", "deviation", "sim (95% interval)", "tol"
        );
        for r in &self.rows {
            let dev = match r.kind {
                ToleranceKind::Absolute => format!("{:.2e} abs", r.abs_dev),
                ToleranceKind::Relative => format!("{:.2e} rel", r.rel_dev),
            };
            let sim = match r.sim {
                Some(e) => match e.half_width {
                    Some(hw) => format!("{:.6} +/- {:.6}", e.mean, hw),
                    None => format!("{:.6} +/- n/a", e.mean),
                },
                None => "-".to_string(),
            };
            let _ = writeln!(
                s,
                "{:<18} {:>14.9} {:>14.9} {:>12} {:>26} {:>8.0e}  {}",
                r.metric,
                r.analytic,
                r.ctmc,
                dev,
                sim,
                r.tolerance,
                if r.pass { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(s);
        for r in &self.little {
            let line = match r.outcome {
                LittleOutcome::NotApplicable => "not applicable (no arrivals)".to_string(),
                LittleOutcome::Skipped => "skipped (unstable)".to_string(),
                LittleOutcome::Checked {
                    discrepancy, bound, ..
                } => match bound {
                    Some(b) => format!(
                        "|L - lambda W| = {discrepancy:.3e}, bound {b:.3e}: {}",
                        if discrepancy <= b { "pass" } else { "FAIL" }
                    ),
                    None => format!("|L - lambda W| = {discrepancy:.3e}, no interval"),
                },
            };
            let _ = writeln!(s, "little's law, class {}: {line}", r.class);
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "printed closed forms against the chain (informational):");
        for f in &self.fidelity {
            let q = &f.params;
            let _ = writeln!(s, "  ({}, {}, {})", q.lambda1, q.lambda2, q.mu);
            let _ = writeln!(
                s,
                "    F02'(1): printed {:.9}  oracle {:.9}  {}",
                f.printed_f02_prime,
                f.oracle_f02_prime,
                f.f02_prime_verdict.label()
            );
            let _ = writeln!(
                s,
                "    L2:      printed {:.9}  oracle {:.9}  {}",
                f.printed_l2,
                f.oracle_l2,
                f.l2_verdict.label()
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "overall: {}", if self.pass { "PASS" } else { "FAIL" });
        s
    }
}
