//! Argument definitions and the command implementations behind `prioq`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use prioq_core::analytic::{
    boundary_values, f0_2_prime_at_1_printed, idle_probability, mean_length_class2, mean_lengths,
    server_occupancy, L2Route, DERIVATIVE_STEP, GUARD_BAND,
};
use prioq_core::ctmc::{
    auto_truncate, marginal_distributions, metrics, SolveMethod, TruncationSpec, DEFAULT_MAX_STATES,
};
use prioq_core::sim::SimConfig;
use prioq_core::ModelParams;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::error::{CliError, EXIT_OK, EXIT_TOLERANCE};
use crate::output::{csv_line, num, opt_num, scalar, Document, Format};
use crate::sim::{self, littles_law_check, LittleOutcome, SimEstimate};
use crate::trace::write_trace;
use crate::validate::{self, Tolerances};

/// Rows of `dist` stop at the first count where every column is below this.
pub const DIST_CUTOFF: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "prioq",
    version,
    about = "Two-class non-preemptive priority M/M/1 queue toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form metrics at one parameter point.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Analyze(AnalyzeArgs),
    /// Metrics from the truncated Markov chain.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Ctmc(CtmcArgs),
    /// Replicated discrete-event simulation.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Compare all three engines; exit 1 if any tolerance is missed.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Validate(ValidateArgs),
    /// Metrics over a grid of parameter lists.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Marginal queue-length distributions from the chain.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Dist(DistArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub lambda1: f64,
    #[arg(long)]
    pub lambda2: f64,
    #[arg(long)]
    pub mu: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(self.lambda1, self.lambda2, self.mu)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct TruncationArgs {
    /// Initial class-1 cap.
    #[arg(long, default_value_t = 16)]
    pub n1_max: usize,
    /// Initial class-2 cap.
    #[arg(long, default_value_t = 16)]
    pub n2_max: usize,
    /// Target boundary mass.
    #[arg(long, default_value_t = 1e-12)]
    pub tail_eps: f64,
    /// Grow the caps until the boundary mass is below --tail-eps.
    #[arg(long, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
    pub auto: bool,
    /// Give up growing once the chain would exceed this many states.
    #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
    pub max_states: usize,
}

impl TruncationArgs {
    fn spec(&self) -> TruncationSpec {
        TruncationSpec {
            n1_max: self.n1_max,
            n2_max: self.n2_max,
            tail_eps: self.tail_eps,
            auto_grow: self.auto,
            max_states: self.max_states,
        }
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    /// Master seed (decimal or 0x-prefixed hex).
    #[arg(long, default_value = "0x5EED", value_parser = parse_seed)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    /// Departures per replication.
    #[arg(long, default_value_t = 500_000)]
    pub horizon: u64,
    /// Departures discarded before measuring; default 10% of the horizon.
    #[arg(long)]
    pub warmup: Option<u64>,
}

impl SimArgs {
    fn config(&self) -> SimConfig {
        let mut config = SimConfig::new(self.seed, self.reps, self.horizon);
        if let Some(w) = self.warmup {
            config.warmup_events = w;
        }
        config
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CtmcArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Write the event trace of replication 0 to this file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Absolute tolerance on occupancy fractions.
    #[arg(long, default_value_t = 1e-8)]
    pub tol_occupancy: f64,
    /// Relative tolerance on mean lengths and sojourn times.
    #[arg(long, default_value_t = 1e-6)]
    pub tol_length: f64,
    /// Relative tolerance on boundary-function values and numeric derivatives.
    #[arg(long, default_value_t = 1e-4)]
    pub tol_boundary: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Engine {
    #[default]
    Analytic,
    Ctmc,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Comma-separated values.
    #[arg(long)]
    pub lambda1: String,
    #[arg(long)]
    pub lambda2: String,
    #[arg(long)]
    pub mu: String,
    #[arg(long, value_enum, default_value_t)]
    pub engine: Engine,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DistArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// What a command prints on stdout and the exit code that goes with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            code: EXIT_OK,
        }
    }
}

pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Analyze(a) => analyze(a),
        Command::Ctmc(a) => ctmc(a),
        Command::Simulate(a) => simulate(a),
        Command::Validate(a) => validate(a),
        Command::Sweep(a) => sweep(a),
        Command::Dist(a) => dist(a),
    }
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Outcome, CliError> {
    let params = args.params.params()?;
    let traffic = params.require_stable()?;
    let occupancy = server_occupancy(&params)?;
    let lengths = mean_lengths(&params)?;
    let boundary = boundary_values(&params)?;

    let mut doc = Document::new(&params, "analytic");
    let m = &mut doc.metrics;
    m.insert("p000".into(), num(idle_probability(&params)?));
    m.insert("p_free".into(), num(occupancy.p_free));
    m.insert("p_class1".into(), num(occupancy.p_class1));
    m.insert("p_class2".into(), num(occupancy.p_class2));
    m.insert("L1".into(), num(lengths.l1));
    m.insert("L2_conservation".into(), num(lengths.l2));
    m.insert(
        "L2_pgf_derivative".into(),
        num(mean_length_class2(&params, L2Route::PgfDerivative)?),
    );
    m.insert(
        "L2_printed".into(),
        num(mean_length_class2(&params, L2Route::Printed)?),
    );
    m.insert("L_total".into(), num(lengths.l_total));
    m.insert("f_1".into(), num(boundary.f1));
    m.insert("f_prime_1".into(), num(boundary.fp1));
    m.insert("f_double_prime_1".into(), num(boundary.fpp1));
    m.insert("F02_at_1".into(), num(boundary.f02_at_1));
    m.insert("F02_prime_at_1".into(), num(boundary.f02_prime_at_1));
    m.insert(
        "F02_prime_at_1_printed".into(),
        num(f0_2_prime_at_1_printed(&params)?),
    );
    doc.diagnostics
        .insert("stable".into(), traffic.stable.into());
    doc.diagnostics.insert("guard_band".into(), num(GUARD_BAND));
    doc.diagnostics
        .insert("derivative_step".into(), num(DERIVATIVE_STEP));
    Ok(Outcome::ok(doc.render(args.format)))
}

fn method_name(method: SolveMethod) -> &'static str {
    match method {
        SolveMethod::Direct => "direct",
        SolveMethod::Iterative => "iterative",
    }
}

pub fn ctmc(args: &CtmcArgs) -> Result<Outcome, CliError> {
    let params = args.params.params()?;
    let outcome = auto_truncate(&params, &args.truncation.spec())?;
    let m = metrics(&outcome.solution);

    let mut doc = Document::new(&params, "ctmc");
    let d = &mut doc.metrics;
    d.insert("p000".into(), num(m.p000));
    d.insert("p_free".into(), num(m.occupancy.p_free));
    d.insert("p_class1".into(), num(m.occupancy.p_class1));
    d.insert("p_class2".into(), num(m.occupancy.p_class2));
    d.insert("L1".into(), num(m.l1));
    d.insert("L2".into(), num(m.l2));
    d.insert("L_total".into(), num(m.l_total));
    d.insert("F02_at_1".into(), num(m.f02_at_1));
    d.insert("F02_prime_at_1".into(), num(m.f02_prime_at_1));
    let g = &mut doc.diagnostics;
    g.insert("tail_mass".into(), num(m.tail_mass));
    g.insert("residual".into(), num(m.residual));
    g.insert("n1_max".into(), outcome.spec.n1_max.into());
    g.insert("n2_max".into(), outcome.spec.n2_max.into());
    g.insert("states".into(), outcome.chain.len().into());
    g.insert(
        "transitions".into(),
        outcome.chain.transition_count().into(),
    );
    g.insert("method".into(), method_name(outcome.solution.method).into());
    g.insert("iterations".into(), outcome.solution.iterations.into());
    Ok(Outcome::ok(doc.render(args.format)))
}

fn estimate_json(e: Option<&SimEstimate>) -> Value {
    json!({
        "mean": opt_num(e.map(|e| e.mean)),
        "half_width": opt_num(e.and_then(|e| e.half_width)),
    })
}

fn little_json(outcome: &LittleOutcome) -> Value {
    match outcome {
        LittleOutcome::NotApplicable => "not_applicable".into(),
        LittleOutcome::Skipped => "skipped_unstable".into(),
        LittleOutcome::Checked {
            discrepancy, bound, ..
        } => json!({
            "discrepancy": num(*discrepancy),
            "bound": opt_num(*bound),
            "within_bounds": outcome.within_bounds(),
        }),
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<Outcome, CliError> {
    let params = args.params.params()?;
    let config = args.sim.config();
    let report = sim::run(&params, &config)?;
    if let Some(path) = &args.trace {
        let file = File::create(path)
            .map_err(|e| CliError::input(format!("cannot create {}: {e}", path.display())))?;
        let mut out = BufWriter::new(file);
        write_trace(&params, &config, 0, &mut out)
            .and_then(|()| out.flush().map_err(Into::into))
            .map_err(|e| CliError::engine(format!("trace output failed: {e}")))?;
    }

    let mut doc = Document::new(&params, "sim");
    let m = &mut doc.metrics;
    m.insert("p_free".into(), estimate_json(Some(&report.p_free)));
    m.insert("p_class1".into(), estimate_json(Some(&report.p_class1)));
    m.insert("p_class2".into(), estimate_json(Some(&report.p_class2)));
    m.insert("L1".into(), estimate_json(Some(&report.l1)));
    m.insert("L2".into(), estimate_json(Some(&report.l2)));
    m.insert("W1".into(), estimate_json(report.w1.as_ref()));
    m.insert("W2".into(), estimate_json(report.w2.as_ref()));
    let check = littles_law_check(&report, &params);
    let g = &mut doc.diagnostics;
    g.insert("stable".into(), report.stable.into());
    g.insert("seed".into(), config.seed.into());
    g.insert("replications".into(), config.replications.into());
    g.insert("horizon".into(), config.horizon_events.into());
    g.insert("warmup".into(), config.warmup_events.into());
    g.insert("confidence".into(), num(config.confidence));
    g.insert("rng".into(), "xoshiro256++".into());
    g.insert("littles_law_class1".into(), little_json(&check.class1));
    g.insert("littles_law_class2".into(), little_json(&check.class2));
    Ok(Outcome::ok(doc.render(args.format)))
}

pub fn validate(args: &ValidateArgs) -> Result<Outcome, CliError> {
    let params = args.params.params()?;
    let tolerances = Tolerances {
        occupancy: args.tol_occupancy,
        length: args.tol_length,
        boundary: args.tol_boundary,
    };
    if ![tolerances.occupancy, tolerances.length, tolerances.boundary]
        .iter()
        .all(|t| *t >= 0.0)
    {
        return Err(CliError::input("tolerances must be non-negative"));
    }
    let report = validate::run(
        &params,
        tolerances,
        &args.sim.config(),
        &args.truncation.spec(),
    )?;
    let stdout = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.to_json()).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = csv_line([
                "metric",
                "analytic",
                "ctmc",
                "sim_mean",
                "sim_half_width",
                "abs_dev",
                "rel_dev",
                "tolerance",
                "pass",
            ]);
            s.push('\n');
            for r in &report.rows {
                s += &csv_line([
                    r.metric.to_string(),
                    scalar(&num(r.analytic)),
                    scalar(&num(r.ctmc)),
                    scalar(&opt_num(r.sim.map(|e| e.mean))),
                    scalar(&opt_num(r.sim.and_then(|e| e.half_width))),
                    scalar(&num(r.abs_dev)),
                    scalar(&num(r.rel_dev)),
                    scalar(&num(r.tolerance)),
                    r.pass.to_string(),
                ]);
                s.push('\n');
            }
            s
        }
        Format::Text => report.to_text(),
    };
    Ok(Outcome {
        stdout,
        code: if report.pass { EXIT_OK } else { EXIT_TOLERANCE },
    })
}

/// Parses a comma-separated list of numbers; empty items are ignored.
pub fn parse_list(name: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::input(format!("--{name}: cannot parse {t:?} as a number")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: ModelParams,
    pub stable: bool,
    /// `[p_free, p_class1, p_class2, L1, L2]`; `None` when unstable.
    pub values: Option<[f64; 5]>,
}

pub const SWEEP_COLUMNS: [&str; 11] = [
    "lambda1", "lambda2", "mu", "rho", "stable", "p_free", "p_class1", "p_class2", "L1", "L2",
    "engine",
];

fn sweep_point(
    params: ModelParams,
    engine: Engine,
    spec: &TruncationSpec,
) -> Result<SweepRow, CliError> {
    let stable = params.validate()?.stable;
    if !stable {
        return Ok(SweepRow {
            params,
            stable,
            values: None,
        });
    }
    let values = match engine {
        Engine::Analytic => {
            let o = server_occupancy(&params)?;
            let l = mean_lengths(&params)?;
            [o.p_free, o.p_class1, o.p_class2, l.l1, l.l2]
        }
        Engine::Ctmc => {
            let m = metrics(&auto_truncate(&params, spec)?.solution);
            [
                m.occupancy.p_free,
                m.occupancy.p_class1,
                m.occupancy.p_class2,
                m.l1,
                m.l2,
            ]
        }
    };
    Ok(SweepRow {
        params,
        stable,
        values: Some(values),
    })
}

pub fn sweep_rows(args: &SweepArgs) -> Result<Vec<SweepRow>, CliError> {
    let l1s = parse_list("lambda1", &args.lambda1)?;
    let l2s = parse_list("lambda2", &args.lambda2)?;
    let mus = parse_list("mu", &args.mu)?;
    let mut grid = Vec::new();
    for &l1 in &l1s {
        for &l2 in &l2s {
            for &mu in &mus {
                grid.push(ModelParams::new(l1, l2, mu)?);
            }
        }
    }
    if grid.is_empty() {
        return Err(CliError::input("sweep grid is empty"));
    }
    let spec = args.truncation.spec();
    spec.validate()?;
    grid.into_par_iter()
        .map(|p| sweep_point(p, args.engine, &spec))
        .collect()
}

pub fn sweep(args: &SweepArgs) -> Result<Outcome, CliError> {
    let rows = sweep_rows(args)?;
    let engine = match args.engine {
        Engine::Analytic => "analytic",
        Engine::Ctmc => "ctmc",
    };
    let cells = |r: &SweepRow| -> Vec<Value> {
        let p = &r.params;
        let mut v = vec![
            num(p.lambda1),
            num(p.lambda2),
            num(p.mu),
            num(p.rho()),
            r.stable.into(),
        ];
        match r.values {
            Some(vals) => v.extend(vals.iter().map(|x| num(*x))),
            None => v.extend(std::iter::repeat(Value::Null).take(5)),
        }
        v.push(engine.into());
        v
    };
    let stdout = match args.format {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let map: Map<String, Value> = SWEEP_COLUMNS
                        .iter()
                        .map(|c| c.to_string())
                        .zip(cells(r))
                        .collect();
                    Value::Object(map)
                })
                .collect();
            let unstable = rows.iter().filter(|r| r["stable"] == false).count();
            let doc = json!({
                "params": {
                    "lambda1": parse_list("lambda1", &args.lambda1)?,
                    "lambda2": parse_list("lambda2", &args.lambda2)?,
                    "mu": parse_list("mu", &args.mu)?,
                },
                "engine": engine,
                "metrics": { "rows": rows },
                "diagnostics": { "points": rows.len(), "unstable": unstable },
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv | Format::Text => {
            let mut s = csv_line(SWEEP_COLUMNS);
            s.push('\n');
            for r in &rows {
                s += &csv_line(cells(r).iter().map(scalar));
                s.push('\n');
            }
            s
        }
    };
    Ok(Outcome::ok(stdout))
}

/// `(n, P(N1 = n), P(N2 = n), P(N1 + N2 = n))` rows up to the first `n`
/// where all three fall below [`DIST_CUTOFF`].
pub fn dist_rows(
    params: &ModelParams,
    spec: &TruncationSpec,
) -> Result<Vec<(usize, [f64; 3])>, CliError> {
    let outcome = auto_truncate(params, spec)?;
    let m = marginal_distributions(&outcome.solution);
    let at = |v: &[f64], n: usize| v.get(n).copied().unwrap_or(0.0);
    let mut rows = Vec::new();
    for n in 0..m.total.len() {
        let row = [at(&m.class1, n), at(&m.class2, n), at(&m.total, n)];
        if row.iter().all(|p| *p < DIST_CUTOFF) {
            break;
        }
        rows.push((n, row));
    }
    Ok(rows)
}

pub fn dist(args: &DistArgs) -> Result<Outcome, CliError> {
    let params = args.params.params()?;
    let rows = dist_rows(&params, &args.truncation.spec())?;
    let stdout = match args.format {
        Format::Json => {
            let mut doc = Document::new(&params, "ctmc");
            let rows: Vec<Value> = rows
                .iter()
                .map(|(n, [p1, p2, pt])| json!({"n": n, "p_n1": num(*p1), "p_n2": num(*p2), "p_total": num(*pt)}))
                .collect();
            doc.diagnostics.insert("rows".into(), rows.len().into());
            doc.diagnostics.insert("cutoff".into(), num(DIST_CUTOFF));
            doc.metrics.insert("rows".into(), rows.into());
            doc.render(Format::Json)
        }
        Format::Csv | Format::Text => {
            let mut s = csv_line(["n", "P(N1=n)", "P(N2=n)", "P(N1+N2=n)"]);
            s.push('\n');
            for (n, row) in &rows {
                let mut fields = vec![n.to_string()];
                fields.extend(row.iter().map(|p| scalar(&num(*p))));
                s += &csv_line(fields);
                s.push('\n');
            }
            s
        }
    };
    Ok(Outcome::ok(stdout))
}
