mod config;
mod data;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use otdc_core::calibrate::{search_lambda, CalibrationConfig};
use otdc_core::dist::{conditional_mutual_information, empirical_distribution, satisfies_ci, CiConstraint, Tuple};
use otdc_core::eval::{inject_corruption, statistical_distortion, CorruptionKind, CorruptionSpec};
use otdc_core::fairness::{Metric, MetricPanel};
use otdc_core::ot::CostFn;
use otdc_core::repair::{apply_cleaner, repair, RepairProblem, RepairStatus};
use serde_json::Value;

use config::Settings;
use report::{opt, panel, Report};

#[derive(Parser)]
#[command(name = "otdc", version, about = "Optimal-transport data cleaning and score calibration")]
struct Cli {
    /// Flat key=value file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report the CI violation of a dataset (exit 3 when violated).
    CheckCi(CheckCiArgs),
    /// Repair a dataset so it satisfies a CI constraint.
    Repair(RepairArgs),
    /// Fairness panel for a score file.
    Fairness(FairnessArgs),
    /// Barycenter calibration with a λ search.
    Calibrate(CalibrateArgs),
    /// OT distance between an original and a repaired dataset.
    Distortion(DistortionArgs),
    /// Inject noise or missingness into a dataset.
    Synth(SynthArgs),
}

#[derive(Args)]
struct CheckCiArgs {
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    constraint: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    /// `name=v1,v2,...` per line; domains are inferred when absent.
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct RepairArgs {
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    constraint: Option<String>,
    #[arg(long)]
    cost: Option<CostFn>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long)]
    ci_tol: Option<f64>,
    #[arg(long)]
    max_outer: Option<usize>,
    #[arg(long)]
    starts: Option<usize>,
}

#[derive(Args)]
struct FairnessArgs {
    #[arg(long)]
    scores: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Comma-separated rate metrics: pr, tpr, fpr.
    #[arg(long)]
    targets: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    lambda_grid: Option<usize>,
    #[arg(long)]
    quantile_grid: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct DistortionArgs {
    #[arg(long)]
    original: Option<PathBuf>,
    #[arg(long)]
    repaired: Option<PathBuf>,
    #[arg(long)]
    cost: Option<CostFn>,
    /// Also report CI violations of both datasets.
    #[arg(long)]
    constraint: Option<String>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    kind: Option<CorruptionKind>,
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    drivers: Option<String>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    schema: Option<PathBuf>,
}

/// Non-error outcomes with their own exit codes.
enum Outcome {
    Success,
    Verdict,
    NotConverged,
}

fn check_ci(cfg: &Settings, a: CheckCiArgs) -> Result<Outcome> {
    let path: PathBuf = cfg.require(a.data, "data")?;
    let sigma = CiConstraint::parse(&cfg.require::<String>(a.constraint, "constraint")?)?;
    let tol = cfg.or(a.tol, "tol", 1e-6)?;
    let schema_path: Option<PathBuf> = cfg.pick(a.schema, "schema")?;
    let table = data::read_table(&path)?;
    let schema = data::schema_for(schema_path.as_deref(), &table.header, &table.rows)?;
    let p = empirical_distribution(&table.rows, &schema)?;
    let check = satisfies_ci(&p, &sigma, tol)?;
    let cmi = conditional_mutual_information(&p, &sigma)?;
    Report::default()
        .set("constraint", sigma.to_string())
        .float("violation", check.violation)
        .float("cmi", cmi)
        .float("tol", tol)
        .set("satisfied", check.satisfied)
        .set("rows", table.rows.len())
        .emit(cfg.pick(a.report, "report")?.as_deref())?;
    Ok(if check.satisfied {
        Outcome::Success
    } else {
        Outcome::Verdict
    })
}

fn run_repair(cfg: &Settings, a: RepairArgs) -> Result<Outcome> {
    let path: PathBuf = cfg.require(a.data, "data")?;
    let sigma = CiConstraint::parse(&cfg.require::<String>(a.constraint, "constraint")?)?;
    let out: PathBuf = cfg.require(a.out, "out")?;
    let report_path: Option<PathBuf> = cfg.pick(a.report, "report")?;
    let schema_path: Option<PathBuf> = cfg.pick(a.schema, "schema")?;
    let table = data::read_table(&path)?;
    let schema = data::schema_for(schema_path.as_deref(), &table.header, &table.rows)?;

    let mut prob = RepairProblem::new(table.rows.clone(), schema, sigma.clone())?;
    prob.cost = cfg.or(a.cost, "cost", prob.cost)?;
    prob.reg.epsilon = cfg.or(a.epsilon, "epsilon", prob.reg.epsilon)?;
    prob.seed = cfg.or(a.seed, "seed", prob.seed)?;
    prob.ci_tol = cfg.or(a.ci_tol, "ci-tol", prob.ci_tol)?;
    prob.max_outer = cfg.or(a.max_outer, "max-outer", prob.max_outer)?;
    prob.starts = cfg.or(a.starts, "starts", prob.starts)?;

    let result = repair(&prob)?;
    let repaired = apply_cleaner(&table.rows, &result.cleaner, prob.seed)?;
    data::write_table(&out, &table.header, &repaired)?;
    let changed = table.rows.iter().zip(&repaired).filter(|(a, b)| a != b).count();
    let sampled = satisfies_ci(&empirical_distribution(&repaired, &prob.schema)?, &sigma, prob.ci_tol)?;
    Report::default()
        .set("constraint", sigma.to_string())
        .set("cost", prob.cost.name())
        .float("epsilon", prob.reg.epsilon)
        .set("seed", prob.seed)
        .float("transport_cost", result.transport_cost)
        .float("ci_violation_before", result.ci_violation_before)
        .float("ci_violation_after", result.ci_violation_after)
        .float("ci_violation_sampled", sampled.violation)
        .set("iterations", result.iterations)
        .set("status", result.status.to_string())
        .set("lifted", result.lifted)
        .set("rows", repaired.len())
        .set("rows_changed", changed)
        .emit(report_path.as_deref())?;
    Ok(match result.status {
        RepairStatus::NotConverged => Outcome::NotConverged,
        _ => Outcome::Success,
    })
}

fn fairness(cfg: &Settings, a: FairnessArgs) -> Result<Outcome> {
    let path: PathBuf = cfg.require(a.scores, "scores")?;
    let file = data::read_scores(&path)?;
    let p = MetricPanel::compute(&file.table)?;
    let mut r = Report::default().set("records", file.table.len());
    if let Value::Object(m) = panel(&p) {
        for (k, v) in m {
            r = r.set(&k, v);
        }
    }
    r.emit(cfg.pick(a.report, "report")?.as_deref())?;
    Ok(Outcome::Success)
}

fn parse_targets(s: &str) -> Result<Vec<Metric>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<Metric>().map_err(anyhow::Error::from))
        .collect()
}

fn calibrate(cfg: &Settings, a: CalibrateArgs) -> Result<Outcome> {
    let path: PathBuf = cfg.require(a.scores, "scores")?;
    let out: PathBuf = cfg.require(a.out, "out")?;
    let defaults = CalibrationConfig::default();
    let targets = match cfg.pick(a.targets, "targets")? {
        Some(s) => parse_targets(&s)?,
        None => defaults.targets.clone(),
    };
    let cal = CalibrationConfig {
        targets,
        alpha: cfg.pick(a.alpha, "alpha")?,
        lambda_grid: cfg.or(a.lambda_grid, "lambda-grid", defaults.lambda_grid)?,
        quantile_grid: cfg.or(a.quantile_grid, "quantile-grid", defaults.quantile_grid)?,
        threads: config::threads()?,
    };
    let file = data::read_scores(&path)?;
    let r = search_lambda(&file.table, &cal)?;
    data::write_scores(&out, &file, &r.calibrated)?;
    let names: Vec<Value> = cal.targets.iter().map(|m| Value::from(m.name())).collect();
    Report::default()
        .set("targets", names)
        .float("lambda_star", r.lambda_star)
        .float("objective_before", r.objective_before)
        .float("objective_after", r.objective_after)
        .float("mean_abs_change", r.mean_abs_change)
        .set("before", panel(&r.before))
        .set("after", panel(&r.after))
        .emit(cfg.pick(a.report, "report")?.as_deref())?;
    Ok(Outcome::Success)
}

fn distortion(cfg: &Settings, a: DistortionArgs) -> Result<Outcome> {
    let original = data::read_table(&cfg.require::<PathBuf>(a.original, "original")?)?;
    let repaired = data::read_table(&cfg.require::<PathBuf>(a.repaired, "repaired")?)?;
    if original.header != repaired.header {
        bail!(
            "headers differ: [{}] vs [{}]",
            original.header.join(","),
            repaired.header.join(",")
        );
    }
    let cost = cfg.or(a.cost, "cost", CostFn::Hamming)?;
    let sigma = cfg
        .pick::<String>(a.constraint, "constraint")?
        .map(|s| CiConstraint::parse(&s))
        .transpose()?;
    let both: Vec<Tuple> = original.rows.iter().chain(&repaired.rows).cloned().collect();
    let schema = data::schema_for(None, &original.header, &both)?;
    let d = statistical_distortion(&original.rows, &repaired.rows, &schema, cost, sigma.as_ref())?;
    Report::default()
        .set("cost", cost.name())
        .float("emd", d.emd)
        .set("repair_cost", opt(d.repair_cost))
        .set("rows_changed", d.rows_changed.map_or(Value::Null, Value::from))
        .set("ci_violation_before", opt(d.ci_violation_before))
        .set("ci_violation_after", opt(d.ci_violation_after))
        .emit(cfg.pick(a.report, "report")?.as_deref())?;
    Ok(Outcome::Success)
}

fn synth(cfg: &Settings, a: SynthArgs) -> Result<Outcome> {
    let path: PathBuf = cfg.require(a.data, "data")?;
    let out: PathBuf = cfg.require(a.out, "out")?;
    let schema_path: Option<PathBuf> = cfg.pick(a.schema, "schema")?;
    let drivers: Vec<String> = cfg
        .pick::<String>(a.drivers, "drivers")?
        .unwrap_or_default()
        .split(',')
        .map(str::trim)
        .filter(|d| !d.is_empty())
        .map(String::from)
        .collect();
    let spec = CorruptionSpec {
        kind: cfg.require(a.kind, "kind")?,
        target: cfg.require(a.target, "target")?,
        drivers,
        rate: cfg.require(a.rate, "rate")?,
        seed: cfg.or(a.seed, "seed", 0)?,
    };
    let table = data::read_table(&path)?;
    let schema = data::schema_for(schema_path.as_deref(), &table.header, &table.rows)?;
    let (rows, _) = inject_corruption(&table.rows, &spec, &schema)?;
    data::write_table(&out, &table.header, &rows)?;
    let changed = table.rows.iter().zip(&rows).filter(|(a, b)| a != b).count();
    eprintln!("{changed} of {} rows corrupted", rows.len());
    Ok(Outcome::Success)
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    let cfg = Settings::load(cli.config.as_deref().map(Path::new))?;
    match cli.command {
        Command::CheckCi(a) => check_ci(&cfg, a),
        Command::Repair(a) => run_repair(&cfg, a),
        Command::Fairness(a) => fairness(&cfg, a),
        Command::Calibrate(a) => calibrate(&cfg, a),
        Command::Distortion(a) => distortion(&cfg, a),
        Command::Synth(a) => synth(&cfg, a),
    }
}

/// Metric preconditions on the data itself count as verdicts, not input errors.
fn is_verdict(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        matches!(
            e.downcast_ref::<otdc_core::Error>(),
            Some(
                otdc_core::Error::MissingGroup(_)
                    | otdc_core::Error::NoPositives(_)
                    | otdc_core::Error::NoNegatives(_)
            )
        )
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli).context("otdc failed") {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Verdict) => ExitCode::from(3),
        Ok(Outcome::NotConverged) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_verdict(&e) { 3 } else { 2 })
        }
    }
}
