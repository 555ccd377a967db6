//! Command-line front end.
//!
//! [`run`] parses arguments, computes a [`Report`] and renders it. Exit codes:
//! 0 on success, 1 on data errors, 2 when the maintained assumptions are
//! refuted by the data, 64 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::bounds::{
    self, AssumptionSet, BoundMethod, BoundsError, TestingSnapshot,
};
use crate::inference::{self, CiConfig, CiMethod, InferenceError};
use crate::ingestion::{self, CleaningPolicy, DatasetFormat, DatasetSpec, IngestError};
use crate::interval::Interval;
use crate::oracle::{self, OracleError};
use crate::report::{Cell, OutputFormat, Report, Table};
use crate::timeseries::{self, BoundSeries, MonotoneRule, RegionSeries, SeriesError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "prevalence-bounds",
    version,
    about = "Partial-identification bounds on infection prevalence from testing rate and yield"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All bound families for one testing snapshot.
    Bounds(BoundsArgs),
    /// Per-date bounds for surveillance series.
    Series(SeriesArgs),
    /// Per-date bounds with infection fatality rate bounds appended.
    Ifr(SeriesArgs),
    /// NPV implied by sensitivity bounds, and sensitivity implied by NPV bounds.
    Npv(NpvArgs),
    /// Compare the closed-form bounds with the brute-force feasibility oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct AssumptionArgs {
    /// Sensitivity interval `lo:hi`.
    #[arg(long, default_value = "0.7:0.95")]
    pub pi: Interval,
    /// Selectivity interval `lo:hi`; `inf` allowed as the upper endpoint.
    #[arg(long, default_value = "1:inf")]
    pub kappa: Interval,
    /// NPV interval `lo:hi` for the comparison bounds.
    #[arg(long, default_value = "0.6:0.9")]
    pub eta: Interval,
}

impl AssumptionArgs {
    fn assumptions(&self) -> Result<AssumptionSet, CliError> {
        AssumptionSet::new(self.pi, self.kappa, Some(self.eta)).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Markdown)]
    pub format: OutputFormat,
    /// Decimal places for csv and markdown output.
    #[arg(long, default_value_t = 3)]
    pub digits: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CiMethodArg {
    Intersect,
    ImbensManski,
}

impl From<CiMethodArg> for CiMethod {
    fn from(m: CiMethodArg) -> Self {
        match m {
            CiMethodArg::Intersect => CiMethod::IntersectOneSided,
            CiMethodArg::ImbensManski => CiMethod::ImbensManski,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CiArgs {
    /// Attach (1 - alpha) confidence intervals; needs raw counts.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t = CiMethodArg::Intersect)]
    pub ci_method: CiMethodArg,
}

impl CiArgs {
    fn config(&self) -> Result<Option<CiConfig>, CliError> {
        self.alpha
            .map(|a| CiConfig::new(a, self.ci_method.into()))
            .transpose()
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    /// Testing rate.
    #[arg(long, required_unless_present = "n_population")]
    pub tau: Option<f64>,
    /// Test yield.
    #[arg(long, required_unless_present = "n_population")]
    pub gamma: Option<f64>,
    /// Population size (use with --n-tested and --n-positive instead of rates).
    #[arg(long, requires_all = ["n_tested", "n_positive"], conflicts_with_all = ["tau", "gamma"])]
    pub n_population: Option<u64>,
    #[arg(long)]
    pub n_tested: Option<u64>,
    #[arg(long)]
    pub n_positive: Option<u64>,
    #[command(flatten)]
    pub assumptions: AssumptionArgs,
    #[command(flatten)]
    pub ci: CiArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DataFormatArg {
    Generic,
    Tracking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CleaningArg {
    Reject,
    Clamp,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MonotoneRuleArg {
    Sharp,
    ForwardOnly,
}

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    /// Surveillance dataset.
    #[arg(long)]
    pub data: PathBuf,
    /// `region,population` file.
    #[arg(long)]
    pub regions: PathBuf,
    #[arg(long, value_enum, default_value_t = DataFormatArg::Generic)]
    pub data_format: DataFormatArg,
    /// Restrict to one region.
    #[arg(long)]
    pub region: Option<String>,
    #[arg(long, value_enum, default_value_t = CleaningArg::Reject)]
    pub cleaning: CleaningArg,
    #[command(flatten)]
    pub assumptions: AssumptionArgs,
    /// Lower selectivity bounds for the upper-bound sweep, e.g. `1,1.5,2,3,5`.
    #[arg(long, value_delimiter = ',')]
    pub kappa_grid: Option<Vec<f64>>,
    /// Refine bounds assuming cumulative prevalence never decreases.
    #[arg(long)]
    pub monotone: bool,
    #[arg(long, value_enum, default_value_t = MonotoneRuleArg::Sharp)]
    pub monotone_rule: MonotoneRuleArg,
    /// Only report these dates (ISO format, comma separated).
    #[arg(long, value_delimiter = ',')]
    pub dates: Option<Vec<NaiveDate>>,
    #[command(flatten)]
    pub ci: CiArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct NpvArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, default_value = "0.7:0.95")]
    pub pi: Interval,
    #[arg(long, default_value = "0.6:0.9")]
    pub eta: Interval,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, default_value = "0.7:0.95")]
    pub pi: Interval,
    #[arg(long, default_value = "1:inf")]
    pub kappa: Interval,
    /// Grid step for prevalence and sensitivity.
    #[arg(long, default_value_t = oracle::DEFAULT_RHO_STEP)]
    pub step: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Infeasible(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::Data(_) => EXIT_DATA,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Infeasible(m) | CliError::Data(m) => m,
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::AssumptionInfeasible { .. } => CliError::Infeasible(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match &e {
            SeriesError::Bounds {
                source: BoundsError::AssumptionInfeasible { .. },
                ..
            } => CliError::Infeasible(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<InferenceError> for CliError {
    fn from(e: InferenceError) -> Self {
        match e {
            InferenceError::Bounds(b) => b.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Input(b) => b.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

/// Runs the CLI on `args` (including the program name), writing the report to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let (result, output) = match &cli.command {
        Command::Bounds(a) => (bounds_report(a), &a.output),
        Command::Series(a) => (series_report(a, false), &a.output),
        Command::Ifr(a) => (series_report(a, true), &a.output),
        Command::Npv(a) => (npv_report(a), &a.output),
        Command::Verify(a) => (verify_report(a), &a.output),
    };
    match result {
        Ok(outcome) => {
            if let Err(e) = outcome.report.render(output.format, output.digits, &mut &mut *out) {
                let _ = writeln!(err, "error: {e}");
                return EXIT_DATA;
            }
            if let Some(msg) = &outcome.failure {
                let _ = writeln!(err, "error: {msg}");
                return EXIT_DATA;
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

/// A report plus an optional failure to signal after it is printed.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub failure: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self { report, failure: None }
    }
}

fn params(a: &AssumptionArgs) -> serde_json::Value {
    json!({ "pi": a.pi, "kappa": a.kappa, "eta": a.eta })
}

fn bounds_report(a: &BoundsArgs) -> Result<Outcome, CliError> {
    let assumptions = a.assumptions.assumptions()?;
    let ci = a.ci.config()?;
    let snapshot = match (a.n_population, a.n_tested, a.n_positive) {
        (Some(n), Some(t), Some(p)) => TestingSnapshot::from_counts(n, t, p),
        _ => TestingSnapshot::new(a.tau.unwrap_or(f64::NAN), a.gamma.unwrap_or(f64::NAN)),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    if ci.is_some() && snapshot.n_population.is_none() {
        return Err(CliError::Usage(
            "--alpha needs raw counts (--n-population, --n-tested, --n-positive)".into(),
        ));
    }

    let families = [
        BoundMethod::WorstCase,
        BoundMethod::Sensitivity,
        BoundMethod::SensitivitySelectivity,
        BoundMethod::NpvBased,
    ];
    let mut columns = vec!["family", "prevalence"];
    if ci.is_some() {
        columns.push("ci");
    }
    let mut table = Table::new(columns);
    for method in families {
        let b = bounds::evaluate(method, &snapshot, &assumptions)?;
        let mut row = vec![Cell::from(method.label()), b.interval.into()];
        if let Some(cfg) = &ci {
            row.push(inference::prevalence_ci(method, &snapshot, &assumptions, cfg)?.ci.into());
        }
        table.push(row);
    }
    Ok(Report {
        command: "bounds".into(),
        parameters: json!({
            "tau": snapshot.tau,
            "gamma": snapshot.gamma,
            "assumptions": params(&a.assumptions),
            "alpha": a.ci.alpha,
        }),
        table,
    }
    .into())
}

fn npv_report(a: &NpvArgs) -> Result<Outcome, CliError> {
    let npv = bounds::npv_from_sensitivity(a.gamma, a.pi)?;
    let sens = bounds::sensitivity_from_npv(a.gamma, a.eta)?;
    let tested = Interval {
        lo: bounds::tested_prevalence_from_npv(a.gamma, a.eta.hi),
        hi: bounds::tested_prevalence_from_npv(a.gamma, a.eta.lo),
    };
    let mut table = Table::new(["quantity", "interval"]);
    table.push(vec!["npv (from sensitivity)".into(), npv.into()]);
    table.push(vec!["sensitivity (from npv)".into(), sens.into()]);
    table.push(vec!["tested prevalence (from npv)".into(), tested.into()]);
    Ok(Report {
        command: "npv".into(),
        parameters: json!({ "gamma": a.gamma, "pi": a.pi, "eta": a.eta }),
        table,
    }
    .into())
}

fn verify_report(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let snapshot = TestingSnapshot::new(a.tau, a.gamma).map_err(|e| CliError::Usage(e.to_string()))?;
    let assumptions =
        AssumptionSet::new(a.pi, a.kappa, None).map_err(|e| CliError::Usage(e.to_string()))?;
    if !(a.step > 0.0 && a.step <= 1.0) {
        return Err(CliError::Usage(format!("--step must lie in (0, 1], got {}", a.step)));
    }
    let closed = bounds::selectivity_bounds(&snapshot, &assumptions)?.interval;
    let grid = oracle::feasible_set(&snapshot, &assumptions, a.step)?;
    let discrepancy = closed.max_endpoint_distance(&grid.feasible_interval);
    let tolerance = 2.0 * a.step;
    let pass = discrepancy <= tolerance;

    let mut table = Table::new(["quantity", "value"]);
    table.push(vec!["closed form".into(), closed.into()]);
    table.push(vec!["oracle".into(), grid.feasible_interval.into()]);
    table.push(vec!["max endpoint discrepancy".into(), Cell::Number(discrepancy)]);
    table.push(vec!["tolerance".into(), Cell::Number(tolerance)]);
    table.push(vec!["status".into(), if pass { "pass" } else { "FAIL" }.into()]);
    Ok(Outcome {
        report: Report {
            command: "verify".into(),
            parameters: json!({
                "tau": a.tau, "gamma": a.gamma, "pi": a.pi, "kappa": a.kappa, "step": a.step,
            }),
            table,
        },
        failure: (!pass).then(|| {
            format!("oracle and closed form disagree by {discrepancy:e} > {tolerance:e}")
        }),
    })
}

/// Rows for one region, computed independently of other regions.
fn region_rows(
    series: &RegionSeries,
    a: &SeriesArgs,
    assumptions: &AssumptionSet,
    ci: Option<&CiConfig>,
    with_ifr: bool,
) -> Result<Vec<Vec<Cell>>, CliError> {
    let snaps = timeseries::snapshots(series)?;
    let rule = match a.monotone_rule {
        MonotoneRuleArg::Sharp => MonotoneRule::Sharp,
        MonotoneRuleArg::ForwardOnly => MonotoneRule::ForwardOnly,
    };
    let refine = |b: BoundSeries| -> Result<BoundSeries, CliError> {
        if a.monotone {
            Ok(timeseries::monotone_refine(&b, rule)?)
        } else {
            Ok(b)
        }
    };
    let keep = |date: &NaiveDate| a.dates.as_ref().is_none_or(|d| d.contains(date));
    let note = |i: usize| -> Cell {
        if !snaps[i].has_tests() {
            "no-tests".into()
        } else {
            Cell::Empty
        }
    };

    let mut rows = Vec::new();
    match &a.kappa_grid {
        Some(grid) => {
            let mut grid = grid.clone();
            grid.sort_by(|x, y| y.total_cmp(x));
            let mut columns: Vec<BoundSeries> = Vec::with_capacity(grid.len());
            for &k in &grid {
                let kappa = Interval::selectivity(k, assumptions.kappa.hi)
                    .map_err(|e| CliError::Usage(format!("--kappa-grid: {e}")))?;
                columns.push(refine(timeseries::bound_series(
                    series,
                    BoundMethod::SensitivitySelectivity,
                    &assumptions.with_kappa(kappa),
                )?)?);
            }
            for (i, r) in series.records.iter().enumerate() {
                if !keep(&r.date) {
                    continue;
                }
                let lower = columns.iter().map(|c| c.intervals[i].lo).fold(f64::NEG_INFINITY, f64::max);
                let mut row = vec![
                    Cell::from(series.region.as_str()),
                    r.date.to_string().into(),
                    Cell::Number(lower),
                ];
                for c in &columns {
                    row.push(Cell::Number(c.intervals[i].hi));
                }
                if with_ifr {
                    row.push(Cell::Count(r.cum_deaths));
                    let ifr_upper = bounds::ifr_bounds(
                        r.cum_deaths,
                        series.population,
                        Interval { lo: lower, hi: 1.0 },
                    )?;
                    for c in &columns {
                        let ifr = bounds::ifr_bounds(r.cum_deaths, series.population, c.intervals[i])?;
                        row.push(Cell::Number(ifr.lo));
                    }
                    row.push(Cell::Number(ifr_upper.hi));
                }
                row.push(note(i));
                rows.push(row);
            }
        }
        None => {
            let prevalence = refine(timeseries::bound_series(
                series,
                BoundMethod::SensitivitySelectivity,
                assumptions,
            )?)?;
            let npv_prevalence =
                refine(timeseries::bound_series(series, BoundMethod::NpvBased, assumptions)?)?;
            let eta = assumptions.eta.expect("eta always set by the CLI");
            for (i, r) in series.records.iter().enumerate() {
                if !keep(&r.date) {
                    continue;
                }
                let s = &snaps[i];
                let npv = if s.gamma < 1.0 {
                    Cell::Interval(bounds::npv_from_sensitivity(s.gamma, assumptions.pi)?)
                } else {
                    Cell::Empty
                };
                let sens = match bounds::sensitivity_from_npv(s.gamma, eta) {
                    Ok(iv) => Cell::Interval(iv),
                    Err(BoundsError::DegenerateDenominator(_)) => Cell::Empty,
                    Err(e) => return Err(e.into()),
                };
                let mut row = vec![
                    Cell::from(series.region.as_str()),
                    r.date.to_string().into(),
                    prevalence.intervals[i].into(),
                    npv,
                    npv_prevalence.intervals[i].into(),
                    sens,
                ];
                if let Some(cfg) = ci {
                    let cell = if s.has_tests() {
                        let est = inference::prevalence_ci(
                            BoundMethod::SensitivitySelectivity,
                            s,
                            assumptions,
                            cfg,
                        )?;
                        Cell::Interval(est.ci)
                    } else {
                        Cell::Empty
                    };
                    row.push(cell);
                }
                if with_ifr {
                    row.push(Cell::Count(r.cum_deaths));
                    row.push(
                        bounds::ifr_bounds(r.cum_deaths, series.population, prevalence.intervals[i])?
                            .into(),
                    );
                    row.push(
                        bounds::ifr_bounds(
                            r.cum_deaths,
                            series.population,
                            npv_prevalence.intervals[i],
                        )?
                        .into(),
                    );
                }
                row.push(note(i));
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

fn kappa_label(k: f64) -> String {
    format!("upper_kappa_ge_{k}")
}

fn series_report(a: &SeriesArgs, with_ifr: bool) -> Result<Outcome, CliError> {
    let assumptions = a.assumptions.assumptions()?;
    let ci = a.ci.config()?;
    if ci.is_some() && a.kappa_grid.is_some() {
        return Err(CliError::Usage("--alpha cannot be combined with --kappa-grid".into()));
    }
    let regions = ingestion::load_regions(&a.regions)?;
    let spec = DatasetSpec {
        path: a.data.clone(),
        format: match a.data_format {
            DataFormatArg::Generic => DatasetFormat::GenericCsv,
            DataFormatArg::Tracking => DatasetFormat::TrackingProjectCsv,
        },
        region_filter: a.region.clone(),
        cleaning: match a.cleaning {
            CleaningArg::Reject => CleaningPolicy::Reject,
            CleaningArg::Clamp => CleaningPolicy::ClampRunningMax,
            CleaningArg::Drop => CleaningPolicy::DropRecord,
        },
    };
    let dataset = ingestion::load(&spec, &regions)?;

    let mut columns: Vec<String> = vec!["region".into(), "date".into()];
    match &a.kappa_grid {
        Some(grid) => {
            let mut grid = grid.clone();
            grid.sort_by(|x, y| y.total_cmp(x));
            columns.push("lower".into());
            columns.extend(grid.iter().map(|&k| kappa_label(k)));
            if with_ifr {
                columns.push("cum_deaths".into());
                columns.extend(grid.iter().map(|&k| format!("ifr_lower_kappa_ge_{k}")));
                columns.push("ifr_upper".into());
            }
        }
        None => {
            columns.extend(
                ["prevalence", "npv", "npv_prevalence", "npv_sensitivity"].map(String::from),
            );
            if ci.is_some() {
                columns.push("prevalence_ci".into());
            }
            if with_ifr {
                columns.extend(["cum_deaths", "ifr", "npv_ifr"].map(String::from));
            }
        }
    }
    columns.push("note".into());

    // Regions are independent; collect preserves input order.
    let per_region: Vec<Result<Vec<Vec<Cell>>, CliError>> = dataset
        .series
        .par_iter()
        .map(|s| region_rows(s, a, &assumptions, ci.as_ref(), with_ifr))
        .collect();
    let mut table = Table::new(columns);
    for rows in per_region {
        for row in rows? {
            table.push(row);
        }
    }
    Ok(Report {
        command: if with_ifr { "ifr" } else { "series" }.into(),
        parameters: json!({
            "assumptions": params(&a.assumptions),
            "kappa_grid": a.kappa_grid,
            "monotone": a.monotone,
            "monotone_rule": format!("{:?}", a.monotone_rule),
            "alpha": a.ci.alpha,
            "warnings": dataset.warnings,
        }),
        table,
    }
    .into())
}
