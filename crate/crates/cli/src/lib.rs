//! `chernoff-lab`: runs convergence experiments, checks tangency order and
//! fits convergence order against smoothness.

pub mod error;
pub mod output;
pub mod svg;

use std::io::Write;
use std::path::{Path, PathBuf};

use chernoff_core::analysis::{
    holder_meta_regression, run_experiment, DEFAULT_META_EXCLUDED, REFERENCE_HOLDER_LINE,
};
use chernoff_core::chernoff::{check_tangency, ShiftChernoffOperator, DEFAULT_TANGENCY_TIMES};
use chernoff_core::config::ExperimentConfig;
use chernoff_core::functions::catalog_entry;
use clap::{Args, Parser, Subcommand};

pub use error::{CliError, EXIT_FAILURE, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(
    name = "chernoff-lab",
    version,
    about = "Chernoff approximations to the heat equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute error curves and log-log fits, writing CSV and SVG files.
    Run(RunArgs),
    /// Check the Chernoff tangency order of an operator.
    CheckTangency(TangencyArgs),
    /// Regress S-operator slopes against the smoothness exponent.
    Meta(MetaArgs),
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Config file with `key = value` lines; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated initial conditions.
    #[arg(long)]
    pub conditions: Option<String>,
    /// Comma-separated operators (G, S).
    #[arg(long)]
    pub operators: Option<String>,
    /// Final time.
    #[arg(long)]
    pub t: Option<f64>,
    /// Largest number of steps.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Number of measurement points.
    #[arg(long)]
    pub grid_count: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `COND:OP:n1,n2`; replaces the exclusion set of that pair. Repeatable.
    #[arg(long)]
    pub exclude: Vec<String>,
}

#[derive(Debug, Args)]
pub struct TangencyArgs {
    /// G or S.
    pub operator: String,
    /// Tangency order.
    #[arg(value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    /// Comma-separated step sizes.
    #[arg(long, value_delimiter = ',')]
    pub t_values: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct MetaArgs {
    /// Summary CSV written by `run`.
    pub summary: PathBuf,
    /// Operator whose slopes are regressed.
    #[arg(long, default_value = "S")]
    pub operator: String,
    /// Comma-separated exponents left out of the fit.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_META_EXCLUDED.to_vec())]
    pub exclude_alpha: Vec<f64>,
}

/// Runs a parsed command, writing the report to `out`. Returns the exit status.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match &cli.command {
        Command::Run(args) => cmd_run(args, out),
        Command::CheckTangency(args) => cmd_check_tangency(args, out),
        Command::Meta(args) => cmd_meta(args, out),
    }
}

fn stdout_error(e: std::io::Error) -> CliError {
    CliError::Write {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

/// Builds the configuration from an optional file and the flags.
pub fn resolve_config(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
                path: path.clone(),
                source,
            })?;
            ExperimentConfig::parse(&text).map_err(CliError::Config)?
        }
        None => ExperimentConfig::default(),
    };
    let flags = [
        ("conditions", args.conditions.clone()),
        ("operators", args.operators.clone()),
        ("t", args.t.map(|v| v.to_string())),
        ("n_max", args.n_max.map(|v| v.to_string())),
        ("grid_count", args.grid_count.map(|v| v.to_string())),
    ];
    for (key, value) in flags {
        if let Some(value) = value {
            config.set(key, &value).map_err(CliError::Config)?;
        }
    }
    if let Some(dir) = &args.out {
        config.output_dir = dir.clone();
    }
    for spec in &args.exclude {
        config
            .apply_exclusion_spec(spec)
            .map_err(CliError::Config)?;
    }
    config.validate().map_err(CliError::Config)?;
    Ok(config)
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let config = resolve_config(args)?;
    let report = run_experiment(&config).map_err(CliError::Config)?;
    output::write_outputs(&config, &report)?;

    writeln!(
        out,
        "{:<14} {:<3} {:>10} {:>10} {:>8}  excluded",
        "condition", "op", "slope", "intercept", "R²"
    )
    .map_err(stdout_error)?;
    for r in &report.results {
        match &r.fit {
            Ok(fit) => writeln!(
                out,
                "{:<14} {:<3} {:>10.4} {:>10.4} {:>8.5}  {}",
                r.condition,
                r.operator,
                fit.slope,
                fit.intercept,
                fit.r2,
                output::format_set(&fit.excluded_n)
            ),
            Err(e) => writeln!(out, "{:<14} {:<3} failed: {e}", r.condition, r.operator),
        }
        .map_err(stdout_error)?;
    }
    writeln!(out, "outputs written to {}", config.output_dir.display()).map_err(stdout_error)?;
    Ok(if report.all_ok() { 0 } else { EXIT_FAILURE })
}

pub fn cmd_check_tangency(args: &TangencyArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let op = ShiftChernoffOperator::by_name(&args.operator)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let times = args
        .t_values
        .clone()
        .unwrap_or_else(|| DEFAULT_TANGENCY_TIMES.to_vec());
    let report =
        check_tangency(&op, args.k as usize, &times).map_err(|e| CliError::Usage(e.to_string()))?;
    writeln!(out, "operator {}, order {}", op.name(), args.k).map_err(stdout_error)?;
    writeln!(out, "{:>12} {:>24}", "t", "residual").map_err(stdout_error)?;
    for (t, r) in &report.residuals {
        writeln!(out, "{t:>12.3e} {r:>24.16e}").map_err(stdout_error)?;
    }
    writeln!(out, "limiting residual {:.6e}", report.limit()).map_err(stdout_error)?;
    let verdict = if report.pass { "PASS" } else { "FAIL" };
    writeln!(out, "verdict: {verdict}").map_err(stdout_error)?;
    Ok(if report.pass { 0 } else { EXIT_FAILURE })
}

pub fn cmd_meta(args: &MetaArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let rows = output::read_summary(&args.summary)?;
    let mut points = Vec::new();
    for row in rows
        .iter()
        .filter(|r| r.operator.eq_ignore_ascii_case(&args.operator))
    {
        let Ok(entry) = catalog_entry(&row.condition) else {
            continue;
        };
        if !row.condition.starts_with("abs-sin-") {
            continue;
        }
        if let Some(alpha) = entry.smoothness_exponent() {
            points.push((alpha, row.slope));
        }
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let fit = holder_meta_regression(&points, &args.exclude_alpha).map_err(CliError::Numerical)?;
    writeln!(out, "points    {}", fit.points).map_err(stdout_error)?;
    writeln!(out, "slope     {:.4}", fit.slope).map_err(stdout_error)?;
    writeln!(out, "intercept {:.4}", fit.intercept).map_err(stdout_error)?;
    writeln!(out, "R²        {:.4}", fit.r2).map_err(stdout_error)?;
    let (a, b) = REFERENCE_HOLDER_LINE;
    writeln!(out, "reference y = {a}x - {}", -b).map_err(stdout_error)?;
    Ok(0)
}

/// Output file stem for a condition or operator name.
pub fn sanitize(name: &str) -> String {
    name.replace(['/', '\\', ' '], "_")
}

pub fn curve_path(dir: &Path, condition: &str, operator: &str) -> PathBuf {
    dir.join(format!(
        "curve_{}_{}.csv",
        sanitize(condition),
        sanitize(operator)
    ))
}

pub fn chart_path(dir: &Path, condition: &str) -> PathBuf {
    dir.join(format!("plot_{}.svg", sanitize(condition)))
}
