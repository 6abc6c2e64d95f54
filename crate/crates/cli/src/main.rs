//! `modpair` — verification CLI for the discretized standard-pair model.
//!
//! Every subcommand runs a deterministic suite and emits a machine-readable
//! document on stdout (JSON report, or CSV for sweeps), with a short human
//! summary on stderr. Exit code 0 means every check passed, 1 means a check
//! failed or a numerical stage errored, 2 means the invocation or
//! configuration was invalid.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use modpair_core::error::ModelError;
use modpair_core::report::{SweepTable, VerificationReport};

use config::{OutputFormat, RunConfig};

#[derive(Parser)]
#[command(
    name = "modpair",
    version,
    about = "Verification suites for half-sided modular inclusions on a discretized line"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural identities of the base model, plus resolution checks on
    /// fine grids
    Selfcheck(CommonArgs),
    /// Convergence of the explicit translation kernel against the exact
    /// multiplier route, over three grid doublings
    #[command(name = "appendix-a")]
    AppendixA {
        /// Translation parameter (must be nonzero)
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        s: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Three-detector inclusion check for the configured phase pair
    Inclusion(CommonArgs),
    /// One of the named reproduction suites (see `example --help`)
    Example {
        /// Suite name: blaschke-4.4, sinh-4.5, scaling-4.3, borchers,
        /// wiesbrock, orthogonality, contraction, or matrix-4.6
        name: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print the merged configuration (defaults, file, flags) in canonical
    /// file form and exit
    Config(CommonArgs),
    /// Grid-size sweep emitting one row per size (CSV by default)
    Sweep {
        /// Sweep case: appendix-a or inclusion
        case: String,
        /// Comma-separated grid sizes, e.g. 1024,2048,4096
        #[arg(long)]
        sizes: String,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file (INI-style sections; flags override it)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Grid point count (even)
    #[arg(long = "grid-N", value_name = "N")]
    grid_n: Option<usize>,
    /// Grid half-width
    #[arg(long = "grid-L", value_name = "L")]
    grid_l: Option<f64>,
    /// Seed for every stochastic component
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the full report (timings included) to this path
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Phase of the first (included) pair, e.g. 'blaschke:-1i'
    #[arg(long, value_name = "SPEC")]
    phase1: Option<String>,
    /// Phase of the second (including) pair, e.g. 'id'
    #[arg(long, value_name = "SPEC")]
    phase2: Option<String>,
    /// Emit JSON on stdout
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV on stdout
    #[arg(long)]
    csv: bool,
}

fn build_config(
    mut base: RunConfig,
    common: &CommonArgs,
) -> Result<RunConfig, ModelError> {
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ModelError::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        base.apply_file(&text)?;
    }
    if let Some(n) = common.grid_n {
        base.grid_n = n;
    }
    if let Some(l) = common.grid_l {
        base.grid_l = l;
    }
    if let Some(seed) = common.seed {
        base.seed = seed;
    }
    if let Some(p) = &common.phase1 {
        base.phase1 = p.clone();
    }
    if let Some(p) = &common.phase2 {
        base.phase2 = p.clone();
    }
    if let Some(out) = &common.out {
        base.out = Some(out.clone());
    }
    if common.json {
        base.format = OutputFormat::Json;
    } else if common.csv {
        base.format = OutputFormat::Csv;
    }
    base.validate()?;
    Ok(base)
}

/// Report rendered in the configured format. CSV lists one metric per row.
fn render_report(report: &VerificationReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => {
            let mut out = String::from("metric,value,threshold,direction,state\n");
            for (name, metric) in &report.metrics {
                out.push_str(&format!(
                    "{name},{},{},{},{}\n",
                    metric.value,
                    metric.threshold,
                    match metric.direction {
                        modpair_core::report::Direction::AtMost => "at_most",
                        modpair_core::report::Direction::AtLeast => "at_least",
                    },
                    match metric.state {
                        modpair_core::report::MetricState::Pass => "pass",
                        modpair_core::report::MetricState::Fail => "fail",
                        modpair_core::report::MetricState::Indeterminate => "indeterminate",
                    }
                ));
            }
            out
        }
    }
}

fn render_sweep(table: &SweepTable, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => {
            let mut text =
                serde_json::to_string_pretty(table).expect("sweep tables serialize");
            text.push('\n');
            text
        }
    }
}

fn emit_report(report: &VerificationReport, config: &RunConfig) -> Result<bool, ModelError> {
    print!("{}", render_report(report, config.format));
    if let Some(path) = &config.out {
        std::fs::write(path, report.to_json()).map_err(|e| {
            ModelError::Config(format!("cannot write report to {}: {e}", path.display()))
        })?;
    }
    let failures = report.failures();
    if failures.is_empty() {
        eprintln!("{}: {} checks passed", report.case, report.metrics.len());
    } else {
        eprintln!(
            "{}: {} of {} checks failed:",
            report.case,
            failures.len(),
            report.metrics.len()
        );
        for name in &failures {
            let metric = &report.metrics[*name];
            eprintln!(
                "  {name}: value {} vs threshold {}",
                metric.value, metric.threshold
            );
        }
    }
    Ok(report.passed())
}

fn parse_sizes(text: &str) -> Result<Vec<usize>, ModelError> {
    text.split(',')
        .map(|part| {
            part.trim().parse::<usize>().map_err(|_| {
                ModelError::Config(format!("invalid sweep size '{}'", part.trim()))
            })
        })
        .collect()
}

fn run(cli: Cli) -> Result<bool, ModelError> {
    match cli.command {
        Command::Selfcheck(common) => {
            let config = build_config(RunConfig::default(), &common)?;
            let report = commands::selfcheck(&config)?;
            emit_report(&report, &config)
        }
        Command::AppendixA { s, common } => {
            let mut base = RunConfig::default();
            base.grid_l = 30.0;
            base.grid_n = 8192;
            let config = build_config(base, &common)?;
            let report = commands::appendix_a(&config, s)?;
            emit_report(&report, &config)
        }
        Command::Inclusion(common) => {
            let config = build_config(RunConfig::default(), &common)?;
            let report = commands::inclusion(&config)?;
            emit_report(&report, &config)
        }
        Command::Example { name, common } => {
            let config = build_config(commands::example_base(&name), &common)?;
            let report = commands::example(&config, &name)?;
            emit_report(&report, &config)
        }
        Command::Config(common) => {
            let config = build_config(RunConfig::default(), &common)?;
            print!("{}", config.normalized());
            Ok(true)
        }
        Command::Sweep { case, sizes, common } => {
            let mut base = RunConfig::default();
            base.format = OutputFormat::Csv;
            if case == "appendix-a" {
                base.grid_l = 30.0;
            }
            let config = build_config(base, &common)?;
            let sizes = parse_sizes(&sizes)?;
            let table = commands::sweep(&config, &case, &sizes)?;
            let text = render_sweep(&table, config.format);
            print!("{text}");
            if let Some(path) = &config.out {
                std::fs::write(path, &text).map_err(|e| {
                    ModelError::Config(format!(
                        "cannot write sweep to {}: {e}",
                        path.display()
                    ))
                })?;
            }
            eprintln!("{}: {} rows", table.case, table.rows.len());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                ModelError::Config(_) | ModelError::PhaseParse(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
