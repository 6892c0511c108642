//! `matprod` — spectral experiments on products of independent random
//! matrices.
//!
//! Exit codes: 0 on success, 1 on a hard property violation (the
//! deterministic product singular-value inequality) or a runtime failure,
//! 2 on a configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use matprod_core::harness::{self, ExperimentConfig, HarnessError, Metric, ReportFormat};

#[derive(Parser)]
#[command(
    name = "matprod",
    version,
    about = "Spectra of products of independent random matrices: simulation, limit laws, and comparisons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample ensembles and write raw spectra (eigenvalues, radial ECDFs,
    /// singular values at each configured shift)
    Simulate(RunArgs),
    /// Evaluate the limiting law and the limit-system solver on grids
    Limit(RunArgs),
    /// Run the configured metrics (convergence, moments, potential,
    /// properties) and emit one combined report
    Compare(RunArgs),
    /// Run the property suite; exits 1 on any violation of the
    /// deterministic product inequality
    Proptest(RunArgs),
    /// Convergence metrics swept across the configured n values
    Sweep(RunArgs),
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::Simulate(a)
            | Command::Limit(a)
            | Command::Compare(a)
            | Command::Proptest(a)
            | Command::Sweep(a) => a,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON experiment config
    #[arg(long)]
    config: PathBuf,
    /// Override the ensemble seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory from the config
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (the MATPROD_THREADS environment variable, when set,
    /// takes precedence)
    #[arg(long)]
    threads: Option<usize>,
    /// Report format for report-emitting subcommands
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("cannot read config {}", args.config.display()))?;
    let mut config: ExperimentConfig = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse config {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        config.ensemble.seed = seed;
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn init_threads(args: &RunArgs) {
    let from_env = std::env::var("MATPROD_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok());
    if let Some(k) = from_env.or(args.threads) {
        // ignore the error if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = cli.command.args();
    let config = match load_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e:#}");
            return ExitCode::from(2);
        }
    };
    init_threads(args);
    let format: ReportFormat = args.format.into();
    match dispatch(&cli.command, &config, format) {
        Ok(code) => code,
        Err(e) => {
            if let Some(HarnessError::Config(msg)) = e.downcast_ref::<HarnessError>() {
                eprintln!("configuration error: {msg}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        }
    }
}

fn dispatch(command: &Command, config: &ExperimentConfig, format: ReportFormat) -> Result<ExitCode> {
    match command {
        Command::Simulate(_) => {
            let files = harness::run_simulate(config)?;
            println!("wrote {} spectrum files to {}", files.len(), config.output_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Limit(_) => {
            let files = harness::run_limit(config)?;
            for f in &files {
                println!("{}", f.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare(_) => {
            let report = harness::run_compare(config)?;
            let path = harness::emit_report(&report, format, &config.output_dir)?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Proptest(_) => {
            let report = harness::run_property_suite(config)?;
            let path = harness::emit_report(&report, format, &config.output_dir)?;
            println!("{}", path.display());
            let violations = report
                .rows
                .iter()
                .find(|r| r.metric == "prod1_violations")
                .map(|r| r.value)
                .unwrap_or(0.0);
            if violations > 0.0 {
                eprintln!("hard violation: product singular-value inequality failed {violations} times");
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(_) => {
            let mut sweep_config = config.clone();
            sweep_config.metrics = vec![Metric::RadialKs, Metric::Grid2dKs];
            let report = harness::run_convergence(&sweep_config)?;
            let path = harness::emit_report(&report, format, &sweep_config.output_dir)?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
