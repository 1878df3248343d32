use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use spinmz_cli::config::parse_assignment;
use spinmz_cli::diff::{compare, load_table};
use spinmz_cli::{execute, write_outputs, Experiment, ExperimentConfig};

/// Adiabatic Mach-Zehnder interferometer experiments on a transverse-field Ising chain.
#[derive(Parser)]
#[command(name = "spinmz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// FM populations and NOON fidelity along one sweep scheme
    Populations(RunArgs),
    /// Final NOON fidelity against the total sweep time 2τ
    FidelityScan(RunArgs),
    /// FM population traces of all three sweep schemes
    SchemeCompare(RunArgs),
    /// P1 against the accumulated phase
    Fringe(RunArgs),
    /// Phase sensitivity at the best fringe point
    Sensitivity(RunArgs),
    /// BS1 observables against the longitudinal bias
    BiasScan(RunArgs),
    /// Lowest levels along the BS1 sweep
    Spectrum(RunArgs),
    /// Compare two result tables within a tolerance
    Diff(DiffArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat JSON config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Chain lengths, comma-separated
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    tau: Option<f64>,
    /// Longitudinal bias δ/J0
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    #[arg(long, env = "SPINMZ_THREADS")]
    threads: Option<usize>,
    /// single-J, single-B or two-step
    #[arg(long)]
    scheme: Option<String>,
    /// Use an exact NOON state instead of BS1
    #[arg(long)]
    ideal: bool,
    /// Any other config key
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct DiffArgs {
    left: PathBuf,
    right: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
}

impl RunArgs {
    fn overrides(&self) -> Result<Map<String, Value>> {
        let mut map = Map::new();
        for s in &self.set {
            let (k, v) = parse_assignment(s)?;
            map.insert(k, v);
        }
        let mut put = |key: &str, value: Option<Value>| {
            if let Some(v) = value {
                map.insert(key.to_string(), v);
            }
        };
        put("n", self.n.as_ref().map(|v| json!(v)));
        put("tau", self.tau.map(|v| json!(v)));
        put("delta", self.delta.map(|v| json!(v)));
        put("output_path", self.out.as_ref().map(|v| json!(v)));
        put("format", self.format.as_ref().map(|v| json!(v)));
        put("threads", self.threads.map(|v| json!(v)));
        put("scheme", self.scheme.as_ref().map(|v| json!(v)));
        put("ideal", self.ideal.then_some(json!(true)));
        Ok(map)
    }
}

fn run(experiment: Experiment, args: &RunArgs) -> Result<()> {
    let cfg = ExperimentConfig::resolve(experiment, args.config.as_deref(), args.overrides()?)?;
    let table = execute(&cfg)?;
    for path in write_outputs(&table, &cfg)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn diff(args: &DiffArgs) -> Result<bool> {
    let report = compare(
        &load_table(&args.left)?,
        &load_table(&args.right)?,
        args.rtol,
        args.atol,
    )?;
    for m in report.mismatches.iter().take(20) {
        println!("row {} {}: {:e} vs {:e}", m.row, m.column, m.left, m.right);
    }
    println!(
        "{} values, {} mismatches, max abs {:e}, max rel {:e}",
        report.compared,
        report.mismatches.len(),
        report.max_abs,
        report.max_rel
    );
    Ok(report.is_match())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Populations(a) => run(Experiment::Populations, a).map(|_| true),
        Command::FidelityScan(a) => run(Experiment::FidelityScan, a).map(|_| true),
        Command::SchemeCompare(a) => run(Experiment::SchemeCompare, a).map(|_| true),
        Command::Fringe(a) => run(Experiment::Fringe, a).map(|_| true),
        Command::Sensitivity(a) => run(Experiment::Sensitivity, a).map(|_| true),
        Command::BiasScan(a) => run(Experiment::BiasScan, a).map(|_| true),
        Command::Spectrum(a) => run(Experiment::Spectrum, a).map(|_| true),
        Command::Diff(a) => diff(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
