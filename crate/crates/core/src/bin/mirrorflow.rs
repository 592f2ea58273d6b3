use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mirrorflow::acceptance::{AcceptanceOptions, DEFAULT_SEED};
use mirrorflow::config::ExperimentConfig;
use mirrorflow::runner::{self, RunError, RunReport, SuiteOutcome};

#[derive(Parser)]
#[command(name = "mirrorflow", version, about = "Stochastic mirror-descent experiments")]
struct Cli {
    /// Overrides the seed of the config (or of the acceptance suites).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for ensembles (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the ensemble described by a config file.
    Simulate { config: PathBuf },
    /// Run a traffic-assignment config and write the gap series.
    TrafficDemo { config: PathBuf },
    /// Run the acceptance suites (`all` when omitted).
    Acceptance { suite: Option<String> },
}

fn load(path: &Path, cli: &Cli) -> Result<ExperimentConfig, RunError> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn print_report(report: &RunReport) {
    for row in &report.summary {
        match row.se {
            Some(se) => println!("{:<32} {:>14.6e} ± {:.2e}", row.statistic, row.value, se),
            None => println!("{:<32} {:>14.6e}", row.statistic, row.value),
        }
    }
    for f in &report.files {
        eprintln!("wrote {}", f.display());
    }
}

fn print_outcome(idx: usize, o: &SuiteOutcome) {
    let status = match (o.pass(), o.suite.known_deviation) {
        (true, _) => "PASS".to_string(),
        (false, None) => "FAIL".to_string(),
        (false, Some(why)) => format!("FAIL (known deviation: {why})"),
    };
    println!(
        "criterion {idx:>2} {:<20} {status} ({:.1}s)",
        o.suite.name,
        o.elapsed.as_secs_f64()
    );
    if let Some(e) = &o.error {
        println!("    error: {e}");
    }
    for r in &o.rows {
        println!(
            "    {} {} measured {:.6} target {}",
            if r.pass { "ok  " } else { "FAIL" },
            r.check,
            r.measured,
            r.target
        );
    }
}

fn run(cli: &Cli) -> Result<ExitCode, RunError> {
    match &cli.command {
        Command::Simulate { config } => {
            print_report(&runner::run_experiment(&load(config, cli)?)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::TrafficDemo { config } => {
            print_report(&runner::run_traffic_demo(&load(config, cli)?)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Acceptance { suite } => {
            let opts = AcceptanceOptions {
                seed: cli.seed.unwrap_or(DEFAULT_SEED),
            };
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let outcomes = runner::run_acceptance(suite.as_deref(), &opts, &out, print_outcome)?;
            let failing: Vec<&str> = outcomes.iter().filter(|o| !o.pass()).map(|o| o.suite.name).collect();
            if failing.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                println!("failing: {}", failing.join(", "));
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
