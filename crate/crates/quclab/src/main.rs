use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use quclab::{exit, list_experiments, run_experiment, trace_experiment, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(name = "quclab", version, about = "Runs the quantum OT experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and print its JSON report.
    Run(RunArgs),
    /// List the experiment catalog.
    List,
    /// Print the JSON-lines trace of one sampled run.
    Trace(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    experiment: String,
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Exhaustive enumeration only.
    #[arg(long)]
    exact: bool,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-trial records as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        cfg.experiment = Some(self.experiment.clone());
        cfg.seed = self.seed.or(cfg.seed);
        cfg.trials = self.trials.or(cfg.trials);
        if self.exact {
            cfg.mode = Some(quclab::RunMode::Exact);
        }
        cfg.out = self.out.clone().or(cfg.out);
        cfg.csv = self.csv.clone().or(cfg.csv);
        Ok(cfg)
    }
}

fn write(path: &std::path::Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|e| HarnessError::Output {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn run(args: &RunArgs) -> Result<i32, HarnessError> {
    let cfg = args.config()?;
    let resolved = cfg.resolve()?;
    let start = Instant::now();
    let report = run_experiment(&resolved)?;
    eprintln!("{}: {:.2}s", report.experiment, start.elapsed().as_secs_f64());
    let json = report.to_json();
    println!("{json}");
    if let Some(path) = &cfg.out {
        write(path, &json)?;
    }
    if let (Some(path), Some(records)) = (&cfg.csv, &report.records) {
        records.write_csv(path).map_err(|e| HarnessError::Output {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    for c in report.failed_checks() {
        eprintln!("FAILED {}: observed {} against {:?}", c.name, c.observed, c.bound);
    }
    Ok(if report.passed { exit::PASS } else { exit::THRESHOLD_FAILED })
}

fn trace(args: &RunArgs) -> Result<i32, HarnessError> {
    let resolved = args.config()?.resolve()?;
    print!("{}", trace_experiment(&resolved)?);
    Ok(exit::PASS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::List => {
            for (name, summary) in list_experiments() {
                println!("{name:<26}{summary}");
            }
            Ok(exit::PASS)
        }
        Command::Run(args) => run(args),
        Command::Trace(args) => trace(args),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::CONFIG_ERROR as u8)
        }
    }
}
