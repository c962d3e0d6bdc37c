use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use toa_core::Execution;
use toa_lab::{run, write_bundles, Experiment, Format, Overrides, RunConfig, RunError};

/// Regenerate time-of-arrival figure data.
#[derive(Debug, Parser)]
#[command(name = "toa-lab", version)]
struct Cli {
    experiment: Experiment,

    /// JSON config; missing keys take the shipped defaults.
    #[arg(long, value_name = "FILE", conflicts_with = "paper_defaults")]
    config: Option<PathBuf>,

    /// Use the shipped default config (configs/paper-defaults.json).
    #[arg(long)]
    paper_defaults: bool,

    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Sensitivities: the curve list for eeqt, the grid for sweep, the
    /// single detector value for compare and lindblad.
    #[arg(long, value_name = "K", num_args = 1..)]
    kappa: Vec<f64>,

    #[arg(long, value_name = "DT")]
    dt: Option<f64>,

    #[arg(long, value_name = "T")]
    horizon: Option<f64>,

    /// Validate only and print diagnostics.
    #[arg(long)]
    check: bool,

    /// Disable the rayon thread pool.
    #[arg(long)]
    sequential: bool,
}

const VALIDATION: u8 = 1;
const RUNTIME: u8 = 2;

fn load(cli: &Cli) -> Result<RunConfig, String> {
    match &cli.config {
        None => Ok(RunConfig::paper_defaults()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            RunConfig::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(VALIDATION);
        }
    };
    let mut config = match load(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("config: {msg}");
            return ExitCode::from(VALIDATION);
        }
    };
    let overrides = Overrides {
        kappas: cli.kappa.clone(),
        dt: cli.dt,
        horizon: cli.horizon,
        output: cli.out.clone(),
        format: cli.format,
    };
    let mut diagnostics = config.apply(cli.experiment, &overrides);
    diagnostics.extend(config.validate(cli.experiment));
    if !diagnostics.is_empty() {
        for d in &diagnostics {
            eprintln!("{d}");
        }
        return ExitCode::from(VALIDATION);
    }
    if cli.check {
        println!("{}: configuration is valid", cli.experiment);
        return ExitCode::SUCCESS;
    }

    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    let result = run(&config, cli.experiment, exec)
        .and_then(|bundles| write_bundles(&bundles, &config.output, config.format));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(RunError::Invalid(ds)) => {
            for d in &ds {
                eprintln!("{d}");
            }
            ExitCode::from(VALIDATION)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(RUNTIME)
        }
    }
}
