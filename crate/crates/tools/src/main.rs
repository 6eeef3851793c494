use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qsunif_tools::config::parse_levels;
use qsunif_tools::{run, CliError, Command, RunConfig};

/// Discrete quasisymmetric uniformization experiments.
#[derive(Debug, Parser)]
#[command(name = "qsunif", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration; defaults apply when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Approximation levels `a..b`, inclusive.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
}

fn config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(l) = &cli.levels {
        cfg.levels = parse_levels(l)?;
    }
    if let Some(q) = cli.q {
        cfg.q = q;
    }
    if let Some(l) = cli.lambda {
        cfg.lambda = l;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match config(&cli).and_then(|c| run(c, cli.command)) {
        Ok(r) => {
            println!("{}", r.config.out.join(format!("{}.json", cli.command.name())).display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
