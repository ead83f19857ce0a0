use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use finite_proxy::harness::{emit_report, parse_config, run_pipeline, Stage};
use finite_proxy::Error;

/// Reduce, reconstruct, simulate and compare, then write the report.
#[derive(Debug, Parser)]
#[command(name = "finite-proxy", version)]
struct Cli {
    /// Stages to run; order does not matter.
    #[arg(value_enum)]
    stages: Vec<Stage>,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (beats FINITE_PROXY_OUT and `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the sampled property checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Accept a pinned cutoff above the contraction margin.
    #[arg(long)]
    force: bool,
}

fn run(cli: Cli) -> Result<bool, Error> {
    // validation waits until the command-line overrides are in
    let text = std::fs::read_to_string(&cli.config).map_err(|source| Error::Io { path: cli.config.clone(), source })?;
    let mut config = parse_config(&text)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.force |= cli.force;
    config.validate()?;

    let dir = cli
        .out
        .or_else(|| std::env::var_os("FINITE_PROXY_OUT").map(PathBuf::from))
        .unwrap_or_else(|| config.output.dir.clone());
    let report = run_pipeline(&config, &cli.stages)?;
    let written = emit_report(&report, &dir, &config.output.formats)?;

    for table in &report.tables {
        let worst = table.worst().map_or_else(|| "no rows".to_string(), |w| format!("worst {w:.3e}"));
        println!(
            "{:<4} {:<32} {worst} (tolerance {:.1e})",
            if table.passed { "PASS" } else { "FAIL" },
            table.name,
            table.tolerance
        );
    }
    println!("wrote {} files to {}", written.len(), dir.display());
    Ok(report.passed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
