mod cli;
mod commands;
mod config;
mod inputs;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Result};
use clap::Parser;

fn threads() -> Result<()> {
    let Ok(v) = std::env::var("ROOFKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("ROOFKIT_THREADS must be a positive integer, got '{v}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

fn run(args: cli::Cli) -> Result<bool> {
    threads()?;
    let cfg = args.into_config()?.resolve();
    let start = Instant::now();
    let outcome = commands::execute(&cfg)?;
    output::emit(&cfg, &outcome, start.elapsed().as_secs_f64())?;
    Ok(outcome.flagged)
}

fn main() -> ExitCode {
    let args = match cli::Cli::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
