//! Report envelope and where it goes.

use std::fs;
use std::io::Write;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::commands::Outcome;
use crate::config::{Format, RunConfig};

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    units: &'static str,
    config: &'a RunConfig,
    result: &'a Value,
    /// Kept last so that reports differ only on their final line.
    wall_time_seconds: f64,
}

pub fn report_json(cfg: &RunConfig, outcome: &Outcome, wall_time: f64) -> Result<String> {
    let env = Envelope {
        tool: "roofkit",
        version: env!("CARGO_PKG_VERSION"),
        command: cfg.command.stem(),
        seed: cfg.seed,
        units: "nats",
        config: cfg,
        result: &outcome.result,
        wall_time_seconds: wall_time,
    };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(s)
}

/// Without `--out` the report goes to stdout and the summary to stderr;
/// with it, files are written and the summary goes to stdout.
pub fn emit(cfg: &RunConfig, outcome: &Outcome, wall_time: f64) -> Result<()> {
    let json = report_json(cfg, outcome, wall_time)?;
    let want_json = cfg.format != Format::Csv || outcome.csv.is_none();
    let want_csv = cfg.format != Format::Json;
    match &cfg.out {
        None => {
            let mut out = std::io::stdout().lock();
            if cfg.format == Format::Csv && outcome.csv.is_some() {
                out.write_all(outcome.csv.as_deref().unwrap_or_default().as_bytes())?;
            } else {
                out.write_all(json.as_bytes())?;
            }
            out.flush()?;
            let mut err = std::io::stderr().lock();
            for line in &outcome.summary {
                writeln!(err, "{line}")?;
            }
        }
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let stem = cfg.command.stem();
            let mut written = Vec::new();
            if want_json {
                let p = dir.join(format!("{stem}.json"));
                fs::write(&p, &json).with_context(|| format!("cannot write {}", p.display()))?;
                written.push(p);
            }
            if let (true, Some(csv)) = (want_csv, &outcome.csv) {
                let p = dir.join(format!("{stem}.csv"));
                fs::write(&p, csv).with_context(|| format!("cannot write {}", p.display()))?;
                written.push(p);
            }
            let mut out = std::io::stdout().lock();
            for line in &outcome.summary {
                writeln!(out, "{line}")?;
            }
            for p in written {
                writeln!(out, "wrote {}", p.display())?;
            }
        }
    }
    Ok(())
}
