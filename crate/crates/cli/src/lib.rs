//! Command-line harness: flat configuration in, `report.json` and CSV curves out.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::path::Path;

use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

pub use commands::{Command, Job, Outcome};
pub use config::{Params, RawConfig};
pub use error::CliError;
pub use report::{emit, Report, Table};

use report::{Provenance, SCHEMA_VERSION};

/// Unix seconds from `SOURCE_DATE_EPOCH`, else zero.
fn default_epoch() -> Result<u64, CliError> {
    match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("SOURCE_DATE_EPOCH: expected unix seconds, got `{v}`"))),
        Err(_) => Ok(0),
    }
}

fn rfc3339(secs: u64) -> Result<String, CliError> {
    let t = i64::try_from(secs)
        .ok()
        .and_then(|s| OffsetDateTime::from_unix_timestamp(s).ok())
        .ok_or_else(|| CliError::Config(format!("timestamp: {secs} is out of range")))?;
    t.format(&Rfc3339).map_err(|e| CliError::Config(format!("timestamp: {e}")))
}

/// Validates `raw` for `command`, runs it and assembles the report.
pub fn build_report(command: Command, raw: &RawConfig) -> Result<(Report, Vec<Table>), CliError> {
    let epoch = default_epoch()?;
    let mut p = Params::new(raw);
    let secs = p.u64("timestamp", epoch);
    let job = Job::parse(command, &mut p);
    p.finish()?;
    let timestamp = rfc3339(secs)?;
    let outcome = job.execute()?;
    let pass = outcome.verdicts.iter().all(|v| v.pass);
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: command.as_str().into(),
        config: raw.entries.clone(),
        metrics: outcome.metrics,
        verdicts: outcome.verdicts,
        pass,
        provenance: Provenance { version: env!("CARGO_PKG_VERSION").into(), timestamp },
        files: Vec::new(),
    };
    Ok((report, outcome.tables))
}

/// Runs `command` and writes its outputs into `out_dir`. Returns 0 when every
/// verdict passes and 1 otherwise.
pub fn run(command: Command, raw: &RawConfig, out_dir: &Path) -> Result<i32, CliError> {
    let (mut report, tables) = build_report(command, raw)?;
    emit(&mut report, &tables, out_dir)?;
    Ok(if report.pass { 0 } else { 1 })
}

/// Sizes the global pool from `DEGENLAB_THREADS` when set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("DEGENLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("DEGENLAB_THREADS: expected a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("DEGENLAB_THREADS: {e}")))
}
