use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use degenlab::{init_threads, run, CliError, Command, RawConfig};

/// Numerical experiments for degenerate operators in weighted spaces.
#[derive(Debug, Parser)]
#[command(name = "degenlab", version)]
struct Args {
    /// One of: elliptic-solve, elliptic-fd, parabolic-cauchy, heat-kernel,
    /// bessel-check, norms, sweep-theta, sharpness-hardy, sharpness-parabolic,
    /// sharpness-nonunique, sharpness-adjoint, sharpness-all.
    command: String,
    /// Flat `key=value` file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override applied after the file; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn execute(args: &Args) -> Result<i32, CliError> {
    init_threads()?;
    let command: Command = args.command.parse()?;
    let mut raw = match &args.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    for s in &args.set {
        raw.set(s)?;
    }
    run(command, &raw, &args.out)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("degenlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
