use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use relfrac::config::Command;

/// Experiments for the massive fractional operator (-Delta + m^2)^s.
///
/// Settings come from the benchmark profile, then `--config FILE`, then
/// trailing `--key value` overrides. Artifacts go to `out_dir`, or to
/// `$RELFRAC_OUTPUT_ROOT/<command>` (default `./relfrac-out/<command>`).
#[derive(Parser)]
#[command(name = "relfrac", version)]
struct Cli {
    command: Command,

    /// Configuration file (`key = value` lines, `#` comments).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Overrides as `--key value` or `--key=value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let root = std::env::var_os("RELFRAC_OUTPUT_ROOT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("relfrac-out"));
    let code = relfrac::run(cli.command, cli.config.as_deref(), &cli.overrides, &root);
    ExitCode::from(code as u8)
}
