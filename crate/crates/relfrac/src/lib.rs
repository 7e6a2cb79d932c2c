//! Batch driver for the relfrac numerics: configuration files, experiment
//! commands, field files, CSV and SVG artifacts, and the acceptance suite.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::Path;

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod output;
pub mod plot;
pub mod problem;
pub mod suite;

use config::{Command, RunConfig};
use error::EXIT_OK;
use output::Output;

/// Runs one command end to end and returns the process exit code. The
/// manifest is written even when the command fails after producing
/// artifacts, so a failed run can be replayed with `--config`.
pub fn run(command: Command, config: Option<&Path>, overrides: &[String], root: &Path) -> i32 {
    let cfg = match RunConfig::load(command, config, overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let mut out = Output::new(cfg.out_dir(root));
    let result = commands::dispatch(&cfg, &mut out);
    match out.finish(&cfg) {
        Ok(Some(p)) => log::info!("manifest written to {}", p.display()),
        Ok(None) => {}
        Err(e) => eprintln!("warning: manifest not written: {e}"),
    }
    match result {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
