//! Artifact directory of one run. Every write goes through [`Output`], so
//! writes are serialized and each file is listed in the manifest.

use std::path::{Path, PathBuf};

use relfrac_core::grid::GridField;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::{format, plot};

pub const MANIFEST: &str = "manifest.cfg";

pub struct Output {
    dir: PathBuf,
    artifacts: Vec<String>,
}

/// A CSV cell. Floats use shortest round-trip formatting, which keeps
/// reruns byte-identical.
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(v) => format::number(*v),
            Cell::I(v) => v.to_string(),
            Cell::S(v) => v.clone(),
        }
    }
}

/// Builds a row from heterogeneous values.
#[macro_export]
macro_rules! row {
    ($($v:expr),* $(,)?) => { vec![$($crate::output::Cell::from($v)),*] };
}

impl Output {
    /// The directory is created with the first artifact, so a run that
    /// fails validation leaves nothing behind.
    pub fn new(dir: PathBuf) -> Self {
        Self {
            dir,
            artifacts: Vec::new(),
        }
    }

    fn ensure_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn artifacts(&self) -> &[String] {
        &self.artifacts
    }

    fn record(&mut self, name: &str) {
        if !self.artifacts.iter().any(|a| a == name) {
            self.artifacts.push(name.to_string());
        }
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
        self.ensure_dir()?;
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| csv_io(&path, e))?;
        w.write_record(header).map_err(|e| csv_io(&path, e))?;
        for r in rows {
            w.write_record(r.iter().map(Cell::render)).map_err(|e| csv_io(&path, e))?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        self.record(name);
        Ok(())
    }

    pub fn field(&mut self, name: &str, u: &GridField) -> Result<()> {
        self.ensure_dir()?;
        format::write_field(&self.path(name), u)?;
        self.record(name);
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        self.ensure_dir()?;
        let path = self.path(name);
        std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        self.record(name);
        Ok(())
    }

    /// Writes an SVG figure; a failure is logged and the run goes on.
    pub fn plot(&mut self, name: &str, fig: &plot::Figure) {
        if let Err(e) = self.ensure_dir() {
            log::warn!("plot {name} skipped: {e}");
            return;
        }
        match plot::render(&self.path(name), fig) {
            Ok(()) => self.record(name),
            Err(e) => log::warn!("plot {name} skipped: {e}"),
        }
    }

    /// Writes the manifest: the resolved configuration, loadable with
    /// `--config`, followed by the artifact list as comments. Nothing is
    /// written when the run produced no artifacts.
    pub fn finish(mut self, cfg: &RunConfig) -> Result<Option<PathBuf>> {
        if self.artifacts.is_empty() {
            return Ok(None);
        }
        let mut text = format!("# relfrac {} run\n", cfg.command);
        text.push_str(&cfg.to_text());
        text.push_str("# artifacts:\n");
        self.artifacts.sort();
        for a in &self.artifacts {
            text.push_str(&format!("#   {a}\n"));
        }
        let path = self.path(MANIFEST);
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(Some(path))
    }
}

fn csv_io(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::io(path, source),
        other => CliError::Failed(format!("{}: {other:?}", path.display())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;

    #[test]
    fn manifest_reloads_to_the_same_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::load(Command::OpCheck, None, &["--s".into(), "0.4".into()]).unwrap();
        let mut out = Output::new(dir.path().join("run"));
        out.csv("t.csv", &["a", "b"], &[row![1.5, 2usize], row![f64::MIN_POSITIVE, "x"]]).unwrap();
        let manifest = out.finish(&cfg).unwrap().unwrap();
        let text = std::fs::read_to_string(&manifest).unwrap();
        assert!(text.contains("#   t.csv"));
        let again = RunConfig::load(Command::OpCheck, Some(&manifest), &[]).unwrap();
        assert_eq!(again, cfg);
        let body = std::fs::read_to_string(dir.path().join("run/t.csv")).unwrap();
        assert_eq!(body, "a,b\n1.5,2\n2.2250738585072014e-308,x\n");
        let empty = Output::new(dir.path().join("none"));
        assert!(empty.finish(&cfg).unwrap().is_none());
        assert!(!dir.path().join("none").exists());
    }
}
