//! Flat `key = value` run configuration.
//!
//! A file holds one entry per line; `#` starts a comment. Flag overrides
//! replace file values. `profile = benchmark` fills every key the command
//! needs that the file leaves out; without a profile a missing key is an
//! error naming the key. Running without a file implies the benchmark
//! profile.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Command {
    OpCheck,
    Kernel,
    ExtendCheck,
    GroundState,
    Sweep,
    BarycenterCheck,
    PaperSuite,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::OpCheck,
        Command::Kernel,
        Command::ExtendCheck,
        Command::GroundState,
        Command::Sweep,
        Command::BarycenterCheck,
        Command::PaperSuite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::OpCheck => "op-check",
            Command::Kernel => "kernel",
            Command::ExtendCheck => "extend-check",
            Command::GroundState => "ground-state",
            Command::Sweep => "sweep",
            Command::BarycenterCheck => "barycenter-check",
            Command::PaperSuite => "paper-suite",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Keys the command reads.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            Command::OpCheck => &["dim", "m", "s", "half_width", "op_points", "cores", "datum"],
            Command::Kernel => &[
                "dim", "m", "s", "half_width", "points", "kernel", "alpha", "height", "time", "v1", "margin",
                "r_max", "tail_lo", "tail_hi",
            ],
            Command::ExtendCheck => &[
                "dim", "m", "s", "half_width", "points", "datum", "mesh_points", "mesh_exponent", "mesh_height",
            ],
            Command::GroundState => &[
                "dim", "m", "s", "p", "mu", "half_width", "points", "starts", "seed", "window", "tolerance",
                "max_iterations", "initial_step", "max_step", "min_step", "positivity_tolerance",
            ],
            Command::Sweep | Command::BarycenterCheck => {
                const SWEEP: &[&str] = &[
                    "dim", "m", "s", "p", "potential", "depth", "width", "radius", "region", "region_size",
                    "kappa", "multiplicity", "eps", "spacing", "base_half_width", "max_points", "decay_rate",
                    "delta", "rho", "window", "well_point", "well_points", "tolerance", "max_iterations",
                    "initial_step", "max_step", "min_step", "positivity_tolerance",
                ];
                SWEEP
            }
            Command::PaperSuite => &["criteria", "seed"],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Every accepted key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("profile", "`benchmark` fills unset keys with the benchmark defaults"),
    ("command", "command the file was written for; must match when present"),
    ("out_dir", "artifact directory (default: output root / command)"),
    ("seed", "seed for randomized starts and sampled checks"),
    ("dim", "spatial dimension N"),
    ("m", "mass m > 0"),
    ("s", "order s in (0, 1)"),
    ("p", "exponent of the pure power nonlinearity"),
    ("mu", "constant potential of the autonomous problem"),
    ("half_width", "box half-width L"),
    ("points", "grid points per axis"),
    ("op_points", "grid sizes for the operator equivalence table"),
    ("cores", "singular-integral core treatments: drop, lattice-zeta"),
    ("datum", "test function: gaussian or bump"),
    ("kernel", "bessel-potential, poisson, comparison, jump, levy or density"),
    ("alpha", "Bessel potential order"),
    ("height", "extension height y for the Poisson kernel"),
    ("time", "time t for the relativistic density"),
    ("v1", "potential bound V1 of the comparison kernel"),
    ("margin", "margin delta of the comparison kernel"),
    ("r_max", "largest radius written to the kernel dump"),
    ("tail_lo", "start of the tail-fit window"),
    ("tail_hi", "end of the tail-fit window"),
    ("mesh_points", "extension mesh sizes"),
    ("mesh_exponent", "grading exponent q of the extension mesh"),
    ("mesh_height", "extension height Y, or `auto` for 10/m"),
    ("starts", "number of random starts besides the default one"),
    ("window", "decay-fit window r_lo, r_hi"),
    ("tolerance", "preconditioned residual tolerance"),
    ("max_iterations", "descent iteration cap"),
    ("initial_step", "initial descent step"),
    ("max_step", "largest descent step"),
    ("min_step", "smallest descent step before giving up"),
    ("positivity_tolerance", "negative overshoot zeroed after convergence"),
    ("potential", "gaussian, plateau or constant"),
    ("depth", "well depth V0"),
    ("width", "Gaussian width of the well or shoulder"),
    ("radius", "plateau radius"),
    ("region", "well region Lambda: cube, ball or everywhere"),
    ("region_size", "half-width or radius of Lambda"),
    ("kappa", "penalization constant, or `auto`"),
    ("multiplicity", "use the stronger multiplicity bound on kappa"),
    ("eps", "semiclassical parameters"),
    ("spacing", "grid spacing of the sweep"),
    ("base_half_width", "smallest sweep box half-width"),
    ("max_points", "largest grid size per axis"),
    ("decay_rate", "anticipated decay rate for the box policy"),
    ("delta", "cutoff radius of the test functions"),
    ("rho", "clamp radius of the barycenter map"),
    ("well_point", "well point used for the initial iterate"),
    ("well_points", "well points for the barycenter table, `;`-separated"),
    ("criteria", "acceptance criteria to run"),
];

pub fn is_known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

/// Benchmark value of `key` for `command`.
pub fn benchmark_default(command: Command, key: &str) -> Option<&'static str> {
    use Command::*;
    let v = match (command, key) {
        (_, "seed") => "1",
        (PaperSuite, "criteria") => "1,2,3,4,5,6,7,8,9,10",
        (_, "dim") => "1",
        (_, "m") => "1",
        (_, "s") => "0.3",
        (_, "p") => "3",
        (_, "mu") => "-0.5",
        (Kernel, "half_width") => "64",
        (_, "half_width") => "20",
        (Kernel, "points") => "4096",
        (GroundState, "points") => "16384",
        (_, "points") => "1024",
        (_, "op_points") => "1024, 2048",
        (_, "cores") => "lattice-zeta, drop",
        (_, "datum") => "gaussian",
        (_, "kernel") => "comparison",
        (_, "alpha") => "0.6",
        (_, "height") => "1",
        (_, "time") => "1",
        (_, "v1") => "0.5",
        (_, "margin") => "0.2",
        (_, "r_max") => "12",
        (_, "tail_lo") => "5",
        (_, "tail_hi") => "12",
        (_, "mesh_points") => "128, 256",
        (_, "mesh_exponent") => "4",
        (_, "mesh_height") => "auto",
        (_, "starts") => "10",
        (_, "window") => "4, 10",
        (_, "tolerance") => "1e-8",
        (_, "max_iterations") => "5000",
        (_, "initial_step") => "1",
        (_, "max_step") => "1",
        (_, "min_step") => "1e-10",
        (Sweep | BarycenterCheck, "positivity_tolerance") => "1e-9",
        (_, "positivity_tolerance") => "1e-12",
        (BarycenterCheck, "potential") => "plateau",
        (_, "potential") => "gaussian",
        (_, "depth") => "0.5",
        (_, "width") => "1",
        (_, "radius") => "0.5",
        (_, "region") => "cube",
        (BarycenterCheck, "region_size") => "2.5",
        (_, "region_size") => "2",
        (_, "kappa") => "auto",
        (_, "multiplicity") => "false",
        (_, "eps") => "0.5, 0.35, 0.25, 0.18",
        (_, "spacing") => "0.0390625",
        (_, "base_half_width") => "20",
        (_, "max_points") => "4096",
        (_, "decay_rate") => "1",
        (_, "delta") => "1",
        (_, "rho") => "2",
        (_, "well_point") => "0",
        (_, "well_points") => "-0.5; -0.25; 0; 0.25; 0.5",
        _ => return None,
    };
    Some(v)
}

/// One `key = value` entry with the line it came from (0 for flags).
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parses config text. Blank lines and `#` comments are skipped.
pub fn parse_text(text: &str) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(CliError::config(format!("line {line}: expected `key = value`, found `{body}`")));
        };
        let (key, value) = (k.trim(), v.trim());
        if key.is_empty() {
            return Err(CliError::config(format!("line {line}: empty key")));
        }
        if !is_known(key) {
            return Err(CliError::config(format!("line {line}: unknown key `{key}`")));
        }
        if let Some(prev) = out.iter().find(|e| e.key == key) {
            return Err(CliError::config(format!(
                "duplicate key `{key}` on lines {} and {line}",
                prev.line
            )));
        }
        out.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line,
        });
    }
    Ok(out)
}

/// Turns `--key value` pairs into entries. Keys may use `-` for `_`.
pub fn parse_overrides(args: &[String]) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let Some(name) = flag.strip_prefix("--") else {
            return Err(CliError::config(format!("expected `--key value`, found `{flag}`")));
        };
        let (key, value) = match name.split_once('=') {
            Some((k, v)) => (k.replace('-', "_"), v.to_string()),
            None => {
                let key = name.replace('-', "_");
                let Some(v) = it.next() else {
                    return Err(CliError::config(format!("flag `--{name}` has no value")));
                };
                (key, v.clone())
            }
        };
        if !is_known(&key) {
            return Err(CliError::config(format!("unknown key `{key}`")));
        }
        out.push(Entry { key, value, line: 0 });
    }
    Ok(out)
}

/// Resolved configuration of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    values: BTreeMap<String, String>,
}

impl RunConfig {
    /// Merges file entries, overrides and profile defaults, then checks that
    /// every key the command reads is set.
    pub fn resolve(command: Command, file: Option<Vec<Entry>>, overrides: Vec<Entry>) -> Result<Self> {
        let had_file = file.is_some();
        let mut values: BTreeMap<String, String> = BTreeMap::new();
        for e in file.into_iter().flatten().chain(overrides) {
            values.insert(e.key, e.value);
        }
        if let Some(c) = values.remove("command") {
            if c != command.name() {
                return Err(CliError::config(format!(
                    "config was written for `{c}`, not `{}`",
                    command.name()
                )));
            }
        }
        let profile = match values.remove("profile").as_deref() {
            Some("benchmark") => true,
            Some("none") => false,
            Some(other) => return Err(CliError::config(format!("unknown profile `{other}`"))),
            None => !had_file,
        };
        for key in command.keys() {
            if values.contains_key(*key) {
                continue;
            }
            match benchmark_default(command, key) {
                Some(v) if profile => {
                    values.insert(key.to_string(), v.to_string());
                }
                _ => return Err(CliError::config(format!("missing config key `{key}`"))),
            }
        }
        Ok(Self { command, values })
    }

    /// Reads `path` (if any) and resolves it.
    pub fn load(command: Command, path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                Some(parse_text(&text).map_err(|e| match e {
                    CliError::Config(d) => CliError::Config(format!("{}: {d}", p.display())),
                    other => other,
                })?)
            }
            None => None,
        };
        Self::resolve(command, file, parse_overrides(overrides)?)
    }

    pub fn raw(&self, key: &str) -> Result<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| CliError::config(format!("missing config key `{key}`")))
    }

    pub fn get_opt(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, text: &str, what: &str) -> Result<T> {
        text.trim()
            .parse()
            .map_err(|_| CliError::config(format!("key `{key}`: `{text}` is not {what}")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let v: f64 = self.parse(key, self.raw(key)?, "a number")?;
        if !v.is_finite() {
            return Err(CliError::config(format!("key `{key}`: value must be finite")));
        }
        Ok(v)
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.parse(key, self.raw(key)?, "a nonnegative integer")
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        self.parse(key, self.raw(key)?, "a nonnegative integer")
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.raw(key)? {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            other => Err(CliError::config(format!("key `{key}`: `{other}` is not a boolean"))),
        }
    }

    pub fn list_f64(&self, key: &str) -> Result<Vec<f64>> {
        split_list(self.raw(key)?, ',')
            .map(|t| self.parse::<f64>(key, t, "a number"))
            .collect()
    }

    pub fn list_usize(&self, key: &str) -> Result<Vec<usize>> {
        split_list(self.raw(key)?, ',')
            .map(|t| self.parse::<usize>(key, t, "a nonnegative integer"))
            .collect()
    }

    pub fn list_str(&self, key: &str) -> Result<Vec<String>> {
        Ok(split_list(self.raw(key)?, ',').map(str::to_string).collect())
    }

    /// `;`-separated points with `,`-separated coordinates.
    pub fn points(&self, key: &str, dim: usize) -> Result<Vec<Vec<f64>>> {
        split_list(self.raw(key)?, ';')
            .map(|p| {
                let c: Vec<f64> = split_list(p, ',')
                    .map(|t| self.parse::<f64>(key, t, "a number"))
                    .collect::<Result<_>>()?;
                if c.len() != dim {
                    return Err(CliError::config(format!(
                        "key `{key}`: point `{p}` has {} coordinates, dim is {dim}",
                        c.len()
                    )));
                }
                Ok(c)
            })
            .collect()
    }

    /// Output directory: `out_dir`, else `root/<command>`.
    pub fn out_dir(&self, root: &Path) -> PathBuf {
        match self.get_opt("out_dir") {
            Some(d) => PathBuf::from(d),
            None => root.join(self.command.name()),
        }
    }

    /// Text that reproduces this configuration: the command, every resolved
    /// key in sorted order and no profile.
    pub fn to_text(&self) -> String {
        let mut out = format!("command = {}\nprofile = none\n", self.command.name());
        for (k, v) in &self.values {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}

fn split_list(text: &str, sep: char) -> impl Iterator<Item = &str> {
    text.split(sep).map(str::trim).filter(|t| !t.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_comments_and_values() {
        let e = parse_text("# header\nm = 2 # mass\n\n  s=0.4\n").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!((e[0].key.as_str(), e[0].value.as_str(), e[0].line), ("m", "2", 2));
        assert_eq!(e[1].value, "0.4");
    }

    #[test]
    fn rejects_malformed_lines() {
        let msg = |t: &str| parse_text(t).unwrap_err().to_string();
        assert!(msg("m 2").contains("line 1"));
        assert!(msg("mass = 2").contains("unknown key `mass`"));
        assert!(msg("m = 1\nm = 2").contains("duplicate key `m` on lines 1 and 2"));
    }

    #[test]
    fn missing_key_is_named() {
        let file = parse_text("dim = 1\nm = 1\n").unwrap();
        let err = RunConfig::resolve(Command::OpCheck, Some(file), vec![]).unwrap_err();
        assert!(err.to_string().contains("missing config key `s`"), "{err}");
    }

    #[test]
    fn profile_and_overrides() {
        let file = parse_text("profile = benchmark\nm = 2\n").unwrap();
        let flags = parse_overrides(&strings(&["--m", "3", "--half-width=30"])).unwrap();
        let c = RunConfig::resolve(Command::OpCheck, Some(file), flags).unwrap();
        assert_eq!(c.f64("m").unwrap(), 3.0);
        assert_eq!(c.f64("half_width").unwrap(), 30.0);
        assert_eq!(c.list_usize("op_points").unwrap(), vec![1024, 2048]);
        let none = RunConfig::resolve(Command::GroundState, None, vec![]).unwrap();
        assert_eq!(none.usize("points").unwrap(), 16384);
    }

    #[test]
    fn typed_errors_name_the_key() {
        let flags = parse_overrides(&strings(&["--m", "heavy"])).unwrap();
        let c = RunConfig::resolve(Command::OpCheck, None, flags).unwrap();
        assert!(c.f64("m").unwrap_err().to_string().contains("key `m`"));
        assert!(parse_overrides(&strings(&["--m"])).is_err());
        assert!(parse_overrides(&strings(&["m", "1"])).is_err());
        assert!(parse_overrides(&strings(&["--bogus", "1"])).is_err());
    }

    #[test]
    fn round_trips_through_text() {
        let c = RunConfig::resolve(Command::Sweep, None, vec![]).unwrap();
        let again = RunConfig::resolve(Command::Sweep, Some(parse_text(&c.to_text()).unwrap()), vec![]).unwrap();
        assert_eq!(c.values, again.values);
        let wrong = RunConfig::resolve(Command::Kernel, Some(parse_text(&c.to_text()).unwrap()), vec![]);
        assert!(wrong.unwrap_err().to_string().contains("written for `sweep`"));
    }

    #[test]
    fn points_lists() {
        let flags = parse_overrides(&strings(&["--well-points", "0,1; 2,3"])).unwrap();
        let c = RunConfig::resolve(Command::BarycenterCheck, None, flags).unwrap();
        assert_eq!(c.points("well_points", 2).unwrap(), vec![vec![0.0, 1.0], vec![2.0, 3.0]]);
        assert!(c.points("well_points", 1).is_err());
    }
}
