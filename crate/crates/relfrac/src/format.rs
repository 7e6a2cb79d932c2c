//! Grid field files.
//!
//! Binary (`.rfgf`), all little-endian:
//!
//! | bytes | content                     |
//! |-------|-----------------------------|
//! | 4     | magic `RFGF`                |
//! | 4     | version, u32 = 1            |
//! | 4     | dim, u32                    |
//! | 8     | points per axis, u64        |
//! | 8     | half-width, f64             |
//! | 8·len | values, f64, last axis fastest |
//!
//! CSV: `# key = value` header lines for dim, half_width and points, then a
//! column row `x0[,x1[,x2]],value` and one row per grid point. Numbers use
//! Rust's shortest round-trip formatting, so both formats reload bit-exact.

use std::io::{Read, Write};
use std::path::Path;

use relfrac_core::grid::{GridField, GridSpec};

use crate::error::{CliError, Result};

const MAGIC: &[u8; 4] = b"RFGF";
const VERSION: u32 = 1;

/// Shortest round-trip text for `v`, in exponent form outside [1e-5, 1e16).
pub fn number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

pub fn encode_binary(u: &GridField) -> Vec<u8> {
    let spec = u.spec();
    let mut out = Vec::with_capacity(28 + 8 * spec.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(spec.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(spec.points() as u64).to_le_bytes());
    out.extend_from_slice(&spec.half_width().to_le_bytes());
    for v in u.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> std::result::Result<GridField, String> {
    let take = |at: usize, n: usize| bytes.get(at..at + n).ok_or_else(|| format!("truncated at byte {at}"));
    if take(0, 4)? != MAGIC {
        return Err("missing RFGF magic".into());
    }
    let word = |at| -> std::result::Result<u32, String> { Ok(u32::from_le_bytes(take(at, 4)?.try_into().unwrap())) };
    let version = word(4)?;
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let dim = word(8)? as usize;
    let points = u64::from_le_bytes(take(12, 8)?.try_into().unwrap()) as usize;
    let half_width = f64::from_le_bytes(take(20, 8)?.try_into().unwrap());
    let spec = GridSpec::new(dim, half_width, points).map_err(|e| e.to_string())?;
    let body = &bytes[28..];
    if body.len() != 8 * spec.len() {
        return Err(format!("expected {} values, found {} bytes", spec.len(), body.len()));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GridField::new(spec, values).map_err(|e| e.to_string())
}

pub fn encode_csv(u: &GridField) -> Result<Vec<u8>> {
    let spec = u.spec();
    let dim = spec.dim();
    let mut out = format!(
        "# dim = {dim}\n# half_width = {}\n# points = {}\n",
        spec.half_width(),
        spec.points()
    )
    .into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        let mut head: Vec<String> = (0..dim).map(|a| format!("x{a}")).collect();
        head.push("value".into());
        w.write_record(&head).map_err(csv_error)?;
        for (i, v) in u.values().iter().enumerate() {
            let p = spec.point(i);
            let mut row: Vec<String> = p[..dim].iter().map(|x| number(*x)).collect();
            row.push(number(*v));
            w.write_record(&row).map_err(csv_error)?;
        }
        w.flush().map_err(|e| CliError::Failed(format!("csv write: {e}")))?;
    }
    Ok(out)
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Failed(format!("csv write: {e}"))
}

pub fn decode_csv(text: &str) -> std::result::Result<GridField, String> {
    let mut header = std::collections::BTreeMap::new();
    let mut body_start = 0;
    for line in text.lines() {
        let Some(rest) = line.strip_prefix('#') else { break };
        body_start += line.len() + 1;
        if let Some((k, v)) = rest.split_once('=') {
            header.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    let get = |k: &str| header.get(k).ok_or_else(|| format!("header is missing `{k}`"));
    let dim: usize = get("dim")?.parse().map_err(|_| "bad dim".to_string())?;
    let half_width: f64 = get("half_width")?.parse().map_err(|_| "bad half_width".to_string())?;
    let points: usize = get("points")?.parse().map_err(|_| "bad points".to_string())?;
    let spec = GridSpec::new(dim, half_width, points).map_err(|e| e.to_string())?;
    let mut reader = csv::Reader::from_reader(&text.as_bytes()[body_start.min(text.len())..]);
    let mut values = Vec::with_capacity(spec.len());
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let cell = rec.get(dim).ok_or_else(|| format!("row {} has no value column", row + 1))?;
        values.push(cell.parse::<f64>().map_err(|_| format!("row {}: bad value `{cell}`", row + 1))?);
    }
    GridField::new(spec, values).map_err(|e| e.to_string())
}

/// Writes by extension: `.csv` as CSV, anything else binary.
pub fn write_field(path: &Path, u: &GridField) -> Result<()> {
    let bytes = if is_csv(path) { encode_csv(u)? } else { encode_binary(u) };
    let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(&bytes).map_err(|e| CliError::io(path, e))
}

pub fn read_field(path: &Path) -> Result<GridField> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| CliError::io(path, e))?;
    let decoded = if is_csv(path) {
        let text = String::from_utf8(bytes).map_err(|_| "not UTF-8".to_string());
        text.and_then(|t| decode_csv(&t))
    } else {
        decode_binary(&bytes)
    };
    decoded.map_err(|detail| CliError::Format {
        path: path.to_path_buf(),
        detail,
    })
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}
