//! Plain-text field files: a `# kdv-field N=<N>` header followed by one
//! sample per line in scientific notation.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use kdv_core::{Field, SpectralGrid};
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

const HEADER_PREFIX: &str = "# kdv-field N=";

/// Renders `field` with any extra `#` comment lines placed after the header.
pub fn format_field(field: &Field, comments: &[String]) -> String {
    let mut out = format!("{HEADER_PREFIX}{}\n", field.len());
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    for x in field.samples() {
        // `{:e}` prints the shortest representation that round-trips
        let _ = writeln!(out, "{x:e}");
    }
    out
}

/// Parses a field file. Comment lines after the header are ignored; with
/// `expected_n` set, a different header size is rejected.
pub fn parse_field(text: &str, expected_n: Option<usize>) -> Result<Field, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    let n: usize = header
        .trim()
        .strip_prefix(HEADER_PREFIX)
        .ok_or_else(|| format!("missing header '{HEADER_PREFIX}<N>'"))?
        .trim()
        .parse()
        .map_err(|e| format!("bad N in header: {e}"))?;
    if let Some(want) = expected_n {
        if want != n {
            return Err(format!("file has N={n}, expected N={want}"));
        }
    }
    let mut samples = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let x: f64 = line.parse().map_err(|e| format!("line {}: {e}", i + 2))?;
        if !x.is_finite() {
            return Err(format!("line {}: non-finite sample {line}", i + 2));
        }
        samples.push(x);
    }
    if samples.len() != n {
        return Err(format!("header says N={n} but found {} samples", samples.len()));
    }
    let grid: Arc<SpectralGrid> = SpectralGrid::new(n).map_err(|e| e.to_string())?;
    Field::from_samples(&grid, samples).map_err(|e| e.to_string())
}

pub fn read_field(path: &Path, expected_n: Option<usize>) -> CliResult<Field> {
    let text = fs::read_to_string(path).map_err(|e| CliError::file(path, e))?;
    parse_field(&text, expected_n).map_err(|e| CliError::file(path, e))
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::file(dir, e))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::file(path, e))?;
    tmp.persist(path).map_err(|e| CliError::file(path, e.error))?;
    Ok(())
}

pub fn write_field(path: &Path, field: &Field, comments: &[String]) -> CliResult<()> {
    write_atomic(path, &format_field(field, comments))
}
