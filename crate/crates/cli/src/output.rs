use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// Significant digits used for every number written to CSV.
pub const SIG_DIGITS: usize = 12;

/// Fixed-width decimal with [`SIG_DIGITS`] significant digits; scientific
/// notation outside `[1e-4, 1e12)`.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.*}", SIG_DIGITS - 1, 0.0);
    }
    let mag = x.abs().log10().floor() as i64;
    if !(-4..12).contains(&mag) {
        return format!("{:.*e}", SIG_DIGITS - 1, x);
    }
    let decimals = (SIG_DIGITS as i64 - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

/// CSV with one header row. Rows must already be in their final order.
pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    if rows.is_empty() {
        return Err(CliError::Domain("nothing to write: empty series".into()));
    }
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Writes plot data to `path`, or to stdout when no path is given.
pub fn emit_plot_data(
    header: &[&str],
    rows: &[Vec<String>],
    path: Option<&Path>,
) -> Result<(), CliError> {
    let text = csv_string(header, rows)?;
    emit(&text, path)
}

pub fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Domain(format!("cannot serialise report: {e}")))?;
    text.push('\n');
    emit(&text, path)
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}
