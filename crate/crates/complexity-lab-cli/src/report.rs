//! Report assembly and output: JSON reports with echoed configuration and
//! calibration constants, and RFC-4180 CSV tables with 17-significant-digit
//! floats. Wall-clock time goes to stderr so that repeated runs with the
//! same configuration produce byte-identical output.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Output format for the results payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// The calibration constants in effect for a run: the dimension-route and
/// norm-route deviation constants of the loss, and the explicit constant of
/// the margin-to-dimension transfer. Echoed in every JSON report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Calibration {
    pub c_dc: f64,
    pub c_mc: f64,
    pub transfer_c: f64,
}

impl Calibration {
    pub fn new(c_dc: f64, c_mc: f64, transfer_c: f64) -> Self {
        Self {
            c_dc,
            c_mc,
            transfer_c,
        }
    }
}

/// A full run report. `wall_clock_ms` is intentionally not serialized:
/// identical (config, seed) runs must emit byte-identical reports, so
/// timing is reported on stderr instead.
#[derive(Debug, Serialize)]
pub struct Report {
    pub tool_version: &'static str,
    pub command: String,
    /// Echo of the resolved configuration actually used.
    pub config: Value,
    pub seed: Option<u64>,
    pub calibration: Calibration,
    pub results: Value,
    #[serde(skip)]
    pub wall_clock_ms: u128,
}

/// A tabular rendering of the results payload for CSV output.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Format a float with 17 significant digits ('.' decimal separator),
/// enough to round-trip any f64 exactly.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn render_csv(table: &Table) -> Result<String, CliError> {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer
        .write_record(&table.header)
        .map_err(|e| CliError::Validation(format!("csv write failed: {e}")))?;
    for row in &table.rows {
        writer
            .write_record(row)
            .map_err(|e| CliError::Validation(format!("csv write failed: {e}")))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Validation(format!("csv flush failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Validation(format!("csv not utf-8: {e}")))
}

/// Serialize and deliver a report: JSON renders the whole report, CSV
/// renders the tabular payload only. Output goes to `out` when given,
/// stdout otherwise; wall-clock always goes to stderr.
pub fn emit(
    report: &Report,
    table: Option<&Table>,
    out: &Option<PathBuf>,
    format: Format,
) -> Result<(), CliError> {
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| CliError::Validation(format!("report serialization failed: {e}")))?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let table = table.ok_or_else(|| {
                CliError::Validation("this command has no CSV rendering; use --format json".into())
            })?;
            render_csv(table)?
        }
    };
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Validation(format!("stdout write failed: {e}")))?;
        }
    }
    eprintln!("wall_clock_ms={}", report.wall_clock_ms);
    Ok(())
}
