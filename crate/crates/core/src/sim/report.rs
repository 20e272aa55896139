use std::io::Write;

use crate::error::{Error, Result};

use super::{MetricRow, TrialMetrics};

/// Column order of the CSV report.
pub const CSV_COLUMNS: [&str; 12] = [
    "family",
    "n",
    "rho",
    "criterion",
    "alpha_mode",
    "exact_match_rate",
    "false_active_rate",
    "false_inactive_rate",
    "coverage_freq",
    "capture_rate",
    "mean_size",
    "failures",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_record(r: &MetricRow) -> [String; 12] {
    [
        r.family.to_string(),
        r.n.to_string(),
        r.rho.to_string(),
        r.criterion.clone(),
        r.alpha_mode.clone(),
        r.exact_match_rate.to_string(),
        r.false_active_rate.to_string(),
        r.false_inactive_rate.to_string(),
        opt(r.coverage_freq),
        r.capture_rate.to_string(),
        r.mean_size.to_string(),
        r.failures.to_string(),
    ]
}

pub fn render_report(metrics: &TrialMetrics, format: ReportFormat) -> Result<String> {
    let mut buf = Vec::new();
    emit_report(metrics, format, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))
}

/// Writes the metrics table as CSV (one row per `(n, criterion)`) or the
/// full metrics, configuration included, as JSON.
pub fn emit_report<W: Write>(metrics: &TrialMetrics, format: ReportFormat, out: W) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let io = |e: csv::Error| Error::Io(e.to_string());
            w.write_record(CSV_COLUMNS).map_err(io)?;
            for r in &metrics.rows {
                w.write_record(csv_record(r)).map_err(io)?;
            }
            w.flush()?;
        }
        ReportFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, metrics).map_err(|e| Error::Io(e.to_string()))?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}
