use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{io_err, IoError};
use crate::net::ImbalanceReport;
use crate::verify::VerificationReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// Guesses the format from a file extension, defaulting to JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => ReportFormat::Csv,
            _ => ReportFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ReportRef<'a> {
    Imbalance(&'a ImbalanceReport<f64>),
    Verification(&'a VerificationReport),
}

impl<'a> From<&'a ImbalanceReport<f64>> for ReportRef<'a> {
    fn from(r: &'a ImbalanceReport<f64>) -> Self {
        ReportRef::Imbalance(r)
    }
}

impl<'a> From<&'a VerificationReport> for ReportRef<'a> {
    fn from(r: &'a VerificationReport) -> Self {
        ReportRef::Verification(r)
    }
}

#[derive(Serialize)]
struct ImbalanceRow<'a> {
    id: &'a str,
    norm: f64,
    vx: f64,
    vy: f64,
}

#[derive(Serialize)]
struct ImbalanceJson<'a> {
    total_loss: f64,
    max_norm: f64,
    vertices: Vec<ImbalanceRow<'a>>,
}

fn imbalance_rows(r: &ImbalanceReport<f64>) -> Vec<ImbalanceRow<'_>> {
    r.per_vertex
        .iter()
        .map(|(id, m)| ImbalanceRow {
            id,
            norm: m.norm,
            vx: m.vector.x,
            vy: m.vector.y,
        })
        .collect()
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, IoError> {
    let bytes = w.into_inner().map_err(|e| IoError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Renders a report. Imbalance reports give one row per interior vertex;
/// verification reports give one row per finding.
pub fn render_report<'a>(report: impl Into<ReportRef<'a>>, format: ReportFormat) -> Result<String, IoError> {
    match (report.into(), format) {
        (ReportRef::Imbalance(r), ReportFormat::Csv) => {
            let mut w = csv_writer();
            w.write_record(["id", "norm", "vx", "vy"])?;
            for row in imbalance_rows(r) {
                w.write_record([row.id.to_string(), row.norm.to_string(), row.vx.to_string(), row.vy.to_string()])?;
            }
            finish(w)
        }
        (ReportRef::Imbalance(r), ReportFormat::Json) => {
            let doc = ImbalanceJson {
                total_loss: r.total_loss,
                max_norm: r.max_norm,
                vertices: imbalance_rows(r),
            };
            serde_json::to_string_pretty(&doc).map(|s| s + "\n").map_err(IoError::Json)
        }
        (ReportRef::Verification(r), ReportFormat::Csv) => {
            let mut w = csv_writer();
            w.write_record(["check", "subject", "value", "pass"])?;
            for f in r.findings() {
                w.write_record([f.check, f.subject, f.value.to_string(), f.pass.to_string()])?;
            }
            finish(w)
        }
        (ReportRef::Verification(r), ReportFormat::Json) => {
            serde_json::to_string_pretty(r).map(|s| s + "\n").map_err(IoError::Json)
        }
    }
}

pub fn export_report<'a>(
    report: impl Into<ReportRef<'a>>,
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, render_report(report, format)?).map_err(io_err(path))
}
