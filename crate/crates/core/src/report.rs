//! Structured experiment reports and their JSON / CSV serializations.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// One row of a convergence trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub parameter: f64,
    pub estimate: f64,
    pub slack: f64,
}

/// Result document of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: Value,
    pub trace: Vec<TraceRow>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub slack: Option<f64>,
    /// Extrapolated limit; never a certified bound.
    pub extrapolated: Option<f64>,
    pub runtime_seconds: f64,
    pub details: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>, params: Value) -> Self {
        Self {
            experiment: experiment.into(),
            params,
            trace: Vec::new(),
            lower: None,
            upper: None,
            slack: None,
            extrapolated: None,
            runtime_seconds: 0.0,
            details: Value::Null,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Trace as CSV with columns `parameter,estimate,slack,cumulative_max`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("parameter,estimate,slack,cumulative_max\n");
        let mut running = f64::NEG_INFINITY;
        for row in &self.trace {
            if row.estimate > running {
                running = row.estimate;
            }
            out.push_str(&format!("{},{},{},{}\n", row.parameter, row.estimate, row.slack, running));
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        }
    }

    /// Writes through a temporary file in the target directory and renames
    /// it into place, so readers never observe a partial report.
    pub fn write_atomic(&self, path: &Path, format: ReportFormat) -> Result<()> {
        write_atomic(path, self.render(format).as_bytes())
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("writing {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_tracks_running_max() {
        let mut r = ExperimentReport::new("x", Value::Null);
        for (p, e) in [(1.0, 2.0), (2.0, 1.5), (3.0, 2.5)] {
            r.trace.push(TraceRow { parameter: p, estimate: e, slack: 0.0 });
        }
        assert_eq!(r.to_csv(), "parameter,estimate,slack,cumulative_max\n1,2,0,2\n2,1.5,0,2\n3,2.5,0,2.5\n");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        std::fs::write(&path, "old").unwrap();
        let r = ExperimentReport::new("x", Value::Null);
        r.write_atomic(&path, ReportFormat::Json).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"experiment\": \"x\""));
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
