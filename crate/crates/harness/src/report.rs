//! Convergence tables, CSV output and the index binding files to tables.

use std::fs;
use std::path::Path;

use gausscq_core::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

pub const CSV_HEADER: &str = "N_t,error,eoc";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n_t: usize,
    pub error: f64,
    /// Order estimate against the previous row; absent on the first row.
    pub eoc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub config: ExperimentConfig,
    pub rows: Vec<ConvergenceRow>,
    pub version: String,
    pub wall_time_s: f64,
}

/// `log(e_k / e_{k+1}) / log(N_{k+1} / N_k)`.
pub fn eoc(n0: usize, e0: f64, n1: usize, e1: f64) -> f64 {
    (e0 / e1).ln() / (n1 as f64 / n0 as f64).ln()
}

/// Rows with order estimates between consecutive step counts.
pub fn convergence_rows(steps: &[usize], errors: &[f64]) -> Result<Vec<ConvergenceRow>> {
    if steps.len() != errors.len() {
        return Err(Error::DimensionMismatch {
            expected: steps.len(),
            found: errors.len(),
        });
    }
    if let Some(e) = errors.iter().find(|e| !(**e >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "errors must be non-negative, got {e}"
        )));
    }
    Ok(steps
        .iter()
        .zip(errors)
        .enumerate()
        .map(|(k, (&n_t, &error))| ConvergenceRow {
            n_t,
            error,
            eoc: (k > 0).then(|| eoc(steps[k - 1], errors[k - 1], n_t, error)),
        })
        .collect())
}

impl ConvergenceReport {
    /// `N_t,error,eoc` with errors in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            match r.eoc {
                Some(e) => out.push_str(&format!("{},{:e},{:.4}\n", r.n_t, r.error, e)),
                None => out.push_str(&format!("{},{:e},\n", r.n_t, r.error)),
            }
        }
        out
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    /// Order estimate on the row with `n_t` steps.
    pub fn eoc_at(&self, n_t: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.n_t == n_t).and_then(|r| r.eoc)
    }
}

/// Parses a CSV written by [`ConvergenceReport::to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<ConvergenceRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Decode("missing CSV header".into()));
    }
    let bad = |line: &str| Error::Decode(format!("bad CSV row {line:?}"));
    lines
        .map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            let [n, e, o] = cells[..] else {
                return Err(bad(line));
            };
            let n_t = n.parse().map_err(|_| bad(line))?;
            let error = e.parse().map_err(|_| bad(line))?;
            let eoc = if o.is_empty() {
                None
            } else {
                Some(o.parse().map_err(|_| bad(line))?)
            };
            Ok(ConvergenceRow { n_t, error, eoc })
        })
        .collect()
}

/// Writes through a temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// One output file and the table cell it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub table: String,
    pub cell: String,
    pub file: String,
    pub config: ExperimentConfig,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Index {
    pub version: String,
    pub entries: Vec<IndexEntry>,
}

impl Index {
    pub fn new() -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").into(),
            entries: Vec::new(),
        }
    }

    /// Reads `index.json` from `dir`, or starts an empty index.
    pub fn load_or_new(dir: &Path) -> Result<Self> {
        match fs::read_to_string(dir.join("index.json")) {
            Ok(text) => {
                serde_json::from_str(&text).map_err(|e| Error::Decode(format!("index.json: {e}")))
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::new()),
            Err(e) => Err(e.into()),
        }
    }

    /// Adds or replaces the entry for `file`.
    pub fn insert(&mut self, entry: IndexEntry) {
        self.entries.retain(|e| e.file != entry.file);
        self.entries.push(entry);
        self.entries
            .sort_by(|a, b| (&a.table, &a.cell).cmp(&(&b.table, &b.cell)));
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Decode(e.to_string()))?;
        write_atomic(&dir.join("index.json"), text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::StageRange;

    #[test]
    fn eoc_of_a_clean_power_law() {
        let steps = [16, 32, 64];
        let errors: Vec<f64> = steps.iter().map(|&n| 3.0 * (n as f64).powi(-4)).collect();
        let rows = convergence_rows(&steps, &errors).unwrap();
        assert!(rows[0].eoc.is_none());
        for r in &rows[1..] {
            assert!((r.eoc.unwrap() - 4.0).abs() < 1e-12);
        }
        assert!((eoc(15, 1.0, 21, (15.0f64 / 21.0).powi(3)) - 3.0).abs() < 1e-12);
        assert!(convergence_rows(&[1, 2], &[1.0]).is_err());
        assert!(convergence_rows(&[1, 2], &[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let report = ConvergenceReport {
            config: ExperimentConfig::StabilityReport(StageRange {
                name: "x".into(),
                m_min: 1,
                m_max: 2,
            }),
            rows: convergence_rows(&[6, 7, 10], &[2.431, 1.389, 0.3467]).unwrap(),
            version: "0".into(),
            wall_time_s: 0.0,
        };
        let csv = report.to_csv();
        assert!(csv.starts_with("N_t,error,eoc\n6,2.431e0,\n7,1.389e0,3.6"));
        let back = parse_csv(&csv).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back[2].error, 0.3467);
        assert!((back[1].eoc.unwrap() - report.rows[1].eoc.unwrap()).abs() < 1e-4);
        assert!(parse_csv("a,b\n").is_err());
        assert!(parse_csv("N_t,error,eoc\n1,2\n").is_err());
    }
}
