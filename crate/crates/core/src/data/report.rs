use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::AnalysisConfig;
use crate::data::SlotBundle;
use crate::error::{Error, Result};
use crate::metrics::{AgreementMatrix, HyperbolicityResult, NormStats, RetrievalResult, SeparationResult};
use crate::numerics::round_sig;

/// Significant digits of every non-integer number in exported reports.
pub const REPORT_DIGITS: usize = 6;

/// Shape and provenance of the analysed bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleSummary {
    pub source: String,
    pub scenes: usize,
    pub d_s: usize,
    #[serde(rename = "L")]
    pub patches: usize,
    pub levels: Vec<usize>,
    pub planted: bool,
}

impl BundleSummary {
    pub fn of(bundle: &SlotBundle) -> Self {
        BundleSummary {
            source: bundle.source.clone(),
            scenes: bundle.scenes.len(),
            d_s: bundle.dim,
            patches: bundle.patches,
            levels: bundle.levels.clone(),
            planted: bundle.is_planted(),
        }
    }
}

/// Everything one `analyze` run produced. Blocks of analyses that were not
/// requested, or could not be computed, are `None` and export as `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub toolkit: String,
    pub version: String,
    pub seed: u64,
    pub config: AnalysisConfig,
    pub bundle: BundleSummary,
    pub retrieval: Option<Vec<RetrievalResult>>,
    pub separation: Option<Vec<SeparationResult>>,
    pub norms: Option<Vec<NormStats>>,
    pub hyperbolicity: Option<Vec<HyperbolicityResult>>,
    pub agreement: Option<AgreementMatrix>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    /// One JSON document written to `path`.
    Structured,
    /// One CSV file per available table, written into the directory `path`.
    Tabular,
}

/// Writes `report` in the requested format. Output bytes depend only on the
/// report's contents.
pub fn export_report(report: &AnalysisReport, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    match format {
        ReportFormat::Structured => write_json(report, path),
        ReportFormat::Tabular => write_tables(report, path).map(|_| ()),
    }
}

/// JSON text of the report, numbers rounded to [`REPORT_DIGITS`].
pub fn report_json(report: &AnalysisReport) -> Result<String> {
    let mut value = serde_json::to_value(report).map_err(|e| Error::InvalidInput(e.to_string()))?;
    round_numbers(&mut value);
    let mut text = serde_json::to_string_pretty(&value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn write_json(report: &AnalysisReport, path: &Path) -> Result<()> {
    let text = report_json(report)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn round_numbers(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap(), REPORT_DIGITS);
            *value = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn num(x: f64) -> String {
    if x.is_finite() {
        round_sig(x, REPORT_DIGITS).to_string()
    } else {
        "NA".into()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), num)
}

struct Table {
    name: &'static str,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &'static str, header: &[&str]) -> Self {
        Table {
            name,
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

/// Writes every available table and returns the paths written, in order.
pub fn write_tables(report: &AnalysisReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for table in tables(report) {
        let path = dir.join(format!("{}.csv", table.name));
        let mut w = csv::Writer::from_path(&path).map_err(|e| Error::Csv {
            path: path.clone(),
            source: e,
        })?;
        let csv_err = |e| Error::Csv {
            path: path.clone(),
            source: e,
        };
        w.write_record(&table.header).map_err(csv_err)?;
        for row in &table.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

fn tables(report: &AnalysisReport) -> Vec<Table> {
    let mut out = Vec::new();

    if let Some(results) = &report.retrieval {
        let mut t = Table::new("retrieval", &["pair", "manifold", "hit_at_1", "n_evaluated", "baseline"]);
        for r in results {
            t.rows.push(vec![
                r.level_pair.to_string(),
                r.manifold.to_string(),
                opt(r.hit_at_1),
                r.n_evaluated.to_string(),
                num(r.random_baseline),
            ]);
        }
        out.push(t);
    }

    if let Some(results) = &report.separation {
        let mut samples = Table::new("separation_samples", &["manifold", "level", "scene", "depth"]);
        let mut overlap = Table::new("overlap", &["manifold", "level_a", "level_b", "ov"]);
        for r in results {
            for (&level, values) in &r.per_level_samples {
                for (scene, v) in r.scene_ids.iter().zip(values) {
                    samples
                        .rows
                        .push(vec![r.manifold.to_string(), level.to_string(), scene.clone(), num(*v)]);
                }
            }
            for (a, &la) in r.levels.iter().enumerate() {
                for (b, &lb) in r.levels.iter().enumerate().skip(a + 1) {
                    overlap
                        .rows
                        .push(vec![r.manifold.to_string(), la.to_string(), lb.to_string(), opt(r.ov_matrix[a][b])]);
                }
            }
        }
        out.push(samples);
        out.push(overlap);
    }

    if let Some(results) = &report.norms {
        let mut t = Table::new("norms", &["manifold", "level", "count", "mean", "std", "time_mean", "time_std"]);
        for r in results {
            for (level, s) in &r.per_level {
                t.rows.push(vec![
                    r.manifold.to_string(),
                    level.to_string(),
                    s.count.to_string(),
                    num(s.mean),
                    num(s.std),
                    opt(s.time_mean),
                    opt(s.time_std),
                ]);
            }
        }
        out.push(t);
    }

    if let Some(results) = &report.hyperbolicity {
        let mut t = Table::new("hyperbolicity", &["manifold", "scene", "level", "delta_norm"]);
        for r in results {
            for s in &r.samples {
                t.rows.push(vec![
                    r.manifold.to_string(),
                    s.scene.clone(),
                    s.level.map_or_else(|| "all".into(), |l| l.to_string()),
                    num(s.delta_norm),
                ]);
            }
        }
        out.push(t);
    }

    if let Some(m) = &report.agreement {
        let mut header = vec!["source"];
        header.extend(m.labels.iter().map(String::as_str));
        let mut t = Table::new("agreement", &header);
        for (label, row) in m.labels.iter().zip(&m.entries) {
            let mut cells = vec![label.clone()];
            cells.extend(row.iter().map(|v| opt(*v)));
            t.rows.push(cells);
        }
        out.push(t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_are_rounded() {
        let mut v = serde_json::json!({"a": 0.123456789, "b": [1.0e-7 / 3.0, 7], "c": null});
        round_numbers(&mut v);
        assert_eq!(v["a"], serde_json::json!(0.123457));
        assert_eq!(v["b"][1], serde_json::json!(7));
        assert_eq!(num(f64::NAN), "NA");
        assert_eq!(num(2.0), "2");
        assert_eq!(opt(None), "NA");
    }
}
