use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::Method;
use super::metrics::median;
use crate::data::Target;
use crate::error::{Error, Result};
use crate::format::fmt_sig;

/// Significant digits in every report file.
pub const REPORT_DIGITS: usize = 6;

pub const CSV_HEADER: &str = "model,target,train_mse,test_mse,seed_median,seed_min,seed_max";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedResult {
    pub seed: u64,
    pub train_mse: f64,
    pub test_mse: f64,
}

/// One (method, target) entry aggregated over seeds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub method: Method,
    pub target: Target,
    /// In seed order. Empty when the cell failed.
    pub runs: Vec<SeedResult>,
    pub error: Option<String>,
}

impl Cell {
    pub fn new(method: Method, target: Target) -> Self {
        Self {
            method,
            target,
            runs: Vec::new(),
            error: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.error.is_some() || self.runs.is_empty()
    }

    fn test_values(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.test_mse).collect()
    }

    fn train_values(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.train_mse).collect()
    }

    /// Median test MSE across seeds.
    pub fn test_median(&self) -> Option<f64> {
        median(&self.test_values())
    }

    pub fn train_median(&self) -> Option<f64> {
        median(&self.train_values())
    }

    pub fn test_min(&self) -> Option<f64> {
        self.test_values().into_iter().reduce(f64::min)
    }

    pub fn test_max(&self) -> Option<f64> {
        self.test_values().into_iter().reduce(f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportMeta {
    pub seeds: Vec<u64>,
    pub n_train: usize,
    pub shuffle: bool,
    pub rows: usize,
    pub dropped_rows: usize,
    pub config_digest: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellTiming {
    pub method: Method,
    pub target: Target,
    pub seed: u64,
    pub seconds: f64,
}

/// Results of a run. Wall-clock timings and model dumps are kept out of the
/// report files so that those stay byte-identical across runs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub meta: ReportMeta,
    pub cells: Vec<Cell>,
    #[serde(skip)]
    pub timings: Vec<CellTiming>,
    #[serde(skip)]
    pub dumps: Vec<(String, serde_json::Value)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
    Json,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [ReportFormat::Csv, ReportFormat::Markdown, ReportFormat::Json];

    pub fn file_name(self) -> &'static str {
        match self {
            ReportFormat::Csv => "report.csv",
            ReportFormat::Markdown => "report.md",
            ReportFormat::Json => "report.json",
        }
    }
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(|| "failed".to_string(), |x| fmt_sig(x, REPORT_DIGITS))
}

impl EvalReport {
    pub fn cell(&self, method: Method, target: Target) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.target == target)
    }

    /// `train_mse` and `test_mse` come from the first seed; the `seed_*`
    /// columns summarise test MSE over all seeds.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            let first = c.runs.first();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.method,
                c.target,
                num(first.map(|r| r.train_mse)),
                num(first.map(|r| r.test_mse)),
                num(c.test_median()),
                num(c.test_min()),
                num(c.test_max()),
            );
        }
        out
    }

    /// Methods as rows and targets as columns, median over seeds.
    pub fn to_markdown(&self) -> String {
        let targets: Vec<Target> = Target::ALL
            .into_iter()
            .filter(|t| self.cells.iter().any(|c| c.target == *t))
            .collect();
        let methods: Vec<Method> = Method::ALL
            .into_iter()
            .filter(|m| self.cells.iter().any(|c| c.method == *m))
            .collect();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Seeds: {}; training rows: {}; config sha256: {}\n",
            self.meta.seeds.len(),
            self.meta.n_train,
            self.meta.config_digest
        );
        for (title, pick) in [
            ("Test MSE (median over seeds)", Cell::test_median as fn(&Cell) -> Option<f64>),
            ("Train MSE (median over seeds)", Cell::train_median),
        ] {
            let _ = writeln!(out, "### {title}\n");
            out.push_str("| Model |");
            for t in &targets {
                let _ = write!(out, " {} |", t.title());
            }
            out.push_str("\n|---|");
            for _ in &targets {
                out.push_str("---|");
            }
            out.push('\n');
            for m in &methods {
                let _ = write!(out, "| {} |", m.title());
                for t in &targets {
                    let v = self.cell(*m, *t).and_then(pick);
                    let _ = write!(out, " {} |", num(v));
                }
                out.push('\n');
            }
            out.push('\n');
        }
        let failures: Vec<&Cell> = self.cells.iter().filter(|c| c.error.is_some()).collect();
        if !failures.is_empty() {
            out.push_str("### Failed cells\n\n");
            for c in failures {
                let _ = writeln!(
                    out,
                    "- {} / {}: {}",
                    c.method.title(),
                    c.target.title(),
                    c.error.as_deref().unwrap_or_default()
                );
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&JsonReport::from(self))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        Ok(match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Markdown => self.to_markdown(),
            ReportFormat::Json => self.to_json()?,
        })
    }

    pub fn timings_csv(&self) -> String {
        let mut out = String::from("model,target,seed,seconds\n");
        for t in &self.timings {
            let _ = writeln!(out, "{},{},{},{:.3}", t.method, t.target, t.seed, t.seconds);
        }
        out
    }

    pub fn any_failed(&self) -> bool {
        self.cells.iter().any(Cell::failed)
    }
}

/// JSON layout with MSEs rounded to the report precision.
#[derive(Serialize)]
struct JsonReport<'a> {
    meta: &'a ReportMeta,
    cells: Vec<JsonCell<'a>>,
}

#[derive(Serialize)]
struct JsonCell<'a> {
    model: Method,
    target: Target,
    seed_median: Option<f64>,
    seed_min: Option<f64>,
    seed_max: Option<f64>,
    train_median: Option<f64>,
    runs: Vec<SeedResult>,
    error: Option<&'a str>,
}

fn round6(v: Option<f64>) -> Option<f64> {
    v.map(|x| crate::format::round_sig(x, REPORT_DIGITS))
}

impl<'a> From<&'a EvalReport> for JsonReport<'a> {
    fn from(r: &'a EvalReport) -> Self {
        Self {
            meta: &r.meta,
            cells: r
                .cells
                .iter()
                .map(|c| JsonCell {
                    model: c.method,
                    target: c.target,
                    seed_median: round6(c.test_median()),
                    seed_min: round6(c.test_min()),
                    seed_max: round6(c.test_max()),
                    train_median: round6(c.train_median()),
                    runs: c
                        .runs
                        .iter()
                        .map(|s| SeedResult {
                            seed: s.seed,
                            train_mse: crate::format::round_sig(s.train_mse, REPORT_DIGITS),
                            test_mse: crate::format::round_sig(s.test_mse, REPORT_DIGITS),
                        })
                        .collect(),
                    error: c.error.as_deref(),
                })
                .collect(),
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes one report file into `dir` and returns its path.
pub fn emit_report(report: &EvalReport, format: ReportFormat, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(format.file_name());
    write_file(&path, &report.render(format)?)?;
    Ok(path)
}

/// All three report formats, `timings.csv` and any model dumps under
/// `dir/models`.
pub fn emit_all(report: &EvalReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = ReportFormat::ALL
        .into_iter()
        .map(|f| emit_report(report, f, dir))
        .collect::<Result<Vec<_>>>()?;
    let timings = dir.join("timings.csv");
    write_file(&timings, &report.timings_csv())?;
    paths.push(timings);
    if !report.dumps.is_empty() {
        let models = dir.join("models");
        std::fs::create_dir_all(&models).map_err(|e| Error::io(&models, e))?;
        for (name, value) in &report.dumps {
            let path = models.join(name);
            let mut text = serde_json::to_string_pretty(value)?;
            text.push('\n');
            write_file(&path, &text)?;
            paths.push(path);
        }
    }
    Ok(paths)
}
