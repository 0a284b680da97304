//! Benchmark report and its text-table, CSV and JSON-lines renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::snr::SnrMode;

pub const TIMING_SCOPE: &str =
    "mean filtering wall-clock per window in ms, single-threaded, after one discarded warm-up pass";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
    JsonLines,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "table" | "text-table" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "json" | "jsonl" | "json-lines" => Ok(ReportFormat::JsonLines),
            other => Err(Error::Parameter(format!(
                "unknown report format '{other}' (expected text, csv or jsonl)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRow {
    pub method: String,
    pub key: String,
    /// `None` when no signal produced a finite SNR.
    pub mean_snr_db: Option<f64>,
    /// Sample standard deviation across signals.
    pub std_snr_db: Option<f64>,
    pub mean_runtime_ms: f64,
    pub n_scored: usize,
    pub n_perfect: usize,
    pub n_signal_weaker: usize,
    pub window_failures: usize,
    pub published_snr_db: f64,
    pub published_time_ms: f64,
}

/// Scores of the mean-removed but otherwise unfiltered input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub mean_snr_db: Option<f64>,
    pub std_snr_db: Option<f64>,
    pub n_scored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusDescriptor {
    pub kind: String,
    pub n_signals: usize,
    pub sample_rate: f64,
    pub total_samples: usize,
    pub input_snr_db: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub toolkit_version: String,
    pub corpus: CorpusDescriptor,
    pub snr_mode: SnrMode,
    pub embed_m: usize,
    pub window_len: usize,
    pub timing_scope: String,
    pub config: BTreeMap<String, String>,
    pub baseline: BaselineRow,
    pub rows: Vec<MethodRow>,
    /// Method with the highest mean SNR in this run.
    pub best_method: Option<String>,
    /// Method with the highest published SNR among those selected.
    pub published_best_method: Option<String>,
}

impl BenchmarkReport {
    pub fn new(
        corpus: CorpusDescriptor,
        snr_mode: SnrMode,
        embed_m: usize,
        window_len: usize,
        config: BTreeMap<String, String>,
        baseline: BaselineRow,
        rows: Vec<MethodRow>,
    ) -> Self {
        let best_method = rows
            .iter()
            .filter_map(|r| r.mean_snr_db.map(|s| (s, &r.method)))
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, m)| m.clone());
        let published_best_method = rows
            .iter()
            .max_by(|a, b| a.published_snr_db.total_cmp(&b.published_snr_db))
            .map(|r| r.method.clone());
        Self {
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            corpus,
            snr_mode,
            embed_m,
            window_len,
            timing_scope: TIMING_SCOPE.to_string(),
            config,
            baseline,
            rows,
            best_method,
            published_best_method,
        }
    }

    /// Copy with every runtime zeroed, for comparing numeric output.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        for row in &mut r.rows {
            row.mean_runtime_ms = 0.0;
        }
        r
    }

    /// True when every selected method scored at least one signal.
    pub fn complete(&self) -> bool {
        self.rows.iter().all(|r| r.mean_snr_db.is_some())
    }

    pub fn ranking_matches_published(&self) -> bool {
        self.best_method.is_some() && self.best_method == self.published_best_method
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Text => Ok(self.to_text()),
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::JsonLines => self.to_json_lines(),
        }
    }

    fn to_text(&self) -> String {
        let mut s = String::new();
        let c = &self.corpus;
        let _ = writeln!(s, "# eog-denoise {}", self.toolkit_version);
        let _ = write!(
            s,
            "# corpus: {} ({} signals, {} samples at {} Hz, seed {}",
            c.kind, c.n_signals, c.total_samples, c.sample_rate, c.seed
        );
        if let Some(db) = c.input_snr_db {
            let _ = write!(s, ", input SNR {db} dB");
        }
        s.push_str(")\n");
        let _ = writeln!(s, "# snr: {} mode, embedding m = {}", self.snr_mode, self.embed_m);
        let _ = writeln!(s, "# time: {} of {} samples", self.timing_scope, self.window_len);
        let _ = writeln!(s, "# baseline (unfiltered): {}", opt_sig(self.baseline.mean_snr_db));
        let width = self
            .rows
            .iter()
            .map(|r| r.method.len())
            .chain(["Method".len()])
            .max()
            .unwrap_or(6);
        let _ = writeln!(s, "{:<width$}  {:>12}  {:>12}", "Method", "SNR (dB)", "Time (ms)");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<width$}  {:>12}  {:>12}",
                r.method,
                opt_sig(r.mean_snr_db),
                sig6(r.mean_runtime_ms)
            );
        }
        let _ = writeln!(
            s,
            "# best in this run: {}; best published: {}",
            self.best_method.as_deref().unwrap_or("none"),
            self.published_best_method.as_deref().unwrap_or("none")
        );
        let published: Vec<String> = self
            .rows
            .iter()
            .map(|r| format!("{} {} dB / {} ms", r.key, r.published_snr_db, r.published_time_ms))
            .collect();
        let _ = writeln!(s, "# published (recorded data): {}", published.join("; "));
        s
    }

    fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(CsvRow {
                method: &r.method,
                key: &r.key,
                mean_snr_db: r.mean_snr_db,
                std_snr_db: r.std_snr_db,
                mean_runtime_ms: r.mean_runtime_ms,
                n_scored: r.n_scored,
                n_perfect: r.n_perfect,
                n_signal_weaker: r.n_signal_weaker,
                window_failures: r.window_failures,
                baseline_snr_db: self.baseline.mean_snr_db,
                published_snr_db: r.published_snr_db,
                published_time_ms: r.published_time_ms,
            })
            .map_err(|e| Error::Serialize(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Serialize(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
    }

    fn to_json_lines(&self) -> Result<String> {
        let header = JsonHeader {
            kind: "header",
            toolkit_version: &self.toolkit_version,
            corpus: &self.corpus,
            snr_mode: self.snr_mode,
            embed_m: self.embed_m,
            window_len: self.window_len,
            timing_scope: &self.timing_scope,
            config: &self.config,
            baseline: &self.baseline,
            best_method: self.best_method.as_deref(),
            published_best_method: self.published_best_method.as_deref(),
        };
        let mut s = serde_json::to_string(&header).map_err(|e| Error::Serialize(e.to_string()))?;
        s.push('\n');
        for r in &self.rows {
            let line = serde_json::to_string(&JsonRow { kind: "row", row: r })
                .map_err(|e| Error::Serialize(e.to_string()))?;
            s.push_str(&line);
            s.push('\n');
        }
        Ok(s)
    }
}

/// Flat CSV record for one method.
#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    method: &'a str,
    key: &'a str,
    mean_snr_db: Option<f64>,
    std_snr_db: Option<f64>,
    mean_runtime_ms: f64,
    n_scored: usize,
    n_perfect: usize,
    n_signal_weaker: usize,
    window_failures: usize,
    baseline_snr_db: Option<f64>,
    published_snr_db: f64,
    published_time_ms: f64,
}

/// Owned form of a report CSV record, for reading one back.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ReportCsvRecord {
    pub method: String,
    pub key: String,
    pub mean_snr_db: Option<f64>,
    pub std_snr_db: Option<f64>,
    pub mean_runtime_ms: f64,
    pub n_scored: usize,
    pub n_perfect: usize,
    pub n_signal_weaker: usize,
    pub window_failures: usize,
    pub baseline_snr_db: Option<f64>,
    pub published_snr_db: f64,
    pub published_time_ms: f64,
}

pub fn parse_report_csv(text: &str) -> Result<Vec<ReportCsvRecord>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Serialize(e.to_string()))
}

#[derive(Serialize)]
struct JsonHeader<'a> {
    kind: &'static str,
    toolkit_version: &'a str,
    corpus: &'a CorpusDescriptor,
    snr_mode: SnrMode,
    embed_m: usize,
    window_len: usize,
    timing_scope: &'a str,
    config: &'a BTreeMap<String, String>,
    baseline: &'a BaselineRow,
    best_method: Option<&'a str>,
    published_best_method: Option<&'a str>,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    kind: &'static str,
    #[serde(flatten)]
    row: &'a MethodRow,
}

pub fn write_report(report: &BenchmarkReport, path: &Path, format: ReportFormat) -> Result<()> {
    let text = report.render(format)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `v` to 6 significant figures.
pub fn sig6(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

fn opt_sig(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), sig6)
}
