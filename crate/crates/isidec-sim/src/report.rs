//! CSV/JSON emission. One row per (n, decoder, δ); identical inputs must
//! produce byte-identical files, so nothing time- or locale-dependent may
//! enter the output.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::SimError;
use crate::harness::{ExperimentResult, SweepResult};

pub const CSV_HEADER: &str =
    "n,rate,snr_db,k,k_dec,decoder,delta,trials,errors,p_hat,ci_lo,ci_hi,exponent_hat,seed";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowRecord {
    pub n: usize,
    pub rate: f64,
    pub snr_db: f64,
    pub k: usize,
    pub k_dec: usize,
    pub decoder: String,
    pub delta: Option<f64>,
    pub trials: u64,
    pub errors: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub exponent_hat: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub n: usize,
    pub snr_db: f64,
    pub gap: f64,
    pub gap_halfwidth: f64,
    pub degenerate: bool,
}

/// The JSON report: the CSV rows plus the embedded config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub rows: Vec<RowRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaps: Option<Vec<GapRecord>>,
}

pub fn rows_of(result: &ExperimentResult) -> Vec<RowRecord> {
    result
        .rows
        .iter()
        .map(|r| RowRecord {
            n: result.n,
            rate: result.rate_bits,
            snr_db: result.snr_db,
            k: result.k,
            k_dec: result.k_dec,
            decoder: r.decoder.clone(),
            delta: r.delta,
            trials: r.trials,
            errors: r.errors,
            p_hat: r.p_hat,
            ci_lo: r.ci_lo,
            ci_hi: r.ci_hi,
            exponent_hat: r.exponent_hat,
            seed: result.root_seed,
        })
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV with the fixed schema; floats use shortest-roundtrip formatting.
pub fn csv_string(rows: &[RowRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.rate,
            r.snr_db,
            r.k,
            r.k_dec,
            r.decoder,
            fmt_opt(r.delta),
            r.trials,
            r.errors,
            r.p_hat,
            r.ci_lo,
            r.ci_hi,
            r.exponent_hat,
            r.seed
        ));
    }
    out
}

pub fn json_string(report: &JsonReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn report_for_run(cfg: &ExperimentConfig, result: &ExperimentResult) -> JsonReport {
    JsonReport {
        config: cfg.clone(),
        config_hash: result.config_hash.clone(),
        rows: rows_of(result),
        gaps: None,
    }
}

pub fn report_for_sweep(cfg: &ExperimentConfig, sweep: &SweepResult) -> JsonReport {
    let mut rows = Vec::new();
    let mut gaps = Vec::new();
    let mut hash = String::new();
    for p in &sweep.points {
        rows.extend(rows_of(&p.result));
        gaps.push(GapRecord {
            n: p.n,
            snr_db: p.snr_db,
            gap: p.gap,
            gap_halfwidth: p.gap_halfwidth,
            degenerate: p.degenerate,
        });
        hash = p.result.config_hash.clone();
    }
    JsonReport {
        config: cfg.clone(),
        config_hash: hash,
        rows,
        gaps: Some(gaps),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

/// Renders the report in the requested format.
pub fn render(report: &JsonReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => csv_string(&report.rows),
        OutputFormat::Json => json_string(report),
    }
}

/// Writes the rendered report to `path`.
pub fn emit_to_path(
    report: &JsonReport,
    format: OutputFormat,
    path: &Path,
) -> Result<(), SimError> {
    let body = render(report, format);
    let mut file = std::fs::File::create(path).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(body.as_bytes())
        .map_err(|source| SimError::Io {
            path: path.display().to_string(),
            source,
        })
}
