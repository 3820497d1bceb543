//! Codebook fixture formats: flat binary (little-endian f64, row-major, one
//! row per codeword) and CSV, for cross-run reproducibility checks.

use std::io::Write;
use std::path::Path;

use isidec_core::ensemble::Codebook;
use isidec_core::{EnsembleConfig, RealSignal};

use crate::error::SimError;

/// Row-major little-endian f64 bytes, one row per codeword.
pub fn codebook_to_bytes(cb: &Codebook) -> Vec<u8> {
    let n = cb.codeword(0).len();
    let mut out = Vec::with_capacity(cb.len() * n * 8);
    for cw in cb.codewords() {
        for &v in cw.samples() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Parses the flat binary layout back into a codebook, validating shell
/// membership against `cfg`.
pub fn codebook_from_bytes(
    bytes: &[u8],
    cfg: &EnsembleConfig,
    seed: u64,
) -> Result<Codebook, SimError> {
    let row = cfg.n() * 8;
    if row == 0 || !bytes.len().is_multiple_of(row) || bytes.is_empty() {
        return Err(SimError::Config(format!(
            "binary codebook length {} is not a multiple of row size {row}",
            bytes.len()
        )));
    }
    let mut codewords = Vec::with_capacity(bytes.len() / row);
    for chunk in bytes.chunks_exact(row) {
        let samples: Vec<f64> = chunk
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
            .collect();
        codewords.push(RealSignal::new(samples).map_err(|e| SimError::Config(e.to_string()))?);
    }
    Codebook::from_codewords(codewords, cfg, seed).map_err(|e| SimError::Config(e.to_string()))
}

/// CSV: one line per codeword, shortest-roundtrip float formatting.
pub fn codebook_to_csv(cb: &Codebook) -> String {
    let mut out = String::new();
    for cw in cb.codewords() {
        let line: Vec<String> = cw.samples().iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn codebook_from_csv(
    text: &str,
    cfg: &EnsembleConfig,
    seed: u64,
) -> Result<Codebook, SimError> {
    let mut codewords = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let samples: Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        let samples = samples.map_err(|e| SimError::Config(format!("line {}: {e}", lineno + 1)))?;
        codewords.push(RealSignal::new(samples).map_err(|e| SimError::Config(e.to_string()))?);
    }
    Codebook::from_codewords(codewords, cfg, seed).map_err(|e| SimError::Config(e.to_string()))
}

pub fn write_codebook(cb: &Codebook, path: &Path) -> Result<(), SimError> {
    let body = if path.extension().is_some_and(|e| e == "csv") {
        codebook_to_csv(cb).into_bytes()
    } else {
        codebook_to_bytes(cb)
    };
    let mut file = std::fs::File::create(path).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(&body).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })
}
