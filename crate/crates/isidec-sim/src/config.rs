//! Experiment configuration: the TOML schema, validation, and resolution
//! into the concrete per-run quantities the harness consumes.
//!
//! SNR is specified as `10 log10(σ_x² ‖h‖² / σ²)` in dB; a config gives
//! either `snr_db` or `noise_var` and the other is derived. The codebook size
//! is `⌈2^{nR}⌉` from `rate_bits`, or pinned directly with `num_messages`
//! for sweeps that hold `M` fixed while `n` grows.

use serde::{Deserialize, Serialize};

use isidec_core::channel::{ChannelParams, InterferenceModel};
use isidec_core::spectral::dft;
use isidec_core::{ComplexSpectrum, EnsembleConfig};

use crate::error::SimError;

/// How the "universal" slot of a paired trial is decoded. `MlShadow` replays
/// the ML rule under the universal label; it exists to validate the harness
/// (the exponent gap must then be exactly zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniversalRule {
    #[default]
    Metric,
    MlShadow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub n: usize,
    #[serde(default)]
    pub rate_bits: Option<f64>,
    #[serde(default)]
    pub num_messages: Option<usize>,
    pub sigma_x_sq: f64,
    pub delta: f64,
    #[serde(default)]
    pub max_rejections: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub impulse: Vec<f64>,
    #[serde(default)]
    pub noise_var: Option<f64>,
    #[serde(default)]
    pub snr_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferenceSection {
    /// Coefficients `b_1..b_q` over the orthonormal cosine basis rows.
    pub coeffs: Vec<f64>,
    /// Also run the interference-aware universal decoder.
    #[serde(default = "default_true")]
    pub decode_aware: bool,
}

fn default_true() -> bool {
    true
}

/// Block-length sweep. The decoder order is held fixed across the sweep;
/// experiment designs that grow it with `n` should keep `k_dec` well below
/// `sqrt(n)`, or the per-`n` fits stop being comparable — the harness does
/// not enforce this.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub n_list: Vec<usize>,
    /// Optional per-`n` SNR override, parallel to `n_list`.
    #[serde(default)]
    pub snr_db_list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub root_seed: u64,
    pub trials: u64,
    pub k_dec: usize,
    #[serde(default)]
    pub delta_list: Vec<f64>,
    pub ensemble: EnsembleSection,
    pub channel: ChannelSection,
    #[serde(default)]
    pub interference: Option<InterferenceSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    /// Reuse one codebook across trials (variance-reduction studies) instead
    /// of the default fresh-codebook-per-trial ensemble average.
    #[serde(default)]
    pub fixed_codebook: bool,
    #[serde(default)]
    pub universal_rule: UniversalRule,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, SimError> {
        toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Stable 64-bit FNV-1a hash of the canonical JSON form, hex-encoded.
    pub fn stable_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in canonical.as_bytes() {
            h ^= u64::from(*byte);
            h = h.wrapping_mul(0x1_0000_0000_01b3);
        }
        format!("{h:016x}")
    }

    /// Resolves the single-run view at the ensemble's own block length.
    pub fn resolve(&self) -> Result<ResolvedRun, SimError> {
        self.resolve_at(self.ensemble.n, None)
    }

    /// Resolves the run view at block length `n` with an optional SNR
    /// override (used by sweeps).
    pub fn resolve_at(&self, n: usize, snr_db: Option<f64>) -> Result<ResolvedRun, SimError> {
        if self.trials == 0 {
            return Err(SimError::Config("trials must be >= 1".into()));
        }
        if self.channel.impulse.is_empty() {
            return Err(SimError::Config("channel impulse must be nonempty".into()));
        }
        let k = self.channel.impulse.len() - 1;
        if n < k + 1 {
            return Err(SimError::Config(format!(
                "block length {n} must be at least k+1 = {}",
                k + 1
            )));
        }
        if self.delta_list.iter().any(|d| *d < 0.0 || !d.is_finite()) {
            return Err(SimError::Config(
                "delta_list entries must be finite and >= 0".into(),
            ));
        }

        let e = &self.ensemble;
        let mut ensemble =
            EnsembleConfig::new(n, e.rate_bits.unwrap_or(0.0), e.sigma_x_sq, e.delta)
                .map_err(|err| SimError::Config(err.to_string()))?;
        if let Some(cap) = e.max_rejections {
            ensemble = ensemble.with_max_rejections(cap);
        }

        let num_messages = match (e.num_messages, e.rate_bits) {
            (Some(m), _) => m,
            (None, Some(_)) => ensemble
                .num_messages()
                .map_err(|err| SimError::Config(err.to_string()))?,
            (None, None) => {
                return Err(SimError::Config(
                    "ensemble needs rate_bits or num_messages".into(),
                ))
            }
        };
        if num_messages < 2 {
            return Err(SimError::Config("decoding experiments need M >= 2".into()));
        }
        let rate_bits_effective = (num_messages as f64).log2() / n as f64;

        let h_energy: f64 = self.channel.impulse.iter().map(|h| h * h).sum();
        let (noise_var, snr_db) = match (snr_db, self.channel.noise_var, self.channel.snr_db) {
            (Some(db), _, _) | (None, None, Some(db)) => {
                (e.sigma_x_sq * h_energy * 10f64.powf(-db / 10.0), db)
            }
            (None, Some(v), None) => {
                if v < 0.0 || !v.is_finite() {
                    return Err(SimError::Config("noise_var must be finite and >= 0".into()));
                }
                let db = if v > 0.0 {
                    10.0 * (e.sigma_x_sq * h_energy / v).log10()
                } else {
                    f64::INFINITY
                };
                (v, db)
            }
            (None, Some(_), Some(_)) => {
                return Err(SimError::Config(
                    "give exactly one of channel.noise_var and channel.snr_db".into(),
                ))
            }
            (None, None, None) => {
                return Err(SimError::Config("channel needs noise_var or snr_db".into()))
            }
        };
        let params = if noise_var > 0.0 {
            ChannelParams::new(self.channel.impulse.clone(), noise_var)
        } else {
            ChannelParams::noiseless(self.channel.impulse.clone())
        }
        .map_err(|err| SimError::Config(err.to_string()))?;

        let interference = match &self.interference {
            None => None,
            Some(sec) => {
                if sec.coeffs.is_empty() {
                    return Err(SimError::Config(
                        "interference.coeffs must be nonempty".into(),
                    ));
                }
                let model = InterferenceModel::cosine(sec.coeffs.clone(), n)
                    .map_err(|err| SimError::Config(err.to_string()))?;
                let spectra: Vec<ComplexSpectrum> = model
                    .basis()
                    .iter()
                    .map(|row| {
                        dft(&isidec_core::RealSignal::new(row.clone()).expect("finite basis"))
                    })
                    .collect();
                Some(ResolvedInterference {
                    model,
                    spectra,
                    decode_aware: sec.decode_aware,
                })
            }
        };
        if self.k_dec + 1 + interference.as_ref().map_or(0, |i| i.spectra.len()) > n {
            return Err(SimError::Config("k_dec+1+q must not exceed n".into()));
        }

        Ok(ResolvedRun {
            n,
            num_messages,
            rate_bits_effective,
            k,
            k_dec: self.k_dec,
            snr_db,
            ensemble,
            params,
            interference,
            delta_list: self.delta_list.clone(),
            trials: self.trials,
            root_seed: self.root_seed,
            fixed_codebook: self.fixed_codebook,
            universal_rule: self.universal_rule,
        })
    }
}

/// Interference resolved to a concrete basis and its spectra.
#[derive(Debug, Clone)]
pub struct ResolvedInterference {
    pub model: InterferenceModel,
    pub spectra: Vec<ComplexSpectrum>,
    pub decode_aware: bool,
}

/// One experiment point, fully resolved.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub n: usize,
    pub num_messages: usize,
    pub rate_bits_effective: f64,
    pub k: usize,
    pub k_dec: usize,
    pub snr_db: f64,
    pub ensemble: EnsembleConfig,
    pub params: ChannelParams,
    pub interference: Option<ResolvedInterference>,
    pub delta_list: Vec<f64>,
    pub trials: u64,
    pub root_seed: u64,
    pub fixed_codebook: bool,
    pub universal_rule: UniversalRule,
}
