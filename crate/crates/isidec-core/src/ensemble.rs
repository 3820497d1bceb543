//! The random-coding ensemble: i.i.d. Gaussian codewords truncated to an
//! energy shell.
//!
//! Codewords are drawn from the measure proportional to
//! `exp{-Σ_t x_t²/(2σ_x²)}` restricted to the shell
//! `D_Δ = { x : |n^{-1} Σ_t x_t² - σ_x²| ≤ Δ σ_x² }`. Sampling is by
//! rejection, which reproduces the restricted measure exactly; scaling
//! accepted vectors onto the shell would change it and is deliberately not
//! offered. The normalization constant of the measure is never computed: all
//! decoder uses compare codewords, so it cancels in the argmax.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::rng::{self, Rng};
use crate::spectral::RealSignal;

/// Parameters of the shell ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    n: usize,
    rate_bits: f64,
    sigma_x_sq: f64,
    delta: f64,
    max_rejections: u32,
}

impl EnsembleConfig {
    /// `n` block length, `rate_bits` coding rate in bits per channel use,
    /// `sigma_x_sq` per-letter input power, `delta` shell half-width in
    /// `(0, 1)`.
    pub fn new(n: usize, rate_bits: f64, sigma_x_sq: f64, delta: f64) -> Result<Self, CoreError> {
        if n == 0 {
            return Err(CoreError::InvalidInput {
                what: "block length must be >= 1",
            });
        }
        if !rate_bits.is_finite() || rate_bits < 0.0 {
            return Err(CoreError::InvalidInput {
                what: "rate must be finite and >= 0",
            });
        }
        if !sigma_x_sq.is_finite() || sigma_x_sq <= 0.0 {
            return Err(CoreError::InvalidInput {
                what: "input power must be positive",
            });
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(CoreError::InvalidInput {
                what: "shell width must lie in (0, 1)",
            });
        }
        Ok(EnsembleConfig {
            n,
            rate_bits,
            sigma_x_sq,
            delta,
            max_rejections: 10_000,
        })
    }

    /// Overrides the rejection-sampling retry cap (default 10,000 attempts).
    pub fn with_max_rejections(mut self, cap: u32) -> Self {
        self.max_rejections = cap.max(1);
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn rate_bits(&self) -> f64 {
        self.rate_bits
    }

    #[inline]
    pub fn sigma_x_sq(&self) -> f64 {
        self.sigma_x_sq
    }

    #[inline]
    pub fn delta(&self) -> f64 {
        self.delta
    }

    #[inline]
    pub fn max_rejections(&self) -> u32 {
        self.max_rejections
    }

    /// Codebook size `M = ⌈2^{nR}⌉`.
    pub fn num_messages(&self) -> Result<usize, CoreError> {
        let m = libm::ceil(libm::exp2(self.n as f64 * self.rate_bits));
        if !m.is_finite() || m > 1e15 {
            return Err(CoreError::InvalidInput {
                what: "codebook size 2^(nR) overflows",
            });
        }
        Ok(m as usize)
    }

    /// Exact shell indicator for a total energy `‖x‖²`.
    #[inline]
    pub fn energy_in_shell(&self, energy: f64) -> bool {
        (energy / self.n as f64 - self.sigma_x_sq).abs() <= self.delta * self.sigma_x_sq
    }

    /// Exact shell indicator `x ∈ D_Δ`.
    pub fn in_shell(&self, x: &RealSignal) -> bool {
        self.energy_in_shell(x.energy())
    }

    /// Unnormalized log density evaluated from a precomputed total energy.
    ///
    /// Returns `-‖x‖²/(2σ_x²)` on the shell and `-∞` outside it; the additive
    /// `-log ν` is omitted because it is common to all codewords.
    #[inline]
    pub fn log_mu_from_energy(&self, energy: f64) -> f64 {
        if self.energy_in_shell(energy) {
            -energy / (2.0 * self.sigma_x_sq)
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// Unnormalized log density of the shell ensemble at `x`.
pub fn log_mu_unnormalized(x: &RealSignal, cfg: &EnsembleConfig) -> f64 {
    assert_eq!(
        x.len(),
        cfg.n,
        "signal length must match the ensemble block length"
    );
    cfg.log_mu_from_energy(x.energy())
}

/// Draws one codeword by rejection sampling from the shell measure.
///
/// Fails with [`CoreError::SamplingExhausted`] once the retry cap is hit,
/// which signals that `Δ` is too narrow for the configured `n`.
pub fn sample_codeword(cfg: &EnsembleConfig, rng: &mut Rng) -> Result<RealSignal, CoreError> {
    let mut buf = vec![0.0; cfg.n];
    for _ in 0..cfg.max_rejections {
        rng.fill_normal(cfg.sigma_x_sq, &mut buf);
        let energy: f64 = buf.iter().map(|v| v * v).sum();
        if cfg.energy_in_shell(energy) {
            return RealSignal::new(buf);
        }
    }
    Err(CoreError::SamplingExhausted {
        attempts: cfg.max_rejections,
    })
}

/// `M` codewords drawn independently from the shell measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    codewords: Vec<RealSignal>,
    seed: u64,
}

impl Codebook {
    /// Wraps explicit codewords after validating shell membership.
    pub fn from_codewords(
        codewords: Vec<RealSignal>,
        cfg: &EnsembleConfig,
        seed: u64,
    ) -> Result<Self, CoreError> {
        if codewords.is_empty() {
            return Err(CoreError::InvalidInput {
                what: "codebook must be nonempty",
            });
        }
        for cw in &codewords {
            if cw.len() != cfg.n {
                return Err(CoreError::DimensionMismatch {
                    expected: cfg.n,
                    got: cw.len(),
                });
            }
            if !cfg.in_shell(cw) {
                return Err(CoreError::InvalidInput {
                    what: "codeword outside the energy shell",
                });
            }
        }
        Ok(Codebook { codewords, seed })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    #[inline]
    pub fn codeword(&self, i: usize) -> &RealSignal {
        &self.codewords[i]
    }

    #[inline]
    pub fn codewords(&self) -> &[RealSignal] {
        &self.codewords
    }

    #[inline]
    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Generates `M = ⌈2^{nR}⌉` codewords, each from its own child seed, so the
/// result is reproducible and independent of evaluation order.
pub fn generate_codebook(cfg: &EnsembleConfig, seed: u64) -> Result<Codebook, CoreError> {
    let m = cfg.num_messages()?;
    generate_codebook_sized(cfg, seed, m)
}

/// Same as [`generate_codebook`] with an explicit codebook size, for
/// experiments that hold `M` fixed while sweeping `n`.
pub fn generate_codebook_sized(
    cfg: &EnsembleConfig,
    seed: u64,
    m: usize,
) -> Result<Codebook, CoreError> {
    if m < 2 {
        return Err(CoreError::InvalidInput {
            what: "decoding experiments need M >= 2",
        });
    }
    let mut codewords = Vec::with_capacity(m);
    for j in 0..m {
        let mut child = Rng::new(rng::derive(seed, j as u64));
        codewords.push(sample_codeword(cfg, &mut child)?);
    }
    Ok(Codebook { codewords, seed })
}
