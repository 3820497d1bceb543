//! Decoding metrics: maximum likelihood, its δ-perturbed error event, and the
//! frequency-domain universal metric.
//!
//! The universal metric is a GLRT in the frequency domain. For a candidate
//! spectrum `x̃` and the received spectrum `ỹ`, a backward channel
//! `V(x̃|ỹ,θ,k)` models each bin as `x̃_m ≈ ỹ_m Σ_l α_l e^{j2πlm/n}` with
//! complex coefficients and residual variance `σ₀²`. Maximizing over `θ`
//! reduces to a least-squares fit whose normal equations have a Hermitian
//! Toeplitz Gram matrix; the metric is the maximized log-likelihood minus the
//! (unnormalized) log input density, an empirical mutual-information score.
//! The decoder never needs the true `(h, σ²)`: that is the point.

use alloc::vec;
use alloc::vec::Vec;

use crate::channel::ChannelParams;
use crate::ensemble::EnsembleConfig;
use crate::error::CoreError;
use crate::spectral::{
    hermitian_cholesky, hermitian_condition_small, hermitian_solve_factored, Complex64,
    ComplexSpectrum, DftPlan, RealSignal,
};

/// Residual-variance floor below which a backward fit is reported degenerate.
pub const SIGMA0_FLOOR: f64 = 1e-30;

/// Gram condition-number limit beyond which the fit refuses to solve.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Fitted backward-channel parameters `θ̂ = (σ̂₀², α̂₀..α̂_k [, β̂₁..β̂_q])`.
#[derive(Debug, Clone, PartialEq)]
pub struct BackwardParams {
    sigma0_sq: f64,
    alphas: Vec<Complex64>,
    betas: Option<Vec<Complex64>>,
}

impl BackwardParams {
    /// Residual variance `σ̂₀² = n^{-1} Σ_m |x̃_m - ŷ-model_m|²` (≥ 0).
    #[inline]
    pub fn sigma0_sq(&self) -> f64 {
        self.sigma0_sq
    }

    /// Coefficients `α̂_0..α̂_k`.
    #[inline]
    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    /// Interference coefficients `β̂_1..β̂_q` when fitted jointly.
    #[inline]
    pub fn betas(&self) -> Option<&[Complex64]> {
        self.betas.as_deref()
    }

    /// `Σ_l |α̂_l|²`, the quantity bounded by `σ_x²(1+Δ)/τ` whenever every
    /// output bin carries energy at least `τ`.
    pub fn alpha_norm_sq(&self) -> f64 {
        self.alphas.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Options for the backward fit. Ridge regularization is off by default
/// because it perturbs the exact normal equations; switching it on lets a
/// caller push through an ill-conditioned Gram matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FitOptions {
    pub ridge: bool,
}

/// Shared per-`ỹ` state for fitting many candidate spectra against one
/// received spectrum: Gram matrix, its Cholesky factor, and the twiddles.
pub(crate) struct BackwardWorkspace<'a> {
    plan: &'a DftPlan,
    ys: &'a ComplexSpectrum,
    k_dec: usize,
    basis: &'a [ComplexSpectrum],
    dim: usize,
    chol: Vec<Complex64>,
}

impl<'a> BackwardWorkspace<'a> {
    pub(crate) fn new(
        plan: &'a DftPlan,
        ys: &'a ComplexSpectrum,
        k_dec: usize,
        basis: &'a [ComplexSpectrum],
        options: FitOptions,
    ) -> Result<Self, CoreError> {
        let n = ys.len();
        assert_eq!(plan.len(), n, "plan length mismatch");
        let q = basis.len();
        let dim = k_dec + 1 + q;
        if dim > n {
            return Err(CoreError::InvalidInput {
                what: "model order: k_dec+1+q must not exceed n",
            });
        }
        for phi in basis {
            if phi.len() != n {
                return Err(CoreError::DimensionMismatch {
                    expected: n,
                    got: phi.len(),
                });
            }
        }
        let ybins = ys.bins();

        // Toeplitz band of the Gram: c_d = Σ_m |ỹ_m|² e^{j2πmd/n}.
        let mut band = Vec::with_capacity(k_dec + 1);
        for d in 0..=k_dec {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, yb) in ybins.iter().enumerate() {
                acc += yb.norm_sqr() * plan.twiddle(m * d).conj();
            }
            band.push(acc);
        }
        let mut gram = vec![Complex64::new(0.0, 0.0); dim * dim];
        for col in 0..=k_dec {
            for row in 0..=k_dec {
                // C_{row,col} = c_{col-row}, with c_{-d} = conj(c_d).
                let entry = if col >= row {
                    band[col - row]
                } else {
                    band[row - col].conj()
                };
                gram[col * dim + row] = entry;
            }
        }
        // Interference columns: cross terms against the modulated-ỹ columns
        // and the basis Gram block.
        for (i, phi) in basis.iter().enumerate() {
            let col = k_dec + 1 + i;
            for row in 0..=k_dec {
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, (yb, pb)) in ybins.iter().zip(phi.bins()).enumerate() {
                    acc += yb.conj() * plan.twiddle(m * row) * pb;
                }
                gram[col * dim + row] = acc;
                gram[row * dim + col] = acc.conj();
            }
            for (j, phj) in basis.iter().enumerate().take(i + 1) {
                let row = k_dec + 1 + j;
                let mut acc = Complex64::new(0.0, 0.0);
                for (pj, pi) in phj.bins().iter().zip(phi.bins()) {
                    acc += pj.conj() * pi;
                }
                gram[col * dim + row] = acc;
                gram[row * dim + col] = acc.conj();
            }
        }

        let condition = hermitian_condition_small(&gram, dim);
        if condition > CONDITION_LIMIT {
            if options.ridge {
                let trace: f64 = (0..dim).map(|i| gram[i * dim + i].re).sum();
                let lambda = 1e-10 * trace / dim as f64;
                for i in 0..dim {
                    gram[i * dim + i] += Complex64::new(lambda, 0.0);
                }
            } else {
                return Err(CoreError::SingularSystem { condition });
            }
        }
        let chol = hermitian_cholesky(&gram, dim).ok_or(CoreError::SingularSystem { condition })?;
        Ok(BackwardWorkspace {
            plan,
            ys,
            k_dec,
            basis,
            dim,
            chol,
        })
    }

    /// Least-squares fit of one candidate spectrum.
    pub(crate) fn fit(&self, xs: &ComplexSpectrum) -> Result<BackwardParams, CoreError> {
        let n = self.ys.len();
        assert_eq!(xs.len(), n, "spectra must share a length");
        let ybins = self.ys.bins();
        let xbins = xs.bins();

        let mut rhs = Vec::with_capacity(self.dim);
        for qidx in 0..=self.k_dec {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, (xb, yb)) in xbins.iter().zip(ybins).enumerate() {
                acc += xb * yb.conj() * self.plan.twiddle(m * qidx);
            }
            rhs.push(acc);
        }
        for phi in self.basis {
            let mut acc = Complex64::new(0.0, 0.0);
            for (pb, xb) in phi.bins().iter().zip(xbins) {
                acc += pb.conj() * xb;
            }
            rhs.push(acc);
        }

        let theta = hermitian_solve_factored(&self.chol, &rhs, self.dim);
        let alphas = theta[..=self.k_dec].to_vec();
        let betas = if self.basis.is_empty() {
            None
        } else {
            Some(theta[self.k_dec + 1..].to_vec())
        };

        // Direct residual, which defines σ̂₀².
        let mut resid_sum = 0.0;
        for (m, (xb, yb)) in xbins.iter().zip(ybins).enumerate() {
            let mut model = Complex64::new(0.0, 0.0);
            for (l, al) in alphas.iter().enumerate() {
                model += al * self.plan.twiddle(m * l).conj();
            }
            let mut r = xb - yb * model;
            if let Some(bs) = &betas {
                for (b, phi) in bs.iter().zip(self.basis) {
                    r -= b * phi.bins()[m];
                }
            }
            resid_sum += r.norm_sqr();
        }
        let sigma0_sq = (resid_sum / n as f64).max(0.0);
        Ok(BackwardParams {
            sigma0_sq,
            alphas,
            betas,
        })
    }
}

/// Solves the backward-channel normal equations for `α̂` and the residual
/// variance `σ̂₀²` at decoder model order `k_dec`.
pub fn fit_backward(
    xs: &ComplexSpectrum,
    ys: &ComplexSpectrum,
    k_dec: usize,
) -> Result<BackwardParams, CoreError> {
    fit_backward_with_options(xs, ys, k_dec, FitOptions::default())
}

/// [`fit_backward`] with explicit [`FitOptions`].
pub fn fit_backward_with_options(
    xs: &ComplexSpectrum,
    ys: &ComplexSpectrum,
    k_dec: usize,
    options: FitOptions,
) -> Result<BackwardParams, CoreError> {
    assert_eq!(xs.len(), ys.len(), "spectra must share a length");
    let plan = DftPlan::new(ys.len());
    BackwardWorkspace::new(&plan, ys, k_dec, &[], options)?.fit(xs)
}

/// Joint fit of `(α̂, β̂)` with `q` known interference basis spectra. With an
/// empty basis this reduces exactly to [`fit_backward`].
pub fn fit_backward_with_interference(
    xs: &ComplexSpectrum,
    ys: &ComplexSpectrum,
    k_dec: usize,
    basis_spectra: &[ComplexSpectrum],
) -> Result<BackwardParams, CoreError> {
    assert_eq!(xs.len(), ys.len(), "spectra must share a length");
    let plan = DftPlan::new(ys.len());
    BackwardWorkspace::new(&plan, ys, k_dec, basis_spectra, FitOptions::default())?.fit(xs)
}

/// The identity form of the fitted residual:
/// `n^{-1}Σ|x̃_m|² - n^{-1}Σ|ỹ_m|² |Σ_l α̂_l e^{j2πml/n}|²`.
///
/// Equals `σ̂₀²` whenever `α̂` solves the normal equations; the agreement is a
/// library invariant and is what the optimality tests check.
pub fn residual_identity_value(
    xs: &ComplexSpectrum,
    ys: &ComplexSpectrum,
    alphas: &[Complex64],
) -> f64 {
    assert_eq!(xs.len(), ys.len(), "spectra must share a length");
    let n = xs.len();
    let plan = DftPlan::new(n);
    let mut energy = 0.0;
    let mut quad = 0.0;
    for (m, (xb, yb)) in xs.bins().iter().zip(ys.bins()).enumerate() {
        energy += xb.norm_sqr();
        let mut a = Complex64::new(0.0, 0.0);
        for (l, al) in alphas.iter().enumerate() {
            a += al * plan.twiddle(m * l).conj();
        }
        quad += yb.norm_sqr() * a.norm_sqr();
    }
    (energy - quad) / n as f64
}

/// Log of the backward channel's product form at its maximizer:
/// `-(n/2)·log(2πσ̂₀²) - n/2`, using `Σ residuals² = nσ̂₀²`.
pub fn max_log_v(params: &BackwardParams, n: usize) -> Result<f64, CoreError> {
    let s = params.sigma0_sq;
    if s < SIGMA0_FLOOR {
        return Err(CoreError::DegenerateFit { sigma0_sq: s });
    }
    let nf = n as f64;
    Ok(-(nf / 2.0) * libm::log(2.0 * core::f64::consts::PI * s) - nf / 2.0)
}

/// The universal decoding metric `max_θ log V(x̃|ỹ,θ,k) - log μ(x̃)`.
///
/// The candidate's energy enters `log μ` through Parseval; spectra outside
/// the ensemble's support get `-∞` so they can never win the argmax.
pub fn universal_metric(
    xs: &ComplexSpectrum,
    ys: &ComplexSpectrum,
    k_dec: usize,
    cfg: &EnsembleConfig,
) -> Result<f64, CoreError> {
    let fit = fit_backward(xs, ys, k_dec)?;
    metric_from_fit(&fit, xs, cfg)
}

/// Interference-aware variant of [`universal_metric`].
pub fn universal_metric_with_interference(
    xs: &ComplexSpectrum,
    ys: &ComplexSpectrum,
    k_dec: usize,
    basis_spectra: &[ComplexSpectrum],
    cfg: &EnsembleConfig,
) -> Result<f64, CoreError> {
    let fit = fit_backward_with_interference(xs, ys, k_dec, basis_spectra)?;
    metric_from_fit(&fit, xs, cfg)
}

fn metric_from_fit(
    fit: &BackwardParams,
    xs: &ComplexSpectrum,
    cfg: &EnsembleConfig,
) -> Result<f64, CoreError> {
    let log_mu = cfg.log_mu_from_energy(xs.energy());
    if log_mu == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(max_log_v(fit, xs.len())? - log_mu)
}

/// Channel log-likelihood
/// `log W(y|x) = -(n/2) log(2πσ²) - Σ_t (y_t - Σ_i h_i x_{t-i})²/(2σ²)`
/// with the zero-prehistory convention.
pub fn ml_log_likelihood(y: &RealSignal, x: &RealSignal, params: &ChannelParams) -> f64 {
    assert_eq!(y.len(), x.len(), "signals must share a length");
    let sigma_sq = params.noise_var();
    assert!(
        sigma_sq > 0.0,
        "ML log-likelihood needs a positive noise variance"
    );
    let n = y.len();
    let h = params.impulse();
    let xs = x.samples();
    let mut resid = 0.0;
    for (t, yt) in y.samples().iter().enumerate() {
        let mut conv = 0.0;
        for (i, &hi) in h.iter().enumerate().take(t + 1) {
            conv += hi * xs[t - i];
        }
        let d = yt - conv;
        resid += d * d;
    }
    let nf = n as f64;
    -(nf / 2.0) * libm::log(2.0 * core::f64::consts::PI * sigma_sq) - resid / (2.0 * sigma_sq)
}

/// The decoding rule to apply to a codebook.
#[derive(Debug, Clone)]
pub enum DecodeRule<'a> {
    /// Maximum likelihood with known channel parameters.
    MaximumLikelihood(&'a ChannelParams),
    /// The universal frequency-domain metric at decoder order `k_dec`.
    Universal {
        k_dec: usize,
        ensemble: &'a EnsembleConfig,
    },
    /// Universal metric fitting `q` known interference basis spectra jointly.
    UniversalInterference {
        k_dec: usize,
        ensemble: &'a EnsembleConfig,
        basis_spectra: &'a [ComplexSpectrum],
    },
}

/// Outcome of decoding one received block against a codebook.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderVerdict {
    /// Index attaining the maximum metric; ties go to the smallest index.
    pub chosen_index: usize,
    /// Metric value per codeword (`-∞` for degenerate fits).
    pub metric_values: Vec<f64>,
    /// Set when the maximum was attained by more than one codeword.
    pub tie_flag: bool,
}

/// Evaluates the selected metric on every codeword and returns the argmax
/// with lowest-index tie-breaking and the full metric trace.
///
/// A codeword whose backward fit degenerates scores `-∞` instead of aborting
/// the decode; a singular Gram matrix (a property of `y` alone) fails the
/// whole call.
pub fn decode(
    codebook: &crate::ensemble::Codebook,
    y: &RealSignal,
    rule: &DecodeRule<'_>,
) -> Result<DecoderVerdict, CoreError> {
    assert!(!codebook.is_empty(), "codebook must be nonempty");
    let metrics = match rule {
        DecodeRule::MaximumLikelihood(params) => codebook
            .codewords()
            .iter()
            .map(|x| ml_log_likelihood(y, x, params))
            .collect::<Vec<f64>>(),
        DecodeRule::Universal { k_dec, ensemble } => {
            universal_metrics(codebook, y, *k_dec, &[], ensemble)?
        }
        DecodeRule::UniversalInterference {
            k_dec,
            ensemble,
            basis_spectra,
        } => universal_metrics(codebook, y, *k_dec, basis_spectra, ensemble)?,
    };
    Ok(argmax_verdict(metrics))
}

fn universal_metrics(
    codebook: &crate::ensemble::Codebook,
    y: &RealSignal,
    k_dec: usize,
    basis: &[ComplexSpectrum],
    cfg: &EnsembleConfig,
) -> Result<Vec<f64>, CoreError> {
    let n = y.len();
    let plan = DftPlan::new(n);
    let ys = plan.forward_real(y);
    let ws = BackwardWorkspace::new(&plan, &ys, k_dec, basis, FitOptions::default())?;
    let mut metrics = Vec::with_capacity(codebook.len());
    for x in codebook.codewords() {
        let xs = plan.forward_real(x);
        let fit = ws.fit(&xs)?;
        let log_mu = cfg.log_mu_from_energy(xs.energy());
        let metric = if log_mu == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            match max_log_v(&fit, n) {
                Ok(v) => v - log_mu,
                Err(CoreError::DegenerateFit { .. }) => f64::NEG_INFINITY,
                Err(e) => return Err(e),
            }
        };
        metrics.push(metric);
    }
    Ok(metrics)
}

fn argmax_verdict(metrics: Vec<f64>) -> DecoderVerdict {
    let mut best = 0usize;
    for (i, &m) in metrics.iter().enumerate().skip(1) {
        if m > metrics[best] {
            best = i;
        }
    }
    let tie_flag = metrics
        .iter()
        .enumerate()
        .any(|(i, &m)| i != best && m == metrics[best]);
    DecoderVerdict {
        chosen_index: best,
        metric_values: metrics,
        tie_flag,
    }
}

/// True iff some competitor `x'` satisfies
/// `n^{-1} log W(y|x') > n^{-1} log W(y|x_true) - δ` (strict; ties at δ = 0
/// are not errors).
pub fn delta_error_event(
    codebook: &crate::ensemble::Codebook,
    y: &RealSignal,
    true_index: usize,
    params: &ChannelParams,
    delta: f64,
) -> bool {
    assert!(delta >= 0.0, "delta must be nonnegative");
    assert!(true_index < codebook.len(), "true index out of range");
    let n = y.len() as f64;
    let reference = ml_log_likelihood(y, codebook.codeword(true_index), params) / n;
    codebook
        .codewords()
        .iter()
        .enumerate()
        .any(|(j, x)| j != true_index && ml_log_likelihood(y, x, params) / n > reference - delta)
}
