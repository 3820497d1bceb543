//! Executable typicality machinery: sufficient statistics, conditional
//! ε-types, the high-probability event set `H_n(B)`, and Monte Carlo
//! estimates of conditional-type volumes.
//!
//! A conditional ε-type `T_ε^k(x̃|ỹ)` collects every complex spectrum whose
//! energy and whose `k+1` complex cross-correlations against `ỹ` match those
//! of `x̃` within ε. Volumes are measured in complex `n`-space (2n real
//! dimensions): the type is a set of unconstrained complex vectors, not of
//! conjugate-symmetric ones.
//!
//! The importance sampler draws from the fitted backward channel, viewed as a
//! probability density on `ℂⁿ`: per bin a circularly-symmetric complex
//! Gaussian centred on `ỹ_m Σ_l α̂_l e^{j2πlm/n}` with per-bin second moment
//! `σ̂₀²`, i.e. density `(πσ̂₀²)^{-1} exp{-|z-mean|²/σ̂₀²}`. That calibration
//! makes the fitted parameters match the sufficient statistics in
//! expectation, which is what concentrates samples on the type.

use alloc::vec::Vec;

use crate::decoder::{fit_backward, SIGMA0_FLOOR};
use crate::ensemble::EnsembleConfig;
use crate::error::CoreError;
use crate::rng::Rng;
use crate::spectral::{Complex64, ComplexSpectrum, DftPlan};

/// The statistics defining a conditional type: energy and the real/imaginary
/// parts of the lagged cross-correlations.
#[derive(Debug, Clone, PartialEq)]
pub struct SufficientStats {
    /// `n^{-1} Σ_m |x̃_m|²` (≥ 0).
    pub rho_xx: f64,
    /// `n^{-1} Σ_m Re{x̃_m ỹ_m* e^{-j2πlm/n}}`, `l = 0..k`.
    pub rho_r: Vec<f64>,
    /// Imaginary counterparts of `rho_r`.
    pub rho_i: Vec<f64>,
}

impl SufficientStats {
    #[inline]
    pub fn order(&self) -> usize {
        self.rho_r.len() - 1
    }
}

/// Computes the sufficient statistics of `x̃` against `ỹ` at order `k`.
pub fn sufficient_stats(xs: &ComplexSpectrum, ys: &ComplexSpectrum, k: usize) -> SufficientStats {
    assert_eq!(xs.len(), ys.len(), "spectra must share a length");
    assert!(k < xs.len(), "order k+1 must not exceed n");
    let n = xs.len();
    let plan = DftPlan::new(n);
    let inv_n = 1.0 / n as f64;
    let mut rho_xx = 0.0;
    for xb in xs.bins() {
        rho_xx += xb.norm_sqr();
    }
    rho_xx *= inv_n;
    let mut rho_r = Vec::with_capacity(k + 1);
    let mut rho_i = Vec::with_capacity(k + 1);
    for l in 0..=k {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, (xb, yb)) in xs.bins().iter().zip(ys.bins()).enumerate() {
            acc += xb * yb.conj() * plan.twiddle(m * l);
        }
        rho_r.push(acc.re * inv_n);
        rho_i.push(acc.im * inv_n);
    }
    SufficientStats {
        rho_xx,
        rho_r,
        rho_i,
    }
}

/// Largest absolute deviation of `candidate`'s statistics from `reference`,
/// over the energy and all `2(k+1)` cross-correlation components.
pub fn max_stat_deviation(
    candidate: &ComplexSpectrum,
    reference: &SufficientStats,
    ys: &ComplexSpectrum,
    k: usize,
) -> f64 {
    let stats = sufficient_stats(candidate, ys, k);
    let mut worst = (stats.rho_xx - reference.rho_xx).abs();
    for l in 0..=k {
        worst = worst.max((stats.rho_r[l] - reference.rho_r[l]).abs());
        worst = worst.max((stats.rho_i[l] - reference.rho_i[l]).abs());
    }
    worst
}

/// Membership of `candidate` in the conditional ε-type defined by
/// `reference` (the statistics of some `x̃` against `ỹ`).
///
/// An infinite `eps` makes the constraint vacuous.
pub fn in_conditional_type(
    candidate: &ComplexSpectrum,
    reference: &SufficientStats,
    ys: &ComplexSpectrum,
    k: usize,
    eps: f64,
) -> bool {
    assert!(eps > 0.0, "eps must be positive");
    max_stat_deviation(candidate, reference, ys, k) <= eps
}

/// The high-probability event predicate `H_n(B)`: in-shell input spectrum,
/// output energy at most `B`, and a non-degenerate backward fit
/// `σ̂₀² ≥ 1/B`.
///
/// A failed fit counts as non-membership (the conservative direction).
pub fn in_hn(
    xs: &ComplexSpectrum,
    ys: &ComplexSpectrum,
    b: f64,
    cfg: &EnsembleConfig,
    k_dec: usize,
) -> bool {
    assert!(b > 0.0, "B must be positive");
    let n = xs.len() as f64;
    if !cfg.energy_in_shell(xs.energy()) {
        return false;
    }
    if ys.energy() / n > b {
        return false;
    }
    match fit_backward(xs, ys, k_dec) {
        Ok(fit) => fit.sigma0_sq() >= 1.0 / b,
        Err(_) => false,
    }
}

/// Monte Carlo estimate of a conditional-type volume.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeEstimate {
    /// Natural log of the estimated volume.
    pub log_volume: f64,
    /// Standard error of the estimate on the linear scale.
    pub std_error: f64,
    /// Number of importance samples drawn.
    pub samples: u64,
}

impl VolumeEstimate {
    /// The estimate on the linear scale.
    pub fn volume(&self) -> f64 {
        libm::exp(self.log_volume)
    }
}

/// Log density of the backward channel (as a normalized density on `ℂⁿ`)
/// at bins `z` given per-bin means and residual variance.
fn log_backward_density(z: &[Complex64], means: &[Complex64], sigma0_sq: f64) -> f64 {
    let n = z.len() as f64;
    let mut resid = 0.0;
    for (zb, mb) in z.iter().zip(means) {
        resid += (zb - mb).norm_sqr();
    }
    -n * libm::log(core::f64::consts::PI * sigma0_sq) - resid / sigma0_sq
}

/// Log of the backward density at its own mean-matching maximizer, where the
/// total residual equals `n σ̂₀²`: `-n (log(π σ̂₀²) + 1)`.
pub fn log_max_backward_density(sigma0_sq: f64, n: usize) -> f64 {
    -(n as f64) * (libm::log(core::f64::consts::PI * sigma0_sq) + 1.0)
}

/// Analytical bracket for the log-volume of a conditional ε-type at a valid
/// pair `(B, ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeBracket {
    /// `-nεf + log(1 - (2k+12)B²/(nε²)) - log maxV`; absent ("vacuous")
    /// when the concentration factor is not positive.
    pub log_lower: Option<f64>,
    /// `nεf - log maxV`.
    pub log_upper: f64,
}

impl VolumeBracket {
    pub fn is_vacuous(&self) -> bool {
        self.log_lower.is_none()
    }
}

/// Evaluates the volume bracket with slack exponent
/// `f = B (1 + sqrt(k+1) · σ_x²(1+Δ) B)` around the reciprocal of the
/// maximized backward density.
pub fn volume_bracket(
    sigma0_sq: f64,
    n: usize,
    k: usize,
    eps: f64,
    b: f64,
    sigma_x_sq: f64,
    delta: f64,
) -> VolumeBracket {
    let nf = n as f64;
    let c_bound = sigma_x_sq * (1.0 + delta) * b;
    let f = b * (1.0 + libm::sqrt((k + 1) as f64) * c_bound);
    let log_max_v = log_max_backward_density(sigma0_sq, n);
    let slack = 1.0 - (2.0 * k as f64 + 12.0) * b * b / (nf * eps * eps);
    let log_lower = if slack > 0.0 {
        Some(-nf * eps * f + libm::log(slack) - log_max_v)
    } else {
        None
    };
    VolumeBracket {
        log_lower,
        log_upper: nf * eps * f - log_max_v,
    }
}

/// Importance-sampling estimate of `Vol{T_ε^k(x̃|ỹ)}` as a subset of complex
/// `n`-space.
///
/// Draws from the fitted backward channel and averages `1{Z ∈ T}/V(Z)`.
/// Guards: `n ≤ 8` (volumes are only meaningful at desk scale), at least
/// `10⁴` samples, and a non-degenerate fit. Fails with
/// [`CoreError::ZeroHits`] when no sample lands in the type.
pub fn estimate_type_volume(
    ref_xs: &ComplexSpectrum,
    ys: &ComplexSpectrum,
    k: usize,
    eps: f64,
    n_samples: u64,
    rng: &mut Rng,
) -> Result<VolumeEstimate, CoreError> {
    let n = ref_xs.len();
    if n > 8 {
        return Err(CoreError::InvalidInput {
            what: "volume estimation is guarded to n <= 8",
        });
    }
    if n_samples < 10_000 {
        return Err(CoreError::InvalidInput {
            what: "volume estimation needs >= 10^4 samples",
        });
    }
    if !eps.is_finite() || eps <= 0.0 {
        return Err(CoreError::InvalidInput {
            what: "eps must be positive and finite",
        });
    }
    let fit = fit_backward(ref_xs, ys, k)?;
    let sigma0_sq = fit.sigma0_sq();
    if sigma0_sq < SIGMA0_FLOOR {
        return Err(CoreError::DegenerateFit { sigma0_sq });
    }
    let reference = sufficient_stats(ref_xs, ys, k);

    let plan = DftPlan::new(n);
    let means: Vec<Complex64> = ys
        .bins()
        .iter()
        .enumerate()
        .map(|(m, yb)| {
            let mut a = Complex64::new(0.0, 0.0);
            for (l, al) in fit.alphas().iter().enumerate() {
                a += al * plan.twiddle(m * l).conj();
            }
            yb * a
        })
        .collect();

    let component_sd = libm::sqrt(sigma0_sq / 2.0);
    let mut bins = Vec::with_capacity(n);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut hits = 0u64;
    for _ in 0..n_samples {
        bins.clear();
        for mean in &means {
            let re = mean.re + component_sd * rng.standard_normal();
            let im = mean.im + component_sd * rng.standard_normal();
            bins.push(Complex64::new(re, im));
        }
        let candidate = ComplexSpectrum::from_bins(bins.clone()).expect("finite");
        let weight = if in_conditional_type(&candidate, &reference, ys, k, eps) {
            hits += 1;
            libm::exp(-log_backward_density(&bins, &means, sigma0_sq))
        } else {
            0.0
        };
        sum += weight;
        sum_sq += weight * weight;
    }
    if hits == 0 {
        return Err(CoreError::ZeroHits);
    }
    let nf = n_samples as f64;
    let mean = sum / nf;
    let var = (sum_sq / nf - mean * mean).max(0.0);
    Ok(VolumeEstimate {
        log_volume: libm::log(mean),
        std_error: libm::sqrt(var / nf),
        samples: n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::dft;
    use crate::spectral::RealSignal;
    use alloc::vec;

    fn spectrum(vals: &[(f64, f64)]) -> ComplexSpectrum {
        ComplexSpectrum::from_bins(
            vals.iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect(),
        )
        .unwrap()
    }

    fn random_spectrum(n: usize, rng: &mut Rng) -> ComplexSpectrum {
        ComplexSpectrum::from_bins(
            (0..n)
                .map(|_| Complex64::new(rng.standard_normal(), rng.standard_normal()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_input_has_zero_stats() {
        let xs = spectrum(&[(0.0, 0.0); 4]);
        let ys = spectrum(&[(1.0, 2.0), (0.5, -1.0), (3.0, 0.0), (0.0, 1.0)]);
        let s = sufficient_stats(&xs, &ys, 2);
        assert_eq!(s.rho_xx, 0.0);
        assert!(s.rho_r.iter().chain(&s.rho_i).all(|&v| v == 0.0));
    }

    #[test]
    fn self_correlation_at_lag_zero() {
        let mut rng = Rng::new(2);
        let xs = random_spectrum(8, &mut rng);
        let s = sufficient_stats(&xs, &xs, 0);
        assert!((s.rho_r[0] - s.rho_xx).abs() < 1e-12);
        assert!(s.rho_i[0].abs() < 1e-12);
    }

    #[test]
    fn type_membership_is_reflexive() {
        let mut rng = Rng::new(3);
        let xs = random_spectrum(6, &mut rng);
        let ys = random_spectrum(6, &mut rng);
        let s = sufficient_stats(&xs, &ys, 1);
        assert!(in_conditional_type(&xs, &s, &ys, 1, 1e-9));
    }

    #[test]
    fn membership_is_symmetric() {
        let mut rng = Rng::new(4);
        let ys = random_spectrum(6, &mut rng);
        let a = random_spectrum(6, &mut rng);
        let b = random_spectrum(6, &mut rng);
        let sa = sufficient_stats(&a, &ys, 1);
        let sb = sufficient_stats(&b, &ys, 1);
        for eps in [0.1, 0.5, 2.0, 10.0] {
            assert_eq!(
                in_conditional_type(&b, &sa, &ys, 1, eps),
                in_conditional_type(&a, &sb, &ys, 1, eps)
            );
        }
    }

    #[test]
    fn perturbed_bin_leaves_small_type() {
        let n = 8;
        let mut rng = Rng::new(5);
        let xs = random_spectrum(n, &mut rng);
        let ys = random_spectrum(n, &mut rng);
        let s = sufficient_stats(&xs, &ys, 0);
        let eps = 0.01;
        let mut bins = xs.bins().to_vec();
        bins[3] += Complex64::new(10.0 * eps * libm::sqrt(n as f64), 0.0);
        let candidate = ComplexSpectrum::from_bins(bins).unwrap();
        assert!(!in_conditional_type(&candidate, &s, &ys, 0, eps));
    }

    #[test]
    fn infinite_eps_is_vacuous() {
        let mut rng = Rng::new(6);
        let xs = random_spectrum(4, &mut rng);
        let ys = random_spectrum(4, &mut rng);
        let other = random_spectrum(4, &mut rng);
        let s = sufficient_stats(&xs, &ys, 1);
        assert!(in_conditional_type(&other, &s, &ys, 1, f64::INFINITY));
    }

    #[test]
    fn hn_rejects_perfect_fit() {
        let cfg = EnsembleConfig::new(8, 0.125, 1.0, 0.1).unwrap();
        let mut rng = Rng::new(7);
        let x = crate::ensemble::sample_codeword(&cfg, &mut rng).unwrap();
        let xs = dft(&x);
        // y = x: the order-0 fit is exact, σ̂₀² = 0 < 1/B for every finite B.
        assert!(!in_hn(&xs, &xs, 1e9, &cfg, 0));
    }

    #[test]
    fn hn_rejects_off_shell_input() {
        let cfg = EnsembleConfig::new(4, 0.125, 1.0, 0.1).unwrap();
        let x = RealSignal::new(vec![10.0, 0.0, 0.0, 0.0]).unwrap();
        let xs = dft(&x);
        let mut rng = Rng::new(8);
        let ys = random_spectrum(4, &mut rng);
        assert!(!in_hn(&xs, &ys, 1e9, &cfg, 0));
    }

    #[test]
    fn volume_guards() {
        let mut rng = Rng::new(9);
        let xs = random_spectrum(16, &mut rng);
        let ys = random_spectrum(16, &mut rng);
        assert!(matches!(
            estimate_type_volume(&xs, &ys, 0, 0.3, 20_000, &mut rng),
            Err(CoreError::InvalidInput { .. })
        ));
        let xs2 = random_spectrum(2, &mut rng);
        let ys2 = random_spectrum(2, &mut rng);
        assert!(matches!(
            estimate_type_volume(&xs2, &ys2, 0, 0.3, 100, &mut rng),
            Err(CoreError::InvalidInput { .. })
        ));
    }

    #[test]
    fn degenerate_reference_is_refused() {
        // ỹ = 0 makes the Gram singular; the estimator must refuse.
        let xs = spectrum(&[(1.0, 0.0), (0.5, 0.5)]);
        let ys = spectrum(&[(0.0, 0.0), (0.0, 0.0)]);
        let mut rng = Rng::new(10);
        assert!(estimate_type_volume(&xs, &ys, 0, 0.3, 10_000, &mut rng).is_err());
    }

    #[test]
    fn bracket_vacuous_iff_concentration_fails() {
        // (2k+12) B² / (n ε²) >= 1 at these values.
        let b = 2.0;
        let vb = volume_bracket(1.0, 2, 0, 0.3, b, 1.0, 0.1);
        assert!(vb.is_vacuous());
        // Small B and large eps make the factor positive.
        let vb2 = volume_bracket(1.0, 2, 0, 2.5, 1.01, 0.95, 0.1);
        assert!(!vb2.is_vacuous());
        assert!(vb2.log_lower.unwrap() <= vb2.log_upper);
    }
}
