//! Verification oracles and property suites.
//!
//! The oracles here deliberately avoid the library's internal code paths:
//! the least-squares oracle assembles dense normal equations from the design
//! matrix and solves them by Gaussian elimination, the singular-value oracle
//! diagonalizes the Gram matrix `AᵀA` with its own Jacobi loop, and the
//! volume oracle is plain hit-or-miss integration over a bounding box. The
//! `check_*` wrappers run each suite at default sizes for the `verify` CLI
//! subcommand; the acceptance tests call the primitives with their own pinned
//! parameters.

use isidec_core::channel::{transmit, ChannelParams};
use isidec_core::decoder::{fit_backward, ml_log_likelihood, residual_identity_value};
use isidec_core::ensemble::sample_codeword;
use isidec_core::rng::derive;
use isidec_core::spectral::{dft, szego_gap, Complex64, ComplexSpectrum, DftPlan};
use isidec_core::typicality::{
    estimate_type_volume, in_conditional_type, sufficient_stats, volume_bracket, SufficientStats,
};
use isidec_core::{EnsembleConfig, RealSignal, Rng};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// One verification outcome, formatted as a pass/fail line.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Dense least-squares oracle: assembles `GᴴG θ = Gᴴx̃` from the explicit
/// design matrix and solves by Gaussian elimination with partial pivoting.
/// Returns `(θ, residual/n)`.
pub fn dense_ls_residual(
    xs: &[Complex64],
    ys: &[Complex64],
    k: usize,
    basis: &[Vec<Complex64>],
) -> (Vec<Complex64>, f64) {
    let n = xs.len();
    let d = k + 1 + basis.len();
    let mut g = vec![vec![Complex64::new(0.0, 0.0); n]; d];
    for (l, col) in g.iter_mut().take(k + 1).enumerate() {
        for (m, entry) in col.iter_mut().enumerate() {
            let theta = TWO_PI * (m as f64) * (l as f64) / n as f64;
            *entry = ys[m] * Complex64::new(theta.cos(), theta.sin());
        }
    }
    for (i, phi) in basis.iter().enumerate() {
        g[k + 1 + i] = phi.clone();
    }
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    let mut rhs = vec![Complex64::new(0.0, 0.0); d];
    for a in 0..d {
        for b in 0..d {
            gram[a][b] = (0..n).map(|m| g[a][m].conj() * g[b][m]).sum();
        }
        rhs[a] = (0..n).map(|m| g[a][m].conj() * xs[m]).sum();
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&i, &j| {
                gram[i][col]
                    .norm_sqr()
                    .partial_cmp(&gram[j][col].norm_sqr())
                    .unwrap()
            })
            .unwrap();
        gram.swap(col, pivot);
        rhs.swap(col, pivot);
        let diag = gram[col][col];
        assert!(diag.norm_sqr() > 0.0, "oracle system is singular");
        for row in col + 1..d {
            let factor = gram[row][col] / diag;
            for c in col..d {
                let v = gram[col][c];
                gram[row][c] -= factor * v;
            }
            let bv = rhs[col];
            rhs[row] -= factor * bv;
        }
    }
    let mut theta = vec![Complex64::new(0.0, 0.0); d];
    for row in (0..d).rev() {
        let mut acc = rhs[row];
        for c in row + 1..d {
            acc -= gram[row][c] * theta[c];
        }
        theta[row] = acc / gram[row][row];
    }
    let mut resid = 0.0;
    for m in 0..n {
        let mut model = Complex64::new(0.0, 0.0);
        for (a, th) in theta.iter().enumerate() {
            model += th * g[a][m];
        }
        resid += (xs[m] - model).norm_sqr();
    }
    (theta, resid / n as f64)
}

/// Independent singular-value route: eigenvalues of the Gram matrix `AᵀA`
/// of the banded Toeplitz operator, by a self-contained two-sided Jacobi
/// sweep. Returns square roots in ascending order.
pub fn gram_singular_values_oracle(h: &[f64], n: usize) -> Vec<f64> {
    // Dense A (row-major) and its Gram.
    let mut a = vec![vec![0.0f64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        for (idx, &tap) in h.iter().enumerate() {
            if i >= idx {
                row[i - idx] = tap;
            }
        }
    }
    let mut gram = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i..n {
            let dot: f64 = (0..n).map(|r| a[r][i] * a[r][j]).sum();
            gram[i][j] = dot;
            gram[j][i] = dot;
        }
    }
    // Two-sided Jacobi on the symmetric Gram.
    for _ in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(gram[i][j].abs());
            }
        }
        let scale = (0..n).map(|i| gram[i][i].abs()).fold(1e-300, f64::max);
        if off <= 1e-13 * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = gram[p][q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (gram[q][q] - gram[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let gip = gram[i][p];
                    let giq = gram[i][q];
                    gram[i][p] = c * gip - s * giq;
                    gram[i][q] = s * gip + c * giq;
                }
                for i in 0..n {
                    let gpi = gram[p][i];
                    let gqi = gram[q][i];
                    gram[p][i] = c * gpi - s * gqi;
                    gram[q][i] = s * gpi + c * gqi;
                }
            }
        }
    }
    let mut sv: Vec<f64> = (0..n).map(|i| gram[i][i].max(0.0).sqrt()).collect();
    sv.sort_by(|x, y| x.partial_cmp(y).unwrap());
    sv
}

/// Hit-or-miss volume oracle over the bounding box `[-r, r]^{2n}` with
/// `r = sqrt(n(ρ_xx + ε))`, which contains the type via its energy
/// constraint. Returns `(volume, standard error)`.
pub fn hit_or_miss_volume(
    ref_xs: &ComplexSpectrum,
    ys: &ComplexSpectrum,
    k: usize,
    eps: f64,
    samples: u64,
    rng: &mut Rng,
) -> (f64, f64) {
    let n = ref_xs.len();
    let stats = sufficient_stats(ref_xs, ys, k);
    let r = (n as f64 * (stats.rho_xx + eps)).sqrt();
    let box_volume = (2.0 * r).powi(2 * n as i32);
    let mut hits = 0u64;
    let mut bins = Vec::with_capacity(n);
    for _ in 0..samples {
        bins.clear();
        for _ in 0..n {
            bins.push(Complex64::new(
                r * (2.0 * rng.uniform() - 1.0),
                r * (2.0 * rng.uniform() - 1.0),
            ));
        }
        let candidate = ComplexSpectrum::from_bins(bins.clone()).expect("finite");
        if in_conditional_type(&candidate, &stats, ys, k, eps) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (
        box_volume * p,
        box_volume * (p * (1.0 - p) / samples as f64).sqrt(),
    )
}

// ---------------------------------------------------------------------------
// Stat-steered sampling of conditional-type members
// ---------------------------------------------------------------------------

/// Draws real signals whose spectra lie in `T_ε^k(x̃|ỹ)`, steering each draw
/// toward a uniformly random point of the stat box so the type is exercised
/// out to its boundary at every block length.
///
/// The steering directions are the time-domain counterparts of the modulated
/// columns `d^l_m = ỹ_m e^{j2πlm/n}` (conjugate-symmetric, hence real in
/// time), whose effect on the cross statistics is exactly linear; energy is
/// then matched by rescaling and membership is enforced by rejection.
pub struct TypeSampler {
    x: RealSignal,
    ys: ComplexSpectrum,
    k: usize,
    eps: f64,
    stats: SufficientStats,
    directions: Vec<RealSignal>,
    response: Vec<Vec<f64>>, // response[l'][l] = ∂ρ_R^{l'} / ∂c_l
}

impl TypeSampler {
    pub fn new(x: RealSignal, y: &RealSignal, k: usize, eps: f64) -> Self {
        let n = x.len();
        let plan = DftPlan::new(n);
        let ys = plan.forward_real(y);
        let xs = plan.forward_real(&x);
        let stats = sufficient_stats(&xs, &ys, k);
        // Band values c_d = Σ_m |ỹ_m|² e^{j2πmd/n}.
        let band: Vec<Complex64> = (0..=k)
            .map(|d| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, yb) in ys.bins().iter().enumerate() {
                    acc += yb.norm_sqr() * plan.twiddle(m * d).conj();
                }
                acc
            })
            .collect();
        let mut response = vec![vec![0.0; k + 1]; k + 1];
        for lp in 0..=k {
            for l in 0..=k {
                let c = if l >= lp {
                    band[l - lp]
                } else {
                    band[lp - l].conj()
                };
                response[lp][l] = c.re / n as f64;
            }
        }
        let directions: Vec<RealSignal> = (0..=k)
            .map(|l| {
                let bins: Vec<Complex64> = ys
                    .bins()
                    .iter()
                    .enumerate()
                    .map(|(m, yb)| yb * plan.twiddle(m * l).conj())
                    .collect();
                let time = plan.inverse_complex(&bins);
                RealSignal::new(time.iter().map(|z| z.re).collect()).expect("finite")
            })
            .collect();
        TypeSampler {
            x,
            ys,
            k,
            eps,
            stats,
            directions,
            response,
        }
    }

    pub fn reference_stats(&self) -> &SufficientStats {
        &self.stats
    }

    /// One steered draw; `None` when the proposal missed the type.
    pub fn draw(&self, rng: &mut Rng) -> Option<RealSignal> {
        let n = self.x.len();
        let k = self.k;
        // Random target deviations inside 80% of the stat box.
        let t_xx = (2.0 * rng.uniform() - 1.0) * 0.8 * self.eps;
        let targets: Vec<f64> = (0..=k)
            .map(|_| (2.0 * rng.uniform() - 1.0) * 0.8 * self.eps)
            .collect();
        // Solve response · c = targets (tiny real system, Gaussian elim).
        let mut mat = self.response.clone();
        let mut rhs = targets;
        for col in 0..=k {
            let pivot = (col..=k)
                .max_by(|&i, &j| mat[i][col].abs().partial_cmp(&mat[j][col].abs()).unwrap())?;
            mat.swap(col, pivot);
            rhs.swap(col, pivot);
            if mat[col][col].abs() < 1e-12 {
                return None;
            }
            for row in col + 1..=k {
                let f = mat[row][col] / mat[col][col];
                for c in col..=k {
                    mat[row][c] -= f * mat[col][c];
                }
                rhs[row] -= f * rhs[col];
            }
        }
        let mut coeffs = vec![0.0; k + 1];
        for row in (0..=k).rev() {
            let mut acc = rhs[row];
            for c in row + 1..=k {
                acc -= mat[row][c] * coeffs[c];
            }
            coeffs[row] = acc / mat[row][row];
        }
        // Steered proposal plus a small diffuse component.
        let s = 0.05 * self.eps.sqrt();
        let mut u: Vec<f64> = self
            .x
            .samples()
            .iter()
            .enumerate()
            .map(|(t, &xv)| {
                let mut v = xv + s * rng.standard_normal();
                for (c, dir) in coeffs.iter().zip(&self.directions) {
                    v += c * dir.samples()[t];
                }
                v
            })
            .collect();
        // Match the energy target by rescaling.
        let energy: f64 = u.iter().map(|v| v * v).sum();
        let target_energy = (self.stats.rho_xx + t_xx) * n as f64;
        if energy <= 0.0 {
            return None;
        }
        let gamma = (target_energy / energy).sqrt();
        for v in u.iter_mut() {
            *v *= gamma;
        }
        let u = RealSignal::new(u).ok()?;
        let us = dft(&u);
        if in_conditional_type(&us, &self.stats, &self.ys, k, self.eps) {
            Some(u)
        } else {
            None
        }
    }
}

/// Empirical equivalence constant at block length `n`: per independent
/// channel draw, the largest `|n^{-1} log W(y|u) - n^{-1} log W(y|v)| / ε`
/// over sampled pairs of type members, averaged over the draws. Averaging
/// over instances keeps one lucky channel realization from skewing the
/// estimate either way.
pub fn equivalence_constant(
    n: usize,
    eps: f64,
    pairs: u32,
    params: &ChannelParams,
    sigma_x_sq: f64,
    seed: u64,
) -> f64 {
    let cfg = EnsembleConfig::new(n, 0.0, sigma_x_sq, 0.1).expect("valid ensemble");
    let k = params.memory();
    let instances = 8;
    let mut sum = 0.0f64;
    for instance in 0..instances {
        let mut rng = Rng::new(derive(derive(seed, n as u64), instance));
        let x = sample_codeword(&cfg, &mut rng).expect("sampling feasible");
        let y = transmit(&x, params, &mut rng);
        let sampler = TypeSampler::new(x, &y, k, eps);
        let mut worst = 0.0f64;
        let mut collected = 0u32;
        let mut guard = 0u32;
        while collected < pairs && guard < 50 * pairs {
            guard += 1;
            let Some(u) = sampler.draw(&mut rng) else {
                continue;
            };
            let Some(v) = sampler.draw(&mut rng) else {
                continue;
            };
            let du = ml_log_likelihood(&y, &u, params) / n as f64;
            let dv = ml_log_likelihood(&y, &v, params) / n as f64;
            worst = worst.max((du - dv).abs());
            collected += 1;
        }
        assert!(
            collected == pairs,
            "type sampler starved: {collected}/{pairs} pairs"
        );
        sum += worst;
    }
    sum / (instances as f64 * eps)
}

// ---------------------------------------------------------------------------
// Check wrappers (CLI `verify`)
// ---------------------------------------------------------------------------

fn random_spectrum(n: usize, rng: &mut Rng) -> ComplexSpectrum {
    ComplexSpectrum::from_bins(
        (0..n)
            .map(|_| Complex64::new(rng.standard_normal(), rng.standard_normal()))
            .collect(),
    )
    .expect("finite")
}

pub fn check_residual_identity(instances: u32, seed: u64) -> Check {
    let mut rng = Rng::new(derive(seed, 1));
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let n = 2 + (rng.next_u64() % 255) as usize;
        let k = (rng.next_u64() % 4).min(n as u64 - 1) as usize;
        let xs = random_spectrum(n, &mut rng);
        let ys = random_spectrum(n, &mut rng);
        let fit = fit_backward(&xs, &ys, k).expect("generic instance fits");
        let identity = residual_identity_value(&xs, &ys, fit.alphas());
        let rel = (fit.sigma0_sq() - identity).abs() / fit.sigma0_sq().max(1.0);
        worst = worst.max(rel);
    }
    Check {
        name: "residual-identity".into(),
        passed: worst <= 1e-9,
        detail: format!("worst relative deviation {worst:.3e} over {instances} instances"),
    }
}

pub fn check_probe_optimality(instances: u32, probes: u32, seed: u64) -> Check {
    let mut rng = Rng::new(derive(seed, 2));
    let mut worst_gap = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for _ in 0..instances {
        let n = 3 + (rng.next_u64() % 62) as usize;
        let k = (rng.next_u64() % 4).min(n as u64 - 2) as usize;
        let xs = random_spectrum(n, &mut rng);
        let ys = random_spectrum(n, &mut rng);
        let fit = fit_backward(&xs, &ys, k).expect("generic instance fits");
        let (_, oracle_resid) = dense_ls_residual(xs.bins(), ys.bins(), k, &[]);
        worst_oracle =
            worst_oracle.max((fit.sigma0_sq() - oracle_resid).abs() / oracle_resid.max(1.0));
        let plan = DftPlan::new(n);
        for _ in 0..probes {
            let scale = 10f64.powf(rng.uniform() * 4.0 - 3.0);
            let probe: Vec<Complex64> = fit
                .alphas()
                .iter()
                .map(|a| {
                    a + Complex64::new(scale * rng.standard_normal(), scale * rng.standard_normal())
                })
                .collect();
            let mut resid = 0.0;
            for (m, (xb, yb)) in xs.bins().iter().zip(ys.bins()).enumerate() {
                let mut am = Complex64::new(0.0, 0.0);
                for (l, al) in probe.iter().enumerate() {
                    am += al * plan.twiddle(m * l).conj();
                }
                resid += (xb - yb * am).norm_sqr();
            }
            let probe_sigma = resid / n as f64;
            worst_gap = worst_gap.max(fit.sigma0_sq() - probe_sigma);
        }
    }
    Check {
        name: "normal-equation-optimality".into(),
        passed: worst_gap <= 1e-12 && worst_oracle <= 1e-9,
        detail: format!(
            "max(fit - probe) = {worst_gap:.3e}, worst oracle deviation {worst_oracle:.3e}"
        ),
    }
}

pub fn check_coefficient_bound(instances: u32, seed: u64) -> Check {
    let tau = 0.1;
    let delta = 0.1;
    let sigma_x_sq = 1.0;
    let mut rng = Rng::new(derive(seed, 3));
    let bound = sigma_x_sq * (1.0 + delta) / tau * (1.0 + 1e-6);
    let mut violations = 0u32;
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let n = 8 + (rng.next_u64() % 121) as usize;
        let k = (rng.next_u64() % 4) as usize;
        let cfg = EnsembleConfig::new(n, 0.0, sigma_x_sq, delta).expect("valid");
        let x = sample_codeword(&cfg, &mut rng).expect("feasible");
        let xs = dft(&x);
        let ys = ComplexSpectrum::from_bins(
            (0..n)
                .map(|_| loop {
                    let z = Complex64::new(rng.standard_normal(), rng.standard_normal());
                    if z.norm_sqr() >= tau {
                        break z;
                    }
                })
                .collect(),
        )
        .expect("finite");
        let fit = fit_backward(&xs, &ys, k).expect("fits");
        worst = worst.max(fit.alpha_norm_sq());
        if fit.alpha_norm_sq() > bound {
            violations += 1;
        }
    }
    Check {
        name: "coefficient-bound".into(),
        passed: violations == 0,
        detail: format!(
            "{violations} violations over {instances} instances (worst Σ|α|² = {worst:.4}, bound {bound:.4})"
        ),
    }
}

pub fn check_szego() -> Check {
    let h = [1.0, 0.5, 0.25];
    let mut gaps = Vec::new();
    for &n in &[32usize, 64, 128, 256, 512] {
        match szego_gap(&h, n) {
            Ok(g) => gaps.push((n, g)),
            Err(e) => {
                return Check {
                    name: "szego-gap".into(),
                    passed: false,
                    detail: format!("singular values failed at n = {n}: {e}"),
                }
            }
        }
    }
    let monotone = gaps.windows(2).all(|w| w[1].1 <= w[0].1 * 1.05);
    let below = gaps
        .iter()
        .find(|(n, _)| *n == 256)
        .map(|&(_, g)| g < 0.1)
        .unwrap_or(false);
    // Cross-check small sizes against the Gram-eigenvalue oracle.
    let mut oracle_ok = true;
    for &n in &[32usize, 64] {
        let lib = isidec_core::ToeplitzOperator::new(h.to_vec(), n)
            .unwrap()
            .singular_values()
            .unwrap();
        let oracle = gram_singular_values_oracle(&h, n);
        let worst = lib
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if worst > 1e-8 {
            oracle_ok = false;
        }
    }
    Check {
        name: "szego-gap".into(),
        passed: monotone && below && oracle_ok,
        detail: format!(
            "gaps {:?}, monotone = {monotone}, gap(256) < 0.1 = {below}, oracle agreement = {oracle_ok}",
            gaps.iter().map(|&(n, g)| format!("{n}:{g:.4}")).collect::<Vec<_>>()
        ),
    }
}

pub fn check_hn_rarity(draws: u32, seed: u64) -> Check {
    // B = 20 (σ_x² ‖h‖₁² + σ²): comfortably above typical output energies.
    let n = 64;
    let sigma_x_sq = 1.0;
    let h: Vec<f64> = vec![1.0, 0.5];
    let noise_var = 0.4;
    let h_l1: f64 = h.iter().map(|v| v.abs()).sum();
    let b = 20.0 * (sigma_x_sq * h_l1 * h_l1 + noise_var);
    let cfg = EnsembleConfig::new(n, 0.0, sigma_x_sq, 0.1).expect("valid");
    let params = ChannelParams::new(h, noise_var).expect("valid");
    let mut rng = Rng::new(derive(seed, 4));
    let mut complement = 0u32;
    for _ in 0..draws {
        let x = sample_codeword(&cfg, &mut rng).expect("feasible");
        let y = transmit(&x, &params, &mut rng);
        if !isidec_core::typicality::in_hn(&dft(&x), &dft(&y), b, &cfg, 1) {
            complement += 1;
        }
    }
    let freq = f64::from(complement) / f64::from(draws);
    Check {
        name: "hn-complement-rarity".into(),
        passed: freq < 1e-3,
        detail: format!("frequency of complement {freq:.2e} over {draws} draws (B = {b:.1})"),
    }
}

/// Outcome of the volume cross-check, exposed for the acceptance suite.
#[derive(Debug, Clone)]
pub struct VolumeCrossCheck {
    pub is_volume: f64,
    pub is_se: f64,
    pub hom_volume: f64,
    pub hom_se: f64,
    pub agrees_3se: bool,
    pub natural_bracket_vacuous: bool,
    pub natural_in_bracket: bool,
    pub crafted_in_bracket: bool,
    pub sigma0_sq: f64,
}

/// The volume cross-check at `n = 2, k = 0, ε = 0.3`.
///
/// The generic instance draws `x` and `y` independently from the shell,
/// retrying until the pair lies in the event set `H_n(B = 3)` — in-shell
/// input, bounded output energy, non-degenerate fit. The volume machinery is
/// only claimed on that event; outside it (σ̂₀² near zero) the importance
/// weights grow so heavy-tailed at n = 2 that their sample standard error
/// stops being trustworthy. The analytical bracket at the smallest
/// `H_n`-valid `B` is vacuous at this ε (its concentration factor needs
/// `ε > √6·B` with `B ≥ 1`); containment is exercised on a crafted
/// instance with `σ̂₀² = 1`, tiny output energy, and ε = 2.8, where the
/// bracket is nonvacuous.
pub fn volume_cross_check(is_samples: u64, hom_samples: u64, seed: u64) -> VolumeCrossCheck {
    let n = 2;
    let eps = 0.3;
    let sigma_x_sq = 1.0;
    let delta = 0.1;
    let cfg = EnsembleConfig::new(n, 0.0, sigma_x_sq, delta).expect("valid");
    let mut rng = Rng::new(derive(seed, 5));
    let (xs, ys) = {
        let mut attempt = 0;
        loop {
            let x = sample_codeword(&cfg, &mut rng).expect("feasible");
            let y = sample_codeword(&cfg, &mut rng).expect("feasible");
            let (xs, ys) = (dft(&x), dft(&y));
            if isidec_core::typicality::in_hn(&xs, &ys, 3.0, &cfg, 0) {
                break (xs, ys);
            }
            attempt += 1;
            assert!(attempt < 1000, "no H_n member found");
        }
    };

    let est = estimate_type_volume(&xs, &ys, 0, eps, is_samples, &mut Rng::new(derive(seed, 6)))
        .expect("generic instance estimates");
    let (hom, hom_se) = hit_or_miss_volume(
        &xs,
        &ys,
        0,
        eps,
        hom_samples,
        &mut Rng::new(derive(seed, 7)),
    );
    let combined = (est.std_error.powi(2) + hom_se.powi(2)).sqrt();
    let agrees_3se = (est.volume() - hom).abs() <= 3.0 * combined;

    // Natural bracket at the smallest B making the instance an H_n member.
    let fit = fit_backward(&xs, &ys, 0).expect("fits");
    let b_natural = (ys.energy() / n as f64).max(1.0 / fit.sigma0_sq()) * 1.001;
    let natural = volume_bracket(fit.sigma0_sq(), n, 0, eps, b_natural, sigma_x_sq, delta);
    let natural_in_bracket = match natural.log_lower {
        Some(lo) => est.log_volume >= lo && est.log_volume <= natural.log_upper,
        None => true, // vacuous: nothing to contain
    };

    // Crafted instance with a nonvacuous bracket: x̃ orthogonal to the
    // modulated output column, unit residual variance, weak output.
    let crafted_xs =
        ComplexSpectrum::from_bins(vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)])
            .expect("finite");
    let crafted_ys =
        ComplexSpectrum::from_bins(vec![Complex64::new(0.3, 0.0), Complex64::new(0.3, 0.0)])
            .expect("finite");
    let crafted_eps = 2.8;
    let crafted_fit = fit_backward(&crafted_xs, &crafted_ys, 0).expect("fits");
    let crafted_b = (1.0 / crafted_fit.sigma0_sq())
        .max(crafted_ys.energy() / n as f64)
        .max(crafted_fit.sigma0_sq())
        * 1.02;
    let bracket = volume_bracket(
        crafted_fit.sigma0_sq(),
        n,
        0,
        crafted_eps,
        crafted_b,
        sigma_x_sq,
        delta,
    );
    let crafted_est = estimate_type_volume(
        &crafted_xs,
        &crafted_ys,
        0,
        crafted_eps,
        is_samples,
        &mut Rng::new(derive(seed, 8)),
    )
    .expect("crafted instance estimates");
    let crafted_in_bracket = match bracket.log_lower {
        Some(lo) => crafted_est.log_volume >= lo && crafted_est.log_volume <= bracket.log_upper,
        None => false, // crafted to be nonvacuous; vacuity here is a failure
    };

    VolumeCrossCheck {
        is_volume: est.volume(),
        is_se: est.std_error,
        hom_volume: hom,
        hom_se,
        agrees_3se,
        natural_bracket_vacuous: natural.is_vacuous(),
        natural_in_bracket,
        crafted_in_bracket,
        sigma0_sq: fit.sigma0_sq(),
    }
}

pub fn check_volume(is_samples: u64, hom_samples: u64, seed: u64) -> Check {
    let v = volume_cross_check(is_samples, hom_samples, seed);
    Check {
        name: "type-volume".into(),
        passed: v.agrees_3se && v.natural_in_bracket && v.crafted_in_bracket,
        detail: format!(
            "IS {:.4} vs hit-or-miss {:.4} (3σ = {:.4}); natural bracket {}; crafted bracket contained = {}",
            v.is_volume,
            v.hom_volume,
            3.0 * (v.is_se.powi(2) + v.hom_se.powi(2)).sqrt(),
            if v.natural_bracket_vacuous { "vacuous at ε = 0.3" } else { "containment checked" },
            v.crafted_in_bracket
        ),
    }
}

pub fn check_equivalence(pairs: u32, eps: f64, seed: u64) -> Check {
    let params = ChannelParams::new(vec![1.0, 0.5], 0.5).expect("valid");
    let cs: Vec<(usize, f64)> = [64usize, 128, 256]
        .iter()
        .map(|&n| (n, equivalence_constant(n, eps, pairs, &params, 1.0, seed)))
        .collect();
    let mean = cs.iter().map(|&(_, c)| c).sum::<f64>() / cs.len() as f64;
    let stable = cs.iter().all(|&(_, c)| (c - mean).abs() <= 0.25 * mean);
    Check {
        name: "log-likelihood-equivalence".into(),
        passed: stable,
        detail: format!(
            "c per n: {:?}, mean {mean:.3}, stable ±25% = {stable}",
            cs.iter()
                .map(|&(n, c)| format!("{n}:{c:.3}"))
                .collect::<Vec<_>>()
        ),
    }
}

/// Runs every suite; `quick` shrinks the sample sizes by roughly 10x.
pub fn run_all(seed: u64, quick: bool) -> Vec<Check> {
    let f = if quick { 1 } else { 10 };
    vec![
        check_residual_identity(1000 * f, seed),
        check_probe_optimality(20 * f, 100, seed),
        check_coefficient_bound(1000 * f, seed),
        check_szego(),
        check_hn_rarity(10_000 * f, seed),
        check_volume(20_000 * f as u64, 200_000 * f as u64, seed),
        check_equivalence(40 * f, 0.1, seed),
    ]
}
