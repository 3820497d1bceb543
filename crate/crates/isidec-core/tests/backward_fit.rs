//! Least-squares fit checks: residual identity, normal-equation
//! orthogonality, probe optimality, the coefficient bound, and agreement with
//! the dense least-squares oracle.

mod common;

use common::{dense_ls_oracle, random_complex_vec, TWO_PI};
use isidec_core::decoder::{
    fit_backward, fit_backward_with_interference, fit_backward_with_options,
    residual_identity_value, FitOptions,
};
use isidec_core::spectral::{Complex64, ComplexSpectrum};
use isidec_core::{CoreError, Rng};

fn spectrum(bins: Vec<Complex64>) -> ComplexSpectrum {
    ComplexSpectrum::from_bins(bins).unwrap()
}

fn random_instance(rng: &mut Rng, n: usize) -> (ComplexSpectrum, ComplexSpectrum) {
    (
        spectrum(random_complex_vec(n, rng)),
        spectrum(random_complex_vec(n, rng)),
    )
}

#[test]
fn residual_identity_holds_on_random_instances() {
    let mut rng = Rng::new(201);
    for trial in 0..2000 {
        let n = 2 + (rng.next_u64() % 255) as usize;
        let k = (rng.next_u64() % 4).min(n as u64 - 1) as usize;
        let (xs, ys) = random_instance(&mut rng, n);
        let fit = fit_backward(&xs, &ys, k).unwrap();
        let identity = residual_identity_value(&xs, &ys, fit.alphas());
        let tol = 1e-9 * fit.sigma0_sq().max(1.0);
        assert!(
            (fit.sigma0_sq() - identity).abs() <= tol,
            "trial {trial}: direct {} vs identity {identity}",
            fit.sigma0_sq()
        );
        assert!(fit.sigma0_sq() >= 0.0);
    }
}

#[test]
fn normal_equation_orthogonality() {
    let mut rng = Rng::new(202);
    for _ in 0..200 {
        let n = 4 + (rng.next_u64() % 61) as usize;
        let k = (rng.next_u64() % 4).min(n as u64 - 1) as usize;
        let (xs, ys) = random_instance(&mut rng, n);
        let fit = fit_backward(&xs, &ys, k).unwrap();
        // Residual r_m = x̃_m - ỹ_m A(m) must be orthogonal to every
        // modulated column ỹ_m e^{j2πmq/n}.
        let resid: Vec<Complex64> = (0..n)
            .map(|m| {
                let mut a = Complex64::new(0.0, 0.0);
                for (l, al) in fit.alphas().iter().enumerate() {
                    let theta = TWO_PI * (m as f64) * (l as f64) / n as f64;
                    a += al * Complex64::new(theta.cos(), theta.sin());
                }
                xs.bins()[m] - ys.bins()[m] * a
            })
            .collect();
        let scale = (xs.energy() * ys.energy()).sqrt().max(1e-30);
        for q in 0..=k {
            let mut dot = Complex64::new(0.0, 0.0);
            for (m, r) in resid.iter().enumerate() {
                let theta = TWO_PI * (m as f64) * (q as f64) / n as f64;
                let col = ys.bins()[m] * Complex64::new(theta.cos(), theta.sin());
                dot += r * col.conj();
            }
            assert!(
                dot.norm_sqr().sqrt() <= 1e-8 * scale,
                "lag {q}: residual not orthogonal ({})",
                dot.norm_sqr().sqrt()
            );
        }
    }
}

#[test]
fn fitted_residual_beats_random_probes() {
    let mut rng = Rng::new(203);
    for _ in 0..50 {
        let n = 4 + (rng.next_u64() % 61) as usize;
        let k = (rng.next_u64() % 4).min(n as u64 - 1) as usize;
        let (xs, ys) = random_instance(&mut rng, n);
        let fit = fit_backward(&xs, &ys, k).unwrap();
        for _ in 0..200 {
            let scale = 10f64.powf(rng.uniform() * 4.0 - 3.0); // 1e-3 .. 10
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
                    let theta = TWO_PI * (m as f64) * (l as f64) / n as f64;
                    am += al * Complex64::new(theta.cos(), theta.sin());
                }
                resid += (xb - yb * am).norm_sqr();
            }
            let probe_sigma = resid / n as f64;
            assert!(
                fit.sigma0_sq() <= probe_sigma + 1e-12 * probe_sigma.max(1.0),
                "probe beat the fit: {} < {}",
                probe_sigma,
                fit.sigma0_sq()
            );
        }
    }
}

#[test]
fn matches_dense_least_squares_oracle() {
    let mut rng = Rng::new(204);
    for _ in 0..100 {
        let n = 3 + (rng.next_u64() % 62) as usize;
        let k = (rng.next_u64() % 4).min(n as u64 - 2) as usize;
        let (xs, ys) = random_instance(&mut rng, n);
        let fit = fit_backward(&xs, &ys, k).unwrap();
        let (theta, oracle_resid) = dense_ls_oracle(xs.bins(), ys.bins(), k, &[]);
        assert!(
            (fit.sigma0_sq() - oracle_resid).abs() <= 1e-9 * oracle_resid.max(1.0),
            "residuals differ: {} vs oracle {oracle_resid}",
            fit.sigma0_sq()
        );
        for (a, t) in fit.alphas().iter().zip(&theta) {
            assert!((a - t).norm_sqr().sqrt() < 1e-7 * (1.0 + t.norm_sqr().sqrt()));
        }
    }
}

#[test]
fn interference_fit_matches_stacked_oracle() {
    let mut rng = Rng::new(205);
    for _ in 0..50 {
        let n = 6 + (rng.next_u64() % 59) as usize;
        let k = (rng.next_u64() % 3) as usize;
        let q = 1 + (rng.next_u64() % 2) as usize;
        let (xs, ys) = random_instance(&mut rng, n);
        let basis: Vec<ComplexSpectrum> = (0..q)
            .map(|_| spectrum(random_complex_vec(n, &mut rng)))
            .collect();
        let fit = fit_backward_with_interference(&xs, &ys, k, &basis).unwrap();
        let basis_bins: Vec<Vec<Complex64>> = basis.iter().map(|s| s.bins().to_vec()).collect();
        let (_, oracle_resid) = dense_ls_oracle(xs.bins(), ys.bins(), k, &basis_bins);
        assert!(
            (fit.sigma0_sq() - oracle_resid).abs() <= 1e-9 * oracle_resid.max(1.0),
            "joint residuals differ: {} vs oracle {oracle_resid}",
            fit.sigma0_sq()
        );
        assert_eq!(fit.betas().unwrap().len(), q);
    }
}

#[test]
fn coefficient_bound_under_bin_energy_floor() {
    let tau = 0.1;
    let delta = 0.1;
    let sigma_x_sq = 1.0;
    let cfg = isidec_core::EnsembleConfig::new(32, 0.125, sigma_x_sq, delta).unwrap();
    let mut rng = Rng::new(206);
    let bound = sigma_x_sq * (1.0 + delta) / tau * (1.0 + 1e-6);
    for _ in 0..500 {
        let k = (rng.next_u64() % 4) as usize;
        let x = isidec_core::ensemble::sample_codeword(&cfg, &mut rng).unwrap();
        let xs = isidec_core::spectral::dft(&x);
        // Output bins rejected below the energy floor τ.
        let ys = spectrum(
            (0..32)
                .map(|_| loop {
                    let z = Complex64::new(rng.standard_normal(), rng.standard_normal());
                    if z.norm_sqr() >= tau {
                        break z;
                    }
                })
                .collect(),
        );
        let fit = fit_backward(&xs, &ys, k).unwrap();
        assert!(
            fit.alpha_norm_sq() <= bound,
            "coefficient bound violated: {} > {bound}",
            fit.alpha_norm_sq()
        );
    }
}

#[test]
fn zero_output_spectrum_is_singular() {
    let xs = spectrum(random_complex_vec(8, &mut Rng::new(207)));
    let ys = spectrum(vec![Complex64::new(0.0, 0.0); 8]);
    assert!(matches!(
        fit_backward(&xs, &ys, 0),
        Err(CoreError::SingularSystem { .. })
    ));
}

#[test]
fn ridge_pushes_through_rank_deficiency() {
    // One nonzero output bin, two coefficients: rank-1 Gram.
    let mut bins = vec![Complex64::new(0.0, 0.0); 8];
    bins[2] = Complex64::new(1.5, -0.5);
    let ys = spectrum(bins);
    let xs = spectrum(random_complex_vec(8, &mut Rng::new(208)));
    assert!(matches!(
        fit_backward(&xs, &ys, 1),
        Err(CoreError::SingularSystem { .. })
    ));
    let fit = fit_backward_with_options(&xs, &ys, 1, FitOptions { ridge: true }).unwrap();
    assert!(fit.sigma0_sq().is_finite());
}
