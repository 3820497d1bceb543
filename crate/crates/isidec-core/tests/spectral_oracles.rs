//! Transform and Toeplitz-operator checks against formula-literal oracles.

mod common;

use common::{dense_toeplitz_multiply, naive_dft, naive_idft, random_vec};
use isidec_core::spectral::{
    apply_channel_operator, dft, idft, szego_gap, ComplexSpectrum, RealSignal, ToeplitzOperator,
};
use isidec_core::Rng;
use proptest::prelude::*;

fn max_bin_err(a: &[isidec_core::Complex64], b: &[isidec_core::Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr().sqrt())
        .fold(0.0, f64::max)
}

#[test]
fn forward_matches_naive_oracle() {
    let mut rng = Rng::new(101);
    for &n in &[1usize, 2, 3, 4, 7, 16, 33, 64, 100] {
        let samples = random_vec(n, &mut rng);
        let fast = dft(&RealSignal::new(samples.clone()).unwrap());
        let oracle = naive_dft(&samples);
        let scale = oracle
            .iter()
            .map(|z| z.norm_sqr().sqrt())
            .fold(1.0, f64::max);
        assert!(max_bin_err(fast.bins(), &oracle) < 1e-10 * scale, "n = {n}");
    }
}

#[test]
fn fixed_vector_against_oracle() {
    // The module example: x = (1, 2, 3, 4).
    let samples = vec![1.0, 2.0, 3.0, 4.0];
    let fast = dft(&RealSignal::new(samples.clone()).unwrap());
    let oracle = naive_dft(&samples);
    assert!(max_bin_err(fast.bins(), &oracle) < 1e-12);
    let back = idft(&fast).unwrap();
    for (a, b) in samples.iter().zip(back.samples()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn inverse_of_oracle_spectrum_recovers_alternating_input() {
    let samples = vec![1.0, -1.0, 1.0, -1.0];
    let oracle_bins = naive_dft(&samples);
    let spectrum = ComplexSpectrum::from_bins(oracle_bins).unwrap();
    let back = idft(&spectrum).unwrap();
    for (a, b) in samples.iter().zip(back.samples()) {
        assert!((a - b).abs() < 1e-12);
    }
    // And the library inverse agrees with the naive inverse.
    let naive_back = naive_idft(spectrum.bins());
    for (a, b) in naive_back.iter().zip(back.samples()) {
        assert!((a.re - b).abs() < 1e-12 && a.im.abs() < 1e-12);
    }
}

#[test]
fn parseval_at_large_n() {
    let mut rng = Rng::new(7);
    for &n in &[1000usize, 4096] {
        let x = RealSignal::new(random_vec(n, &mut rng)).unwrap();
        let xs = dft(&x);
        let rel = (xs.energy() - x.energy()).abs() / x.energy();
        assert!(rel < 1e-10, "n = {n}: relative error {rel}");
        assert!(xs.conjugate_symmetry_residue() < 1e-12, "n = {n}");
    }
}

#[test]
fn operator_matches_dense_multiply_exhaustively() {
    let mut rng = Rng::new(55);
    for trial in 0..100 {
        let n = 1 + (rng.next_u64() % 64) as usize;
        let k = (rng.next_u64() % 4) as usize;
        let h = random_vec(k + 1, &mut rng);
        let xv = random_vec(n, &mut rng);
        let op = ToeplitzOperator::new(h.clone(), n).unwrap();
        let x = RealSignal::new(xv.clone()).unwrap();
        let got = apply_channel_operator(&op, &x);
        let want = dense_toeplitz_multiply(&h, &xv);
        for (a, b) in got.samples().iter().zip(&want) {
            assert!((a - b).abs() < 1e-12, "trial {trial}");
        }
    }
}

#[test]
fn random_three_tap_operator_matches_dense() {
    let mut rng = Rng::new(77);
    let h = random_vec(4, &mut rng); // k = 3
    let xv = random_vec(16, &mut rng);
    let op = ToeplitzOperator::new(h.clone(), 16).unwrap();
    let got = op.apply(&RealSignal::new(xv.clone()).unwrap());
    let want = dense_toeplitz_multiply(&h, &xv);
    for (a, b) in got.samples().iter().zip(&want) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn szego_gap_shrinks_with_n_for_two_taps() {
    let h = [1.0, 0.5];
    let g32 = szego_gap(&h, 32).unwrap();
    let g256 = szego_gap(&h, 256).unwrap();
    assert!(
        g256 < g32,
        "expected the gap to shrink: gap(32) = {g32}, gap(256) = {g256}"
    );
}

#[test]
fn szego_gap_monotone_through_256() {
    let h = [1.0, 0.5, 0.25];
    let mut prev = f64::INFINITY;
    for &n in &[32usize, 64, 128, 256] {
        let g = szego_gap(&h, n).unwrap();
        assert!(g <= prev * 1.05, "gap increased at n = {n}: {prev} -> {g}");
        prev = g;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roundtrip_is_identity(xs in proptest::collection::vec(-100.0f64..100.0, 1..128)) {
        let x = RealSignal::new(xs.clone()).unwrap();
        let back = idft(&dft(&x)).unwrap();
        let scale = xs.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for (a, b) in xs.iter().zip(back.samples()) {
            prop_assert!((a - b).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn parseval_and_symmetry(xs in proptest::collection::vec(-100.0f64..100.0, 1..128)) {
        let x = RealSignal::new(xs).unwrap();
        let spec = dft(&x);
        let energy = x.energy();
        if energy > 0.0 {
            prop_assert!((spec.energy() - energy).abs() <= 1e-10 * energy);
        }
        prop_assert!(spec.conjugate_symmetry_residue() <= 1e-12);
    }

    #[test]
    fn transform_is_linear(
        pair in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..96),
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
    ) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pair.into_iter().unzip();
        let combined: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| a * x + b * y).collect();
        let lhs = dft(&RealSignal::new(combined).unwrap());
        let fx = dft(&RealSignal::new(xs).unwrap());
        let fy = dft(&RealSignal::new(ys).unwrap());
        let scale = lhs.bins().iter().map(|z| z.norm_sqr().sqrt()).fold(1.0, f64::max);
        for (m, bin) in lhs.bins().iter().enumerate() {
            let rhs = a * fx.bins()[m] + b * fy.bins()[m];
            prop_assert!((bin - rhs).norm_sqr().sqrt() <= 1e-10 * scale);
        }
    }
}
