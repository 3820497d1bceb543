#![allow(dead_code)]
#![allow(
    clippy::needless_range_loop,
    clippy::excessive_precision,
    clippy::inconsistent_digit_grouping
)]

//! Shared test oracles. Everything here is deliberately independent of the
//! library's internal plans, tables, and factorizations: transforms are
//! formula-literal summations, the least-squares oracle assembles its system
//! from the dense design matrix and solves by a different algorithm, and the
//! chi-square tail comes from a textbook incomplete-gamma evaluation.

use isidec_core::spectral::Complex64;
use isidec_core::Rng;

pub const TWO_PI: f64 = 2.0 * core::f64::consts::PI;

// ---------------------------------------------------------------------------
// Naive transforms
// ---------------------------------------------------------------------------

/// O(n²) unitary forward DFT with per-term trigonometry.
pub fn naive_dft(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, &v) in x.iter().enumerate() {
                let theta = -TWO_PI * (m as f64) * (t as f64) / n as f64;
                acc += v * Complex64::new(theta.cos(), theta.sin());
            }
            acc * scale
        })
        .collect()
}

/// O(n²) unitary inverse DFT.
pub fn naive_idft(bins: &[Complex64]) -> Vec<Complex64> {
    let n = bins.len();
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, &b) in bins.iter().enumerate() {
                let theta = TWO_PI * (m as f64) * (t as f64) / n as f64;
                acc += b * Complex64::new(theta.cos(), theta.sin());
            }
            acc * scale
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Dense Toeplitz multiply
// ---------------------------------------------------------------------------

/// Materializes A = {h_{i-j}} densely and multiplies.
pub fn dense_toeplitz_multiply(h: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            if i >= j && i - j < h.len() {
                *entry = h[i - j];
            }
        }
    }
    a.iter()
        .map(|row| row.iter().zip(x).map(|(aij, xj)| aij * xj).sum())
        .collect()
}

// ---------------------------------------------------------------------------
// Dense least-squares oracle
// ---------------------------------------------------------------------------

/// Solves `min_θ Σ_m |x̃_m - (G θ)_m|²` for the backward-channel design
/// `G[m][l] = ỹ_m e^{j2πml/n}` (plus optional basis columns), assembling the
/// normal equations densely and solving by Gaussian elimination with partial
/// pivoting. Returns `(θ, residual/n)`.
pub fn dense_ls_oracle(
    xs: &[Complex64],
    ys: &[Complex64],
    k: usize,
    basis: &[Vec<Complex64>],
) -> (Vec<Complex64>, f64) {
    let n = xs.len();
    let d = k + 1 + basis.len();
    // Design matrix columns.
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
    // Normal equations.
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    let mut rhs = vec![Complex64::new(0.0, 0.0); d];
    for a in 0..d {
        for b in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..n {
                acc += g[a][m].conj() * g[b][m];
            }
            gram[a][b] = acc;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..n {
            acc += g[a][m].conj() * xs[m];
        }
        rhs[a] = acc;
    }
    let theta = gauss_solve(gram, rhs);
    // Residual of the oracle solution.
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

/// Gaussian elimination with partial pivoting over complex numbers.
pub fn gauss_solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let d = b.len();
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&i, &j| {
                a[i][col]
                    .norm_sqr()
                    .partial_cmp(&a[j][col].norm_sqr())
                    .unwrap()
            })
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let diag = a[col][col];
        assert!(diag.norm_sqr() > 0.0, "oracle system is singular");
        for row in col + 1..d {
            let factor = a[row][col] / diag;
            for c in col..d {
                let v = a[col][c];
                a[row][c] -= factor * v;
            }
            let bv = b[col];
            b[row] -= factor * bv;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); d];
    for row in (0..d).rev() {
        let mut acc = b[row];
        for c in row + 1..d {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    x
}

// ---------------------------------------------------------------------------
// Chi-square tail oracle
// ---------------------------------------------------------------------------

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7.
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (core::f64::consts::PI / (core::f64::consts::PI * x).sin()).ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (TWO_PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma P(a, x).
pub fn gammp(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // Series.
        let mut ap = a;
        let mut sum = 1.0 / a;
        let mut del = sum;
        for _ in 0..10_000 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-15 {
                break;
            }
        }
        sum * (-x + a * x.ln() - ln_gamma(a)).exp()
    } else {
        // Continued fraction for Q(a, x), modified Lentz.
        const FPMIN: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < FPMIN {
                d = FPMIN;
            }
            c = b + an / c;
            if c.abs() < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-15 {
                break;
            }
        }
        1.0 - (-x + a * x.ln() - ln_gamma(a)).exp() * h
    }
}

/// P(|χ²_n / n - 1| ≤ delta), the shell acceptance probability.
pub fn chi_square_shell_probability(n: usize, delta: f64) -> f64 {
    let a = n as f64 / 2.0;
    let hi = n as f64 * (1.0 + delta) / 2.0;
    let lo = n as f64 * (1.0 - delta) / 2.0;
    gammp(a, hi) - gammp(a, lo)
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

pub fn random_vec(n: usize, rng: &mut Rng) -> Vec<f64> {
    (0..n).map(|_| rng.standard_normal()).collect()
}

pub fn random_complex_vec(n: usize, rng: &mut Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.standard_normal(), rng.standard_normal()))
        .collect()
}
