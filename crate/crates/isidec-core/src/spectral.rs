//! Unitary DFT/IDFT, banded Toeplitz channel operators, and the Szegő
//! approximation diagnostic.
//!
//! The transform convention is unitary in both directions: the forward
//! transform of a length-`n` signal is `X_m = n^{-1/2} Σ_t x_t e^{-j2πmt/n}`,
//! so Parseval holds as an equality of energies. Channel operators are
//! lower-triangular banded Toeplitz matrices `A = {h_{i-j}}` acting with the
//! zero-prehistory convention `x_t = 0` for `t < 0`; a circular variant is
//! available for experiments that want the exactly-diagonalized circulant.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex;

use crate::error::CoreError;

pub type Complex64 = Complex<f64>;

/// Length-`n` real sample vector (codeword, noise, or channel output).
///
/// Samples are validated finite on construction and immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSignal {
    samples: Vec<f64>,
}

impl RealSignal {
    pub fn new(samples: Vec<f64>) -> Result<Self, CoreError> {
        if samples.is_empty() {
            return Err(CoreError::InvalidInput {
                what: "signal must have length >= 1",
            });
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(CoreError::InvalidInput {
                what: "signal samples must be finite",
            });
        }
        Ok(RealSignal { samples })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Total energy `Σ_t x_t²`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum()
    }
}

impl AsRef<[f64]> for RealSignal {
    fn as_ref(&self) -> &[f64] {
        &self.samples
    }
}

/// Length-`n` complex DFT bins.
///
/// `source_real` records that the spectrum came from transforming a real
/// signal, in which case the bins are conjugate-symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    bins: Vec<Complex64>,
    source_real: bool,
}

impl ComplexSpectrum {
    /// Wraps raw bins; the conjugate-symmetry flag is left unset.
    pub fn from_bins(bins: Vec<Complex64>) -> Result<Self, CoreError> {
        if bins.is_empty() {
            return Err(CoreError::InvalidInput {
                what: "spectrum must have length >= 1",
            });
        }
        if bins.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CoreError::InvalidInput {
                what: "spectrum bins must be finite",
            });
        }
        Ok(ComplexSpectrum {
            bins,
            source_real: false,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    #[inline]
    pub fn source_real(&self) -> bool {
        self.source_real
    }

    /// Total energy `Σ_m |X_m|²`; equals the signal energy by Parseval when
    /// the spectrum came from the forward transform.
    pub fn energy(&self) -> f64 {
        self.bins.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest deviation from `X_m = conj(X_{(n-m) mod n})`, relative to the
    /// largest bin magnitude (0 for the all-zero spectrum).
    pub fn conjugate_symmetry_residue(&self) -> f64 {
        let n = self.bins.len();
        let scale = self
            .bins
            .iter()
            .map(|z| libm::sqrt(z.norm_sqr()))
            .fold(0.0_f64, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for m in 0..n {
            let mirror = self.bins[(n - m) % n].conj();
            let d = self.bins[m] - mirror;
            worst = worst.max(libm::sqrt(d.norm_sqr()));
        }
        worst / scale
    }
}

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

/// Precomputed twiddle table for length-`n` transforms.
///
/// `twiddle(k)` is `e^{-j2πk/n}`; the table is shared by the transforms and by
/// the backward-channel fits, which need the same roots of unity.
#[derive(Debug, Clone)]
pub struct DftPlan {
    n: usize,
    w: Vec<Complex64>,
}

impl DftPlan {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "transform length must be >= 1");
        let mut w = Vec::with_capacity(n);
        for k in 0..n {
            let theta = -2.0 * core::f64::consts::PI * k as f64 / n as f64;
            w.push(Complex64::new(libm::cos(theta), libm::sin(theta)));
        }
        DftPlan { n, w }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// `e^{-j2πk/n}`, reduced mod `n`.
    #[inline]
    pub fn twiddle(&self, k: usize) -> Complex64 {
        self.w[k % self.n]
    }

    /// Unitary forward transform of a real signal.
    pub fn forward_real(&self, x: &RealSignal) -> ComplexSpectrum {
        assert_eq!(x.len(), self.n, "plan length mismatch");
        let mut buf: Vec<Complex64> = x
            .samples()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        self.transform(&mut buf, false);
        let scale = 1.0 / libm::sqrt(self.n as f64);
        for z in buf.iter_mut() {
            *z *= scale;
        }
        ComplexSpectrum {
            bins: buf,
            source_real: true,
        }
    }

    /// Unitary forward transform of complex bins.
    pub fn forward_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n, "plan length mismatch");
        let mut buf = x.to_vec();
        self.transform(&mut buf, false);
        let scale = 1.0 / libm::sqrt(self.n as f64);
        for z in buf.iter_mut() {
            *z *= scale;
        }
        buf
    }

    /// Unitary inverse transform of complex bins.
    pub fn inverse_complex(&self, bins: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(bins.len(), self.n, "plan length mismatch");
        let mut buf = bins.to_vec();
        self.transform(&mut buf, true);
        let scale = 1.0 / libm::sqrt(self.n as f64);
        for z in buf.iter_mut() {
            *z *= scale;
        }
        buf
    }

    /// Unnormalized in-place transform; radix-2 when `n` is a power of two,
    /// direct summation otherwise.
    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        if n == 1 {
            return;
        }
        if n.is_power_of_two() {
            self.radix2(buf, inverse);
        } else {
            self.direct(buf, inverse);
        }
    }

    fn direct(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let input = buf.to_vec();
        for (m, out) in buf.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, &v) in input.iter().enumerate() {
                let mut w = self.w[(m * t) % n];
                if inverse {
                    w = w.conj();
                }
                acc += v * w;
            }
            *out = acc;
        }
    }

    fn radix2(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        // Bit-reversal permutation.
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let stride = n / len;
            let half = len / 2;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.w[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// Unitary forward DFT: `X_m = n^{-1/2} Σ_t x_t e^{-j2πmt/n}`.
pub fn dft(x: &RealSignal) -> ComplexSpectrum {
    DftPlan::new(x.len()).forward_real(x)
}

/// Unitary inverse DFT back to a real signal.
///
/// Fails with [`CoreError::AsymmetricSpectrum`] if the reconstruction keeps a
/// relative imaginary residue above `1e-8`, which means the input bins were
/// not conjugate-symmetric.
pub fn idft(spectrum: &ComplexSpectrum) -> Result<RealSignal, CoreError> {
    let plan = DftPlan::new(spectrum.len());
    let time = plan.inverse_complex(spectrum.bins());
    let total: f64 = time.iter().map(|z| z.norm_sqr()).sum();
    let imag: f64 = time.iter().map(|z| z.im * z.im).sum();
    if total > 0.0 {
        let residue = libm::sqrt(imag / total);
        if residue > 1e-8 {
            return Err(CoreError::AsymmetricSpectrum { residue });
        }
    }
    RealSignal::new(time.iter().map(|z| z.re).collect())
}

// ---------------------------------------------------------------------------
// Toeplitz channel operator
// ---------------------------------------------------------------------------

/// Lower-triangular banded Toeplitz operator `A = {h_{i-j}}` of dimension `n`,
/// generated by the impulse response `h_0..h_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzOperator {
    impulse: Vec<f64>,
    n: usize,
}

impl ToeplitzOperator {
    pub fn new(impulse: Vec<f64>, n: usize) -> Result<Self, CoreError> {
        if impulse.is_empty() {
            return Err(CoreError::InvalidInput {
                what: "impulse response must be nonempty",
            });
        }
        if impulse.iter().any(|h| !h.is_finite()) {
            return Err(CoreError::InvalidInput {
                what: "impulse taps must be finite",
            });
        }
        if n == 0 {
            return Err(CoreError::InvalidInput {
                what: "operator dimension must be >= 1",
            });
        }
        Ok(ToeplitzOperator { impulse, n })
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn impulse(&self) -> &[f64] {
        &self.impulse
    }

    /// `y_t = Σ_{i=0}^{min(k,t)} h_i x_{t-i}` (zero prehistory).
    pub fn apply(&self, x: &RealSignal) -> RealSignal {
        assert_eq!(x.len(), self.n, "operator dimension mismatch");
        let xs = x.samples();
        let mut out = vec![0.0; self.n];
        for (t, y) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, &h) in self.impulse.iter().enumerate().take(t + 1) {
                acc += h * xs[t - i];
            }
            *y = acc;
        }
        RealSignal::new(out).expect("finite by construction")
    }

    /// Circular variant `y_t = Σ_i h_i x_{(t-i) mod n}`; exactly diagonalized
    /// by the DFT, used for Szegő-exactness experiments.
    pub fn apply_circular(&self, x: &RealSignal) -> RealSignal {
        assert_eq!(x.len(), self.n, "operator dimension mismatch");
        let xs = x.samples();
        let n = self.n;
        let mut out = vec![0.0; n];
        for (t, y) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, &h) in self.impulse.iter().enumerate() {
                acc += h * xs[(t + n - (i % n)) % n];
            }
            *y = acc;
        }
        RealSignal::new(out).expect("finite by construction")
    }

    /// Dense column-major materialization, for oracles and the singular-value
    /// routine.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for j in 0..n {
            for (i, &h) in self.impulse.iter().enumerate() {
                let row = j + i;
                if row < n {
                    a[j * n + row] = h;
                }
            }
        }
        a
    }

    /// Singular values in ascending order, via one-sided Jacobi.
    pub fn singular_values(&self) -> Result<Vec<f64>, CoreError> {
        singular_values_dense(self.to_dense(), self.n)
    }

    /// Largest singular value (spectral norm).
    pub fn spectral_norm(&self) -> Result<f64, CoreError> {
        let sv = self.singular_values()?;
        Ok(*sv.last().expect("n >= 1"))
    }
}

/// `apply_channel_operator(op, x)`: the noiseless forward channel map.
pub fn apply_channel_operator(op: &ToeplitzOperator, x: &RealSignal) -> RealSignal {
    op.apply(x)
}

// ---------------------------------------------------------------------------
// Szegő diagnostic
// ---------------------------------------------------------------------------

/// Largest deviation between the ascending-sorted singular values of the
/// `n x n` Toeplitz operator generated by `h` and the ascending-sorted
/// magnitudes of the transfer function samples `|Σ_l h_l e^{-j2πml/n}|`.
///
/// Sorted-list matching sidesteps eigenvector pairing; singular values are
/// used because the banded operator is not normal.
pub fn szego_gap(h: &[f64], n: usize) -> Result<f64, CoreError> {
    if n < h.len() {
        return Err(CoreError::InvalidInput {
            what: "szego_gap requires n >= k+1",
        });
    }
    let op = ToeplitzOperator::new(h.to_vec(), n)?;
    let sv = op.singular_values()?;
    let plan = DftPlan::new(n);
    let mut transfer: Vec<f64> = (0..n)
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (l, &hl) in h.iter().enumerate() {
                acc += hl * plan.twiddle(m * l);
            }
            libm::sqrt(acc.norm_sqr())
        })
        .collect();
    transfer.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let gap = sv
        .iter()
        .zip(transfer.iter())
        .map(|(s, g)| (s - g).abs())
        .fold(0.0_f64, f64::max);
    Ok(gap)
}

/// Singular values of a dense column-major `n x n` matrix, ascending.
pub(crate) fn singular_values_dense(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>, CoreError> {
    assert_eq!(a.len(), n * n);
    if n == 1 {
        return Ok(vec![a[0].abs()]);
    }
    const MAX_SWEEPS: usize = 48;
    const TOL: f64 = 1e-12;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (mut app, mut aqq, mut apq) = (0.0, 0.0, 0.0);
                for i in 0..n {
                    let xp = a[p * n + i];
                    let xq = a[q * n + i];
                    app += xp * xp;
                    aqq += xq * xq;
                    apq += xp * xq;
                }
                if apq.abs() <= TOL * libm::sqrt(app * aqq) || apq == 0.0 {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..n {
                    let xp = a[p * n + i];
                    let xq = a[q * n + i];
                    a[p * n + i] = c * xp - s * xq;
                    a[q * n + i] = s * xp + c * xq;
                }
            }
        }
        if !rotated {
            let mut sv: Vec<f64> = (0..n)
                .map(|j| {
                    let norm_sq: f64 = (0..n).map(|i| a[j * n + i] * a[j * n + i]).sum();
                    libm::sqrt(norm_sq)
                })
                .collect();
            sv.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
            return Ok(sv);
        }
    }
    Err(CoreError::NonConvergence {
        what: "one-sided Jacobi singular values",
    })
}

// ---------------------------------------------------------------------------
// Small dense Hermitian helpers (shared by the least-squares fits)
// ---------------------------------------------------------------------------

/// Eigenvalues of a small real symmetric matrix (column-major), ascending.
/// Cyclic Jacobi; intended for the tiny systems of the backward fits.
pub(crate) fn symmetric_eigenvalues_small(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    if n == 1 {
        return vec![a[0]];
    }
    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0_f64;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off = off.max(a[q * n + p].abs());
            }
        }
        let scale = (0..n).map(|i| a[i * n + i].abs()).fold(0.0_f64, f64::max);
        if off <= 1e-14 * scale.max(1e-300) {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[q * n + p];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..n {
                    let aip = a[p * n + i];
                    let aiq = a[q * n + i];
                    a[p * n + i] = c * aip - s * aiq;
                    a[q * n + i] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[i * n + p];
                    let aqi = a[i * n + q];
                    a[i * n + p] = c * api - s * aqi;
                    a[i * n + q] = s * api + c * aqi;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    eig
}

/// Condition estimate of a small Hermitian matrix via its real embedding
/// `[Re -Im; Im Re]`, whose spectrum doubles the complex one.
pub(crate) fn hermitian_condition_small(c: &[Complex64], dim: usize) -> f64 {
    assert_eq!(c.len(), dim * dim);
    let m = 2 * dim;
    let mut real = vec![0.0; m * m];
    for j in 0..dim {
        for i in 0..dim {
            let z = c[j * dim + i];
            real[j * m + i] = z.re;
            real[(j + dim) * m + i] = -z.im;
            real[j * m + (i + dim)] = z.im;
            real[(j + dim) * m + (i + dim)] = z.re;
        }
    }
    let eig = symmetric_eigenvalues_small(real, m);
    let max = eig.last().copied().unwrap_or(0.0);
    let min = eig.first().copied().unwrap_or(0.0);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Cholesky factor `L` (column-major, `C = L L^H`) of a Hermitian
/// positive-definite matrix; `None` when a pivot collapses.
pub(crate) fn hermitian_cholesky(c: &[Complex64], dim: usize) -> Option<Vec<Complex64>> {
    assert_eq!(c.len(), dim * dim);
    let mut l = vec![Complex64::new(0.0, 0.0); dim * dim];
    for j in 0..dim {
        let mut d = c[j * dim + j].re;
        for k in 0..j {
            d -= l[k * dim + j].norm_sqr();
        }
        if !d.is_finite() || d <= 0.0 {
            return None;
        }
        let dj = libm::sqrt(d);
        l[j * dim + j] = Complex64::new(dj, 0.0);
        for i in j + 1..dim {
            let mut acc = c[j * dim + i];
            for k in 0..j {
                acc -= l[k * dim + i] * l[k * dim + j].conj();
            }
            l[j * dim + i] = acc / dj;
        }
    }
    Some(l)
}

/// Solves `L L^H x = rhs` given the factor from [`hermitian_cholesky`].
pub(crate) fn hermitian_solve_factored(
    l: &[Complex64],
    rhs: &[Complex64],
    dim: usize,
) -> Vec<Complex64> {
    assert_eq!(l.len(), dim * dim);
    assert_eq!(rhs.len(), dim);
    // Forward substitution L y = rhs.
    let mut y = rhs.to_vec();
    for i in 0..dim {
        for k in 0..i {
            let lik = l[k * dim + i];
            y[i] = y[i] - lik * y[k];
        }
        y[i] /= l[i * dim + i].re;
    }
    // Back substitution L^H x = y.
    let mut x = y;
    for i in (0..dim).rev() {
        for k in i + 1..dim {
            let lki = l[i * dim + k].conj();
            x[i] = x[i] - lki * x[k];
        }
        x[i] /= l[i * dim + i].re;
    }
    x
}
