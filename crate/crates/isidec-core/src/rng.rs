//! Deterministic splittable random number generation.
//!
//! Experiments must reproduce byte-identical outputs from a single root seed,
//! independently of scheduling and platform. We therefore use a self-contained
//! xoshiro256++ stream seeded through the splitmix64 finalizer, plus a pure
//! [`derive()`](fn@derive) map from `(seed, tag)` pairs to statistically
//! independent child seeds. Workers never share generator state: each unit of
//! work (trial, codeword, noise realization) derives its own seed.

/// splitmix64 finalizer; a bijective 64-bit mixer with good avalanche.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed from `seed` for stream `tag`.
///
/// Two rounds of mixing keep children of neighbouring tags (and of the tags'
/// own children) decorrelated. The map is pure, so any worker can recompute
/// the seed for its unit of work without coordination.
#[inline]
pub fn derive(seed: u64, tag: u64) -> u64 {
    mix(seed ^ mix(tag ^ 0xA076_1D64_78BD_642F))
}

/// xoshiro256++ generator with a Gaussian spare slot.
#[derive(Debug, Clone)]
pub struct Rng {
    state: [u64; 4],
    spare_normal: Option<f64>,
}

impl Rng {
    /// Creates a generator whose state is expanded from `seed` via splitmix64.
    pub fn new(seed: u64) -> Self {
        let mut s = seed;
        let mut state = [0u64; 4];
        for slot in state.iter_mut() {
            s = mix(s);
            *slot = s;
        }
        // All-zero state is unreachable via splitmix, but keep the guard.
        if state == [0, 0, 0, 0] {
            state[0] = 0x9E37_79B9_7F4A_7C15;
        }
        Rng {
            state,
            spare_normal: None,
        }
    }

    /// Creates the child generator for stream `tag`.
    pub fn child(seed: u64, tag: u64) -> Self {
        Rng::new(derive(seed, tag))
    }

    /// Next raw 64-bit output.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let [s0, s1, s2, s3] = self.state;
        let result = s0.wrapping_add(s3).rotate_left(23).wrapping_add(s0);
        let t = s1 << 17;
        let mut s2n = s2 ^ s0;
        let s3n = s3 ^ s1;
        let s1n = s1 ^ s2n;
        let s0n = s0 ^ s3n;
        s2n ^= t;
        self.state = [s0n, s1n, s2n, s3n.rotate_left(45)];
        result
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via the Marsaglia polar method.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = libm::sqrt(-2.0 * libm::log(s) / s);
                self.spare_normal = Some(v * f);
                return u * f;
            }
        }
    }

    /// Fills `out` with i.i.d. `N(0, sigma_sq)` samples.
    pub fn fill_normal(&mut self, sigma_sq: f64, out: &mut [f64]) {
        let sigma = libm::sqrt(sigma_sq);
        for x in out.iter_mut() {
            *x = sigma * self.standard_normal();
        }
    }
}
