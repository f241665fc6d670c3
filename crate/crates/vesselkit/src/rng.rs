//! Deterministic random number generation.
//!
//! Everything in this crate that consumes randomness goes through either a
//! sequential [`SplitMix64`] stream (attractor sampling, synthetic test
//! graphs) or the stateless [`hash2`]/[`hash3`] mixers (per-pixel noise).
//! Both are self-contained so identical seeds give bit-identical output on
//! every platform and toolchain.

/// SplitMix64 sequential generator.
///
/// Small state, full 64-bit period, and good enough statistical quality for
/// procedural geometry. Not suitable for cryptography.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix64(self.state)
    }

    /// Uniform f64 in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        // 53 high bits -> exactly representable dyadic rational in [0,1)
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform f64 in [lo, hi).
    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.next_f64() * (hi - lo)
    }

    /// Uniform integer in [0, n). Uses rejection to avoid modulo bias.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below requires n > 0");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }
}

/// Finalizing mixer from SplitMix64.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stateless hash of a seed and two coordinates.
///
/// Used for per-pixel noise so results are independent of evaluation order.
#[inline]
pub fn hash2(seed: u64, a: i64, b: i64) -> u64 {
    mix64(seed ^ mix64(a as u64 ^ mix64(b as u64 ^ 0x517C_C1B7_2722_0A95)))
}

/// Stateless hash of a seed and three coordinates.
#[inline]
pub fn hash3(seed: u64, a: i64, b: i64, c: i64) -> u64 {
    mix64(hash2(seed, a, b) ^ mix64(c as u64 ^ 0x2545_F491_4F6C_DD1D))
}

/// Map a hash to a uniform f64 in [0, 1).
#[inline]
pub fn unit_f64(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal sample from two hashes (Box-Muller), clipped to ±3.
///
/// The clip keeps speckle bounded so a single pixel can never be pushed
/// across the whole intensity range by one outlier draw.
#[inline]
pub fn clipped_gaussian(h1: u64, h2: u64) -> f64 {
    // keep u1 strictly positive for the logarithm
    let u1 = (unit_f64(h1) + f64::EPSILON).min(1.0);
    let u2 = unit_f64(h2);
    let g = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
    g.clamp(-3.0, 3.0)
}
