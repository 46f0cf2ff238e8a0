//! Deterministic pseudo-random generation.
//!
//! Experiment grids, synthetic corpora, and noise streams all have to be
//! reproducible across runs, platforms, and reimplementations of the file
//! formats, so the generator is pinned here rather than left to a library
//! default. The algorithm is SplitMix64 (Steele, Lea & Flood; the `splittable
//! random` mixer also used to seed the xoshiro family):
//!
//! ```text
//! state  += 0x9E3779B97F4A7C15                       (golden-ratio increment)
//! z       = state
//! z       = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z       = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output  = z ^ (z >> 31)
//! ```
//!
//! Derived quantities are specified exactly as well:
//!
//! - `next_f64` maps the top 53 bits to `[0, 1)`: `(output >> 11) * 2^-53`.
//! - `next_below(n)` rejects outputs below `2^64 mod n`, then reduces mod
//!   `n`, so the result is exactly uniform.
//! - `next_gaussian` is the Box–Muller transform
//!   `sqrt(-2 ln u1) * cos(2π u2)` with `u1` drawn from `(0, 1]`.

use crate::fmath;

/// SplitMix64 generator state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `[0, 1)` using the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from `0..bound` via rejection sampling (no modulo bias).
    ///
    /// # Panics
    ///
    /// Panics if `bound` is zero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "next_below requires a nonzero bound");
        // 2^64 mod bound; outputs below this would over-represent small residues.
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    /// Standard normal draw (mean 0, standard deviation 1) via Box–Muller.
    pub fn next_gaussian(&mut self) -> f64 {
        // u1 in (0, 1] so the logarithm stays finite.
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        fmath::sqrt(-2.0 * fmath::ln(u1)) * fmath::cos(core::f64::consts::TAU * u2)
    }
}

/// Derives an independent stream seed from a base seed and a key sequence.
///
/// Each word folds in as one SplitMix64 step: `acc = mix(acc ^ word)` where
/// `mix(s)` is the first output of a SplitMix64 generator seeded with `s`.
/// Used to key per-(config, run) noise streams off a single dataset seed.
pub fn derive_seed(base: u64, words: &[u64]) -> u64 {
    let mut acc = SplitMix64::new(base).next_u64();
    for &w in words {
        acc = SplitMix64::new(acc ^ w).next_u64();
    }
    acc
}
