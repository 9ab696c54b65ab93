//! Deterministic 64-bit generator used for every seeded operation in the
//! crate.
//!
//! The generator is SplitMix64: the state advances by the golden-ratio
//! increment `0x9E3779B97F4A7C15` and each output is a fixed bit-mix of the
//! state (constants `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`). All
//! constants are spelled out here so any other language can reproduce the
//! streams bit-exactly.

/// Golden-ratio increment of SplitMix64.
pub const GOLDEN_GAMMA: u64 = 0x9E3779B97F4A7C15;

/// Finalization mix of SplitMix64 (same as MurmurHash3's fmix64 with
/// different multipliers).
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a root seed and a list of
/// context words (model tags, pair indices, restart numbers, ...).
pub fn derive_seed(root: u64, parts: &[u64]) -> u64 {
    let mut acc = mix64(root ^ GOLDEN_GAMMA);
    for &p in parts {
        acc = mix64(acc.wrapping_add(GOLDEN_GAMMA) ^ p.wrapping_mul(0xD6E8FEB86659FD93));
    }
    acc
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in [0, 1), 53 random bits.
    pub fn uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1].
    pub fn uniform01_open_low(&mut self) -> f64 {
        1.0 - self.uniform01()
    }

    /// Uniform integer in [0, n).
    pub fn below(&mut self, n: usize) -> usize {
        // Desk-scale n; modulo bias is far below any effect we measure.
        (self.next_u64() % n as u64) as usize
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform01_open_low();
        let u2 = self.uniform01();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
