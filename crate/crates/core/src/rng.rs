//! Seeded pseudo-random numbers for the scenario simulator.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood, 2014): a 64-bit
//! counter advanced by the golden-ratio increment with a finalizing mix.
//! The algorithm is spelled out here so a scenario trace can be
//! reproduced from its seed in any language; integer output is
//! bit-identical everywhere, float output may differ in the last ulp
//! across math libraries.

use crate::math;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 stream with an optional cached Gaussian spare.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    spare_gaussian: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            spare_gaussian: None,
        }
    }

    /// state += 0x9E3779B97F4A7C15; z = state;
    /// z = (z ^ z>>30) * 0xBF58476D1CE4E5B9;
    /// z = (z ^ z>>27) * 0x94D049BB133111EB;
    /// return z ^ z>>31
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn next_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal via Box-Muller; the second deviate of each pair
    /// is cached and returned on the next call.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare_gaussian.take() {
            return z;
        }
        // Shift into (0, 1] so ln never sees zero.
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        let radius = math::sqrt(-2.0 * math::ln(u1));
        let angle = core::f64::consts::TAU * u2;
        self.spare_gaussian = Some(radius * math::sin(angle));
        radius * math::cos(angle)
    }
}
