//! Counter-addressed Gaussian noise.
//!
//! A draw is addressed by `(seed, sample, tag)` plus `(level, step, mode)`.
//! The first triple keys a ChaCha8 generator, `(level, step)` selects its
//! stream and the mode fixes the word position, so every mode consumes
//! exactly two 64-bit words. A draw therefore never depends on the cutoff,
//! on which other draws were made, or on which thread made them.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use spectral_core::Complex;

const STEP_BITS: u32 = 40;
/// Level id of the remainder noise `W̃`, kept clear of the level indices.
pub const REMAINDER_LEVEL: u32 = 0xFFFF;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NoiseStream {
    pub seed: u64,
    pub sample: u64,
    /// Separates independent families drawn under one seed.
    pub tag: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamId {
    pub level: u32,
    pub mode: usize,
    pub step: u64,
}

/// Unit complex normal `(N₁ + iN₂)/√2` from two words by Box-Muller.
fn complex_normal(rng: &mut ChaCha8Rng) -> Complex<f64> {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    let u1 = 1.0 - (rng.next_u64() >> 11) as f64 * SCALE;
    let u2 = (rng.next_u64() >> 11) as f64 * SCALE;
    let r = (-u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    Complex::new(r * c, r * s)
}

impl NoiseStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            sample: 0,
            tag: 0,
        }
    }

    pub fn with_sample(self, sample: u64) -> Self {
        Self { sample, ..self }
    }

    pub fn with_tag(self, tag: u64) -> Self {
        Self { tag, ..self }
    }

    fn rng(&self, level: u32, step: u64) -> ChaCha8Rng {
        assert!(
            step < 1 << STEP_BITS,
            "step index {step} exceeds the stream counter"
        );
        assert!(level < 1 << 24, "level id {level} too large");
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.sample.to_le_bytes());
        key[16..24].copy_from_slice(&self.tag.to_le_bytes());
        key[24..].copy_from_slice(b"burgers1");
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(((level as u64) << STEP_BITS) | step);
        rng
    }

    /// One standard complex normal, `E|ξ|² = 1`.
    pub fn draw(&self, id: StreamId) -> Complex<f64> {
        assert!(id.mode >= 1, "modes start at 1");
        let mut rng = self.rng(id.level, id.step);
        rng.set_word_pos(4 * (id.mode as u128 - 1));
        complex_normal(&mut rng)
    }

    /// Draws for modes `1..=out.len()` at `(level, step)`.
    pub fn fill(&self, level: u32, step: u64, out: &mut [Complex<f64>]) {
        let mut rng = self.rng(level, step);
        for x in out.iter_mut() {
            *x = complex_normal(&mut rng);
        }
    }
}
