//! Littlewood-Paley blocks on the positive wavenumbers.

use serde::{Deserialize, Serialize};

use crate::field::SpectralField;
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PartitionMode {
    /// Annuli `2^j ≤ |k| < 2^{j+1}`.
    #[default]
    Sharp,
    /// Smooth dyadic partition of unity on the log₂ scale.
    Smooth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct DyadicPartition {
    pub mode: PartitionMode,
}

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, C^∞ in between.
fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

impl DyadicPartition {
    pub const SHARP: Self = Self {
        mode: PartitionMode::Sharp,
    };
    pub const SMOOTH: Self = Self {
        mode: PartitionMode::Smooth,
    };

    /// `floor(log₂ k)`, the sharp block of `k ≥ 1`.
    pub fn sharp_block(k: usize) -> i32 {
        debug_assert!(k >= 1);
        (usize::BITS - 1 - k.leading_zeros()) as i32
    }

    /// Nonzero weights `(j, φ_j(k))` for `k ≥ 1`; at most two adjacent blocks.
    pub fn weights(&self, k: usize) -> Vec<(i32, f64)> {
        match self.mode {
            PartitionMode::Sharp => vec![(Self::sharp_block(k), 1.0)],
            PartitionMode::Smooth => {
                // With a_j = s(v - j + 1/2), φ_j = a_j (1 - a_{j+1}) telescopes to 1.
                let v = (k as f64).log2();
                let j = (v + 0.5).floor() as i32;
                let a_j = smooth_step(v - j as f64 + 0.5);
                let mut w = Vec::with_capacity(2);
                if a_j < 1.0 {
                    w.push((j - 1, 1.0 - a_j));
                }
                if a_j > 0.0 {
                    w.push((j, a_j));
                }
                w
            }
        }
    }

    pub fn weight(&self, j: i32, k: usize) -> f64 {
        self.weights(k)
            .into_iter()
            .find(|&(i, _)| i == j)
            .map_or(0.0, |(_, w)| w)
    }

    /// Blocks with at least one mode in `1..=cutoff`, ascending.
    pub fn blocks(&self, cutoff: usize) -> Vec<i32> {
        let mut js: Vec<i32> = (1..=cutoff)
            .flat_map(|k| self.weights(k))
            .map(|(j, _)| j)
            .collect();
        js.sort_unstable();
        js.dedup();
        js
    }

    /// `Δ_j f`.
    pub fn block<T: Real>(&self, field: &SpectralField<T>, j: i32) -> SpectralField<T> {
        let mut out = field.clone();
        out.scale_modes(|k| T::lit(self.weight(j, k)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use proptest::prelude::*;

    #[test]
    fn sharp_blocks() {
        assert_eq!(DyadicPartition::sharp_block(1), 0);
        assert_eq!(DyadicPartition::sharp_block(5), 2);
        assert_eq!(DyadicPartition::sharp_block(8), 3);
        assert_eq!(
            DyadicPartition::SHARP.blocks(64),
            (0..=6).collect::<Vec<_>>()
        );
    }

    #[test]
    fn smooth_reaches_low_block() {
        let w = DyadicPartition::SMOOTH.weights(1);
        assert_eq!(w.len(), 2);
        assert_eq!(w[0].0, -1);
    }

    #[test]
    fn block_extraction_is_a_partition() {
        let f = SpectralField::from_fn(40, |k| Complex::new(k as f64, 1.0 / k as f64));
        for p in [DyadicPartition::SHARP, DyadicPartition::SMOOTH] {
            let mut sum = SpectralField::zeros(40);
            for j in p.blocks(40) {
                sum += &p.block(&f, j);
            }
            for k in 1..=40i64 {
                assert!((sum.mode(k) - f.mode(k)).norm() < 1e-12 * f.mode(k).norm());
            }
        }
    }

    proptest! {
        #[test]
        fn weights_sum_to_one(k in 1usize..100_000, smooth in any::<bool>()) {
            let p = if smooth { DyadicPartition::SMOOTH } else { DyadicPartition::SHARP };
            let w = p.weights(k);
            prop_assert!(w.len() <= 2);
            if w.len() == 2 {
                prop_assert_eq!(w[1].0 - w[0].0, 1);
            }
            let s: f64 = w.iter().map(|x| x.1).sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
