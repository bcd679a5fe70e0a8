//! Two-sample Kolmogorov–Smirnov distance with a permutation p-value.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `sup_x |F_a(x) - F_b(x)|` for the empirical distribution functions.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&x| (x, true))
        .chain(b.iter().map(|&x| (x, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let labels: Vec<bool> = pooled.iter().map(|p| p.1).collect();
    let values: Vec<f64> = pooled.iter().map(|p| p.0).collect();
    labelled_distance(&values, &labels, a.len(), b.len())
}

/// KS distance over sorted pooled `values`, labelled `true` for sample `a`.
/// Only the last of a run of ties is a step point.
fn labelled_distance(values: &[f64], labels: &[bool], na: usize, nb: usize) -> f64 {
    let (wa, wb) = (1.0 / na as f64, 1.0 / nb as f64);
    let (mut fa, mut fb, mut d) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..values.len() {
        if labels[i] {
            fa += wa;
        } else {
            fb += wb;
        }
        if i + 1 == values.len() || values[i + 1] != values[i] {
            d = d.max((fa - fb).abs());
        }
    }
    d
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsTest {
    pub distance: f64,
    /// `(1 + #{D* ≥ D}) / (1 + permutations)`.
    pub p_value: f64,
}

/// Permutation test: labels are reshuffled `permutations` times with a
/// ChaCha8 stream seeded by `seed`.
pub fn ks_permutation_test(a: &[f64], b: &[f64], permutations: usize, seed: u64) -> KsTest {
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&x| (x, true))
        .chain(b.iter().map(|&x| (x, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let values: Vec<f64> = pooled.iter().map(|p| p.0).collect();
    let mut labels: Vec<bool> = pooled.iter().map(|p| p.1).collect();
    let observed = labelled_distance(&values, &labels, a.len(), b.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut at_least = 0usize;
    for _ in 0..permutations {
        labels.shuffle(&mut rng);
        // Relative slack absorbs summation-order rounding of equal distances.
        if labelled_distance(&values, &labels, a.len(), b.len()) >= observed * (1.0 - 1e-12) {
            at_least += 1;
        }
    }
    KsTest {
        distance: observed,
        p_value: (1 + at_least) as f64 / (1 + permutations) as f64,
    }
}
