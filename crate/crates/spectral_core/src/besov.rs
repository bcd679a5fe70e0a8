//! Block norms and the dyadic regression that turns them into a Hölder
//! exponent estimate.
//!
//! A field in a finite Wiener chaos with `E‖Δ_j u‖² ≈ C 2^{-2κj}` lies in
//! `𝒞^β` for every `β < κ`; the fit regresses `log₂ E‖Δ_j u‖²` on `j` and
//! reports `κ̂ = -slope/2`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectralError};
use crate::field::SpectralField;
use crate::fit::linear_fit;
use crate::grid::SpectralGrid;
use crate::partition::DyadicPartition;
use crate::real::Real;

/// Which per-block size enters the regression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BlockStatistic {
    /// `‖Δ_j u‖_{L²}`, the pointwise root mean square of the block.
    #[default]
    MeanSquare,
    /// `‖Δ_j u‖_∞` on the oversampled grid.
    Sup,
}

/// `(j, ‖Δ_j f‖_∞)` for every block touching `1..=K`.
pub fn block_norms<T: Real>(
    grid: &SpectralGrid<T>,
    field: &SpectralField<T>,
    partition: &DyadicPartition,
) -> Vec<(i32, T)> {
    partition
        .blocks(field.cutoff())
        .into_iter()
        .map(|j| (j, grid.sup_norm(&partition.block(field, j))))
        .collect()
}

/// `(j, ‖Δ_j f‖_{L²})`, computed from the coefficients by Parseval.
pub fn block_l2_norms<T: Real>(
    field: &SpectralField<T>,
    partition: &DyadicPartition,
) -> Vec<(i32, T)> {
    let blocks = partition.blocks(field.cutoff());
    let j0 = blocks.first().copied().unwrap_or(0);
    let mut acc = vec![0.0f64; blocks.len()];
    for (i, c) in field.coeffs().iter().enumerate() {
        let e = 2.0 * c.norm_sqr().as_f64();
        for (j, w) in partition.weights(i + 1) {
            acc[(j - j0) as usize] += w * w * e;
        }
    }
    blocks
        .into_iter()
        .zip(acc)
        .map(|(j, s)| (j, T::lit(s.sqrt())))
        .collect()
}

pub fn block_statistic<T: Real>(
    grid: &SpectralGrid<T>,
    field: &SpectralField<T>,
    partition: &DyadicPartition,
    stat: BlockStatistic,
) -> Vec<(i32, f64)> {
    let raw = match stat {
        BlockStatistic::MeanSquare => block_l2_norms(field, partition),
        BlockStatistic::Sup => block_norms(grid, field, partition),
    };
    raw.into_iter().map(|(j, v)| (j, v.as_f64())).collect()
}

/// `‖f‖_{𝒞^s} = sup_j 2^{js} ‖Δ_j f‖_∞`.
pub fn holder_norm<T: Real>(
    grid: &SpectralGrid<T>,
    field: &SpectralField<T>,
    partition: &DyadicPartition,
    s: f64,
) -> f64 {
    block_norms(grid, field, partition)
        .into_iter()
        .map(|(j, v)| 2f64.powf(j as f64 * s) * v.as_f64())
        .fold(0.0, f64::max)
}

/// Sharp blocks lying entirely inside `[k_min, k_max]`.
pub fn band_blocks(k_min: usize, k_max: usize) -> Option<(i32, i32)> {
    let lo = (k_min.max(1) as f64).log2().ceil() as i32;
    let hi = DyadicPartition::sharp_block(k_max + 1) - 1;
    (hi >= lo).then_some((lo, hi))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityFit {
    pub exponent: f64,
    pub stderr: f64,
    pub j_range: [i32; 2],
    pub r_squared: f64,
    /// The range asked for, when empty blocks forced a narrower one.
    pub requested_j_range: Option<[i32; 2]>,
}

pub const MIN_FIT_SAMPLES: usize = 30;
pub const MIN_FIT_BLOCKS: usize = 4;

/// Regresses `log₂` of the ensemble mean of squared block norms on `j`.
pub fn besov_exponent_fit(
    ensemble: &[Vec<(i32, f64)>],
    j_range: (i32, i32),
) -> Result<RegularityFit> {
    if ensemble.len() < MIN_FIT_SAMPLES {
        return Err(SpectralError::TooFewSamples {
            got: ensemble.len(),
            need: MIN_FIT_SAMPLES,
        });
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for j in j_range.0..=j_range.1 {
        let mut sum = 0.0;
        for sample in ensemble {
            sum += sample
                .iter()
                .find(|(i, _)| *i == j)
                .map_or(0.0, |(_, v)| v * v);
        }
        let mean = sum / ensemble.len() as f64;
        if mean > 0.0 && mean.is_finite() {
            xs.push(j as f64);
            ys.push(mean.log2());
        }
    }
    if xs.len() < MIN_FIT_BLOCKS {
        return Err(SpectralError::TooFewBlocks { usable: xs.len() });
    }
    let used = [xs[0] as i32, xs[xs.len() - 1] as i32];
    let fit = linear_fit(&xs, &ys).ok_or(SpectralError::TooFewBlocks { usable: xs.len() })?;
    let requested = [j_range.0, j_range.1];
    Ok(RegularityFit {
        exponent: -fit.slope / 2.0,
        stderr: fit.slope_stderr / 2.0,
        j_range: used,
        r_squared: fit.r_squared,
        requested_j_range: (used != requested || xs.len() != (j_range.1 - j_range.0 + 1) as usize)
            .then_some(requested),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gaussian_field(
        k: usize,
        var: impl Fn(usize) -> f64,
        rng: &mut ChaCha8Rng,
    ) -> SpectralField<f64> {
        SpectralField::from_fn(k, |m| {
            let s = (var(m) / 2.0).sqrt();
            let (u1, u2): (f64, f64) = (rng.gen::<f64>().max(1e-300), rng.gen());
            let r = (-2.0 * u1.ln()).sqrt();
            let th = std::f64::consts::TAU * u2;
            Complex::new(s * r * th.cos(), s * r * th.sin())
        })
    }

    fn fit_synthetic(var: impl Fn(usize) -> f64 + Copy, stat: BlockStatistic) -> RegularityFit {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let grid = SpectralGrid::new(256);
        let p = DyadicPartition::SHARP;
        let ens: Vec<_> = (0..60)
            .map(|_| block_statistic(&grid, &gaussian_field(256, var, &mut rng), &p, stat))
            .collect();
        besov_exponent_fit(&ens, band_blocks(4, 64).unwrap()).unwrap()
    }

    #[test]
    fn single_mode_block() {
        let grid = SpectralGrid::new(16);
        let e5 = SpectralField::<f64>::single_mode(16, 5, Complex::new(1.0, 0.0));
        let norms = block_norms(&grid, &e5, &DyadicPartition::SHARP);
        for (j, v) in norms {
            if j == 2 {
                assert!((v - 2.0).abs() < 1e-12);
            } else {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn zero_field_blocks() {
        let grid = SpectralGrid::new(16);
        assert!(block_norms(
            &grid,
            &SpectralField::<f64>::zeros(16),
            &DyadicPartition::SHARP
        )
        .iter()
        .all(|(_, v)| *v == 0.0));
    }

    #[test]
    fn harmonic_decay_against_direct_sum() {
        // c_k = 1/k: Δ_j u = Σ_{2^j≤k<2^{j+1}} 2cos(kx)/k peaks at x = 0 with
        // value 2 Σ 1/k ≈ 2 ln 2, flat across blocks.
        let grid = SpectralGrid::new(64);
        let f = SpectralField::from_fn(64, |k| Complex::new(1.0 / k as f64, 0.0));
        for (j, v) in block_norms(&grid, &f, &DyadicPartition::SHARP) {
            let lo = 1usize << j;
            let hi = (lo << 1).min(65);
            let direct: f64 = (lo..hi).map(|k| 2.0 / k as f64).sum();
            assert!((v - direct).abs() < 1e-12 * direct, "block {j}");
            if j >= 2 && hi == lo << 1 {
                assert!((v - 2.0 * 2f64.ln()).abs() < 0.2);
            }
        }
    }

    #[test]
    fn inverse_square_spectrum_is_half_holder() {
        let fit = fit_synthetic(|k| (k as f64).powi(-2), BlockStatistic::MeanSquare);
        assert!((fit.exponent - 0.5).abs() < 0.1, "{fit:?}");
    }

    #[test]
    fn white_spectrum_is_minus_half() {
        let fit = fit_synthetic(|_| 1.0, BlockStatistic::MeanSquare);
        assert!((fit.exponent + 0.5).abs() < 0.1, "{fit:?}");
    }

    #[test]
    fn too_few_blocks_and_samples() {
        let ens = vec![vec![(2, 1.0), (3, 0.5)]; 40];
        assert!(matches!(
            besov_exponent_fit(&ens, (2, 5)),
            Err(SpectralError::TooFewBlocks { usable: 2 })
        ));
        assert!(matches!(
            besov_exponent_fit(&ens[..5], (2, 5)),
            Err(SpectralError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn empty_block_shrinks_range() {
        let ens = vec![vec![(2, 1.0), (3, 0.5), (4, 0.25), (5, 0.125), (6, 0.0)]; 40];
        let fit = besov_exponent_fit(&ens, (2, 6)).unwrap();
        assert_eq!(fit.j_range, [2, 5]);
        assert_eq!(fit.requested_j_range, Some([2, 6]));
        assert!((fit.exponent - 1.0).abs() < 1e-12);
    }

    #[test]
    fn band_blocks_inside_interval() {
        assert_eq!(band_blocks(4, 64), Some((2, 5)));
        assert_eq!(band_blocks(4, 256), Some((2, 7)));
        assert_eq!(band_blocks(4, 6), None);
    }

    #[test]
    fn heat_smoothing_power() {
        // Unit 𝒞^γ block profile; ‖e^{-tA}f‖_{𝒞^δ} ~ t^{(γ-δ)/2}.
        let (gamma, delta) = (-0.5, 0.5);
        let k = 1 << 12;
        let grid = SpectralGrid::new(k);
        let p = DyadicPartition::SHARP;
        let mut f = SpectralField::zeros(k);
        for j in 0..=12 {
            f.set_mode(
                1 << j,
                Complex::new(0.5 * 2f64.powf(-gamma * j as f64), 0.0),
            );
        }
        let (mut lt, mut ln) = (Vec::new(), Vec::new());
        for m in 4..=18 {
            let t = 2f64.powi(-m);
            let g = f.apply_diagonal(crate::field::symbol::heat(t));
            lt.push(t.ln());
            ln.push(holder_norm(&grid, &g, &p, delta).ln());
        }
        let fit = linear_fit(&lt, &ln).unwrap();
        assert!((fit.slope - (gamma - delta) / 2.0).abs() < 0.1, "{fit:?}");
    }
}
