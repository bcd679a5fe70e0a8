//! Convolution sums `S(k) = Σ_{k₁+k₂=k} |k₁|^{-a} |k₂|^{-b}` under
//! truncation doubling.

use gaussian_objects::SumMode;
use serde::{Deserialize, Serialize};
use spectral_core::DyadicPartition;

use super::judged;
use crate::ensemble::fingerprint;
use crate::report::{FitRow, Outcome, Verdict};
use crate::tolerances::{FSUM_GROWTH, FSUM_STABLE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Bounded,
    Divergent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FsumCase {
    pub a: f64,
    pub b: f64,
    pub mode: SumMode,
    pub expect: Expect,
}

#[derive(Clone, Debug, Serialize)]
pub struct FsumParams {
    pub cases: Vec<FsumCase>,
    pub k_range: [usize; 2],
    pub k_sum: usize,
}

impl Default for FsumParams {
    fn default() -> Self {
        let case = |a, b, mode, expect| FsumCase { a, b, mode, expect };
        Self {
            cases: vec![
                case(1.2, 1.2, SumMode::Full, Expect::Bounded),
                case(0.9, 0.9, SumMode::Resonant, Expect::Bounded),
                case(0.7, 0.8, SumMode::Full, Expect::Bounded),
                case(1.5, 0.5, SumMode::Full, Expect::Bounded),
                case(0.4, 0.4, SumMode::Full, Expect::Divergent),
                case(0.3, 0.5, SumMode::Resonant, Expect::Divergent),
            ],
            k_range: [2, 128],
            k_sum: 100_000,
        }
    }
}

impl FsumParams {
    pub fn fast() -> Self {
        Self {
            k_sum: 20_000,
            ..Self::default()
        }
    }
}

/// `S(k)` for every `k` in `ks`, truncated to `0 < |kᵢ| ≤ k_sum`.
pub fn convolution_sums(a: f64, b: f64, ks: &[usize], k_sum: usize, mode: SumMode) -> Vec<f64> {
    let top = k_sum + ks.iter().copied().max().unwrap_or(0);
    let pa: Vec<f64> = (0..=top).map(|m| (m as f64).powf(-a)).collect();
    let pb: Vec<f64> = (0..=top).map(|m| (m as f64).powf(-b)).collect();
    let block = |m: usize| DyadicPartition::sharp_block(m);
    let k_sum = k_sum as i64;
    ks.iter()
        .map(|&k| {
            let k = k as i64;
            let mut s = 0.0;
            for k1 in (k - k_sum).max(-k_sum)..=(k + k_sum).min(k_sum) {
                let k2 = k - k1;
                if k1 == 0 || k2 == 0 {
                    continue;
                }
                let (m1, m2) = (k1.unsigned_abs() as usize, k2.unsigned_abs() as usize);
                if mode == SumMode::Resonant && (block(m1) - block(m2)).abs() > 1 {
                    continue;
                }
                s += pa[m1] * pb[m2];
            }
            s
        })
        .collect()
}

/// `sup_k S(k)·k^{a+b-1}` over the range, at `K_sum` and `2K_sum`. Bounded
/// cases pass when the sup moves by at most the stability tolerance,
/// divergent ones when it grows by at least the growth tolerance.
pub fn check_fsum_lemmas(p: &FsumParams, seed: u64) -> Outcome {
    let fp = fingerprint(p, seed);
    let ks: Vec<usize> = (p.k_range[0]..=p.k_range[1]).collect();
    let mut out = Outcome::default();
    for case in &p.cases {
        let scaled = |k_sum: usize| -> Vec<f64> {
            convolution_sums(case.a, case.b, &ks, k_sum, case.mode)
                .into_iter()
                .zip(&ks)
                .map(|(s, &k)| s * (k as f64).powf(case.a + case.b - 1.0))
                .collect()
        };
        let (lo, hi) = (scaled(p.k_sum), scaled(2 * p.k_sum));
        let sup = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        let ratio = sup(&hi) / sup(&lo);
        let name = format!("fsum a={} b={} {:?}", case.a, case.b, case.mode).to_lowercase();
        let (verdict, tol, reference) = match case.expect {
            Expect::Bounded => (
                Verdict::from_bool((ratio - 1.0).abs() <= FSUM_STABLE),
                FSUM_STABLE,
                "sup_k S(k) k^(a+b-1) is stable under K_sum doubling",
            ),
            Expect::Divergent => (
                Verdict::from_bool(ratio - 1.0 >= FSUM_GROWTH),
                FSUM_GROWTH,
                "sup_k S(k) k^(a+b-1) grows under K_sum doubling",
            ),
        };
        out.push(
            judged(&name, reference, 1.0, ratio, tol, verdict, &fp).with_note(format!(
                "ratio of sups at K_sum = {} and {}",
                2 * p.k_sum,
                p.k_sum
            )),
        );
        out.fits.extend(
            ks.iter()
                .zip(lo.iter().zip(&hi))
                .map(|(&k, (&l, &h))| FitRow {
                    check: name.clone(),
                    x: k as f64,
                    y: l,
                    fitted: h,
                }),
        );
    }
    out
}
