//! Two-sample comparisons of marginal laws at a fixed time.

use gaussian_objects::{ou_sample, OUSpec};
use level_solvers::{run_direct_burgers, run_x_system, NoiseMode, SystemConfig};
use serde::Serialize;
use spectral_core::SpectralField;

use super::{address, judged};
use crate::ensemble::{fingerprint, Ensemble};
use crate::report::{CheckReport, Outcome, Verdict};
use crate::stats::ks_permutation_test;
use crate::tolerances::{FAMILY_ALPHA, MIN_SURVIVORS};
use crate::VerifyError;

const TAG_DISTRIBUTION: u64 = 0x0b0b;
const TAG_Z_A: u64 = 0x0b10;
const TAG_Z_B: u64 = 0x0b11;

#[derive(Clone, Debug, Serialize)]
pub struct DistributionParams {
    pub alpha: f64,
    pub cutoff: usize,
    pub dt: f64,
    pub t: f64,
    pub samples: usize,
    pub k_max: usize,
    pub permutations: usize,
}

impl Default for DistributionParams {
    fn default() -> Self {
        Self {
            alpha: 0.6,
            cutoff: 32,
            dt: 1e-3,
            t: 0.5,
            samples: 1000,
            k_max: 8,
            permutations: 3999,
        }
    }
}

impl DistributionParams {
    pub fn fast() -> Self {
        Self {
            dt: 5e-3,
            samples: 500,
            permutations: 999,
            ..Self::default()
        }
    }
}

/// `(Re ĉ_k, Im ĉ_k)` for `k ≤ k_max`, then `‖·‖_{L²}`.
fn features(f: &SpectralField<f64>, k_max: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (1..=k_max)
        .flat_map(|k| {
            let c = f.mode(k as i64);
            [c.re, c.im]
        })
        .collect();
    v.push(f.l2_norm());
    v
}

fn feature_names(k_max: usize) -> Vec<String> {
    let mut v: Vec<String> = (1..=k_max)
        .flat_map(|k| [format!("re{k}"), format!("im{k}")])
        .collect();
    v.push("l2".into());
    v
}

/// Smallest permutation p-value over the features and where it occurred.
fn min_p(a: &[Vec<f64>], b: &[Vec<f64>], permutations: usize, seed: u64) -> (f64, usize) {
    let dims = a[0].len();
    (0..dims)
        .map(|d| {
            let xa: Vec<f64> = a.iter().map(|s| s[d]).collect();
            let xb: Vec<f64> = b.iter().map(|s| s[d]).collect();
            (
                ks_permutation_test(&xa, &xb, permutations, seed.wrapping_add(d as u64)).p_value,
                d,
            )
        })
        .fold((f64::INFINITY, 0), |x, y| if y.0 < x.0 { y } else { x })
}

fn comparison(
    check: &str,
    reference: &str,
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    p: &DistributionParams,
    seed: u64,
    fp: &str,
) -> CheckReport {
    let dims = p.k_max * 2 + 1;
    let threshold = FAMILY_ALPHA / dims as f64;
    if a.len() < MIN_SURVIVORS || b.len() < MIN_SURVIVORS {
        return judged(
            check,
            reference,
            threshold,
            f64::NAN,
            threshold,
            Verdict::OutOfRegime,
            fp,
        )
        .with_note(format!(
            "survivors {} and {}, need {MIN_SURVIVORS}",
            a.len(),
            b.len()
        ));
    }
    let (pmin, at) = min_p(a, b, p.permutations, seed);
    judged(check, reference, threshold, pmin, threshold, Verdict::from_bool(pmin > threshold), fp).with_note(format!(
        "smallest KS permutation p-value over {dims} tests (at {}); pass iff above the Bonferroni level; sizes {} and {}",
        feature_names(p.k_max)[at],
        a.len(),
        b.len()
    ))
}

/// Features of the level sum and of the direct solution, `None` if dead.
type SurvivorPair = (Option<Vec<f64>>, Option<Vec<f64>>);

/// `ΣX + R` against the direct solution with independent noises, `z`
/// against a fresh `z`, and `u` against `z` as information.
pub fn check_distributional_match(
    p: &DistributionParams,
    ens: &Ensemble,
    seed: u64,
) -> Result<Outcome, VerifyError> {
    let fp = fingerprint(p, seed);
    let mut base = SystemConfig::planned(p.alpha, p.cutoff, p.dt, p.t, seed)?;
    base.tag = TAG_DISTRIBUTION;
    base.noise = NoiseMode::Independent;
    let pairs = ens.map(p.samples, |s| -> Result<SurvivorPair, VerifyError> {
        let mut cfg = base.clone();
        cfg.sample = s;
        let last = |path: &spectral_core::FieldPath<f64>| {
            path.last()
                .and_then(|(_, st)| st.field().map(|f| features(f, p.k_max)))
        };
        let u = last(&run_direct_burgers::<f64>(&cfg)?);
        let sum = last(&run_x_system::<f64>(&cfg)?.sum);
        Ok((u, sum))
    });
    let (mut direct, mut sums) = (Vec::new(), Vec::new());
    for r in pairs {
        let (u, s) = r?;
        direct.extend(u);
        sums.extend(s);
    }
    let spec = OUSpec::<f64>::power(p.alpha, p.cutoff);
    let draw = |tag: u64| {
        ens.map(p.samples, |s| {
            features(&ou_sample(&spec, p.t, address(seed, tag, s)), p.k_max)
        })
    };
    let (za, zb) = (draw(TAG_Z_A), draw(TAG_Z_B));

    let mut out = Outcome::default();
    let mut main = comparison(
        &format!("distribution_sum_vs_direct alpha={}", p.alpha),
        "level sum and direct solution share one law",
        &sums,
        &direct,
        p,
        seed,
        &fp,
    );
    if direct.len() >= 2 {
        let (pz, at) = min_p(&direct, &za, p.permutations, seed ^ 0x5a5a);
        main.note.push_str(&format!(
            "; u vs z (informational): smallest p {pz:.5} at {}",
            feature_names(p.k_max)[at]
        ));
    }
    out.push(main);
    out.push(comparison(
        "distribution_z_self_test",
        "two independent OU ensembles share one law",
        &za,
        &zb,
        p,
        seed,
        &fp,
    ));
    Ok(out)
}
