//! OU second moments against the closed form, and cutoff independence of
//! the Wick square.

use gaussian_objects::{ou_covariance_oracle, ou_sample, ou_step, NoiseAddress, OUSpec};
use serde::Serialize;
use spectral_core::SpectralGrid;

use super::{address, judged};
use crate::ensemble::{fingerprint, Ensemble, EnsembleStats};
use crate::report::{FitRow, Outcome, Verdict};
use crate::tolerances::MOMENT_Z_MAX;
use crate::VerifyError;

const TAG_COVARIANCE: u64 = 0x0101;
const TAG_MOLLIFIER: u64 = 0x0404;

/// Largest `|m2 - oracle| / stderr` over the table, with the arg max.
fn worst_z(stats: &EnsembleStats, oracle: impl Fn(usize) -> f64) -> (f64, usize) {
    stats
        .rows
        .iter()
        .map(|r| {
            let k = r.k.expect("mode table");
            ((r.m2 - oracle(k)).abs() / r.stderr, k)
        })
        .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a })
}

#[derive(Clone, Debug, Serialize)]
pub struct OuCovarianceParams {
    pub gamma: f64,
    pub cutoff: usize,
    pub k_max: usize,
    pub times: Vec<f64>,
    pub samples: usize,
}

impl Default for OuCovarianceParams {
    fn default() -> Self {
        Self {
            gamma: 0.6,
            cutoff: 64,
            k_max: 16,
            times: vec![0.1, 1.0, 10.0],
            samples: 10_000,
        }
    }
}

impl OuCovarianceParams {
    pub fn fast() -> Self {
        Self {
            samples: 2000,
            ..Self::default()
        }
    }
}

/// Each sample is one exact OU path through the increasing `times`.
pub fn ou_covariance(p: &OuCovarianceParams, ens: &Ensemble, seed: u64) -> Outcome {
    let fp = fingerprint(p, seed);
    let spec = OUSpec::<f64>::power(p.gamma, p.cutoff);
    let nt = p.times.len();
    let samples = ens.map(p.samples, |s| {
        let addr = address(seed, TAG_COVARIANCE, s);
        let mut z = ou_sample(&spec, p.times[0], addr);
        let mut rows = vec![Vec::with_capacity(p.k_max); nt];
        for (i, row) in rows.iter_mut().enumerate() {
            if i > 0 {
                z = ou_step(
                    &z,
                    &spec,
                    p.times[i] - p.times[i - 1],
                    NoiseAddress {
                        step: i as u64,
                        ..addr
                    },
                );
            }
            row.extend((1..=p.k_max).map(|k| z.mode(k as i64).norm_sqr()));
        }
        rows
    });
    let mut out = Outcome::default();
    for (i, &t) in p.times.iter().enumerate() {
        let column: Vec<Vec<f64>> = samples.iter().map(|s| s[i].clone()).collect();
        let stats = EnsembleStats::by_mode("ou", 1, p.k_max, &column, fp.clone());
        let oracle = |k: usize| ou_covariance_oracle(&spec, k, t, t);
        let (z, k) = worst_z(&stats, oracle);
        out.push(
            judged(
                format!("ou_covariance t={t}"),
                "E|z_t(k)|^2 = q_k^2 (1 - exp(-2k^2 t)) / (2k^2)",
                0.0,
                z,
                MOMENT_Z_MAX,
                Verdict::from_bool(z <= MOMENT_Z_MAX),
                &fp,
            )
            .with_note(format!(
                "max standard errors over k <= {} (at k = {k}), n {}",
                p.k_max, p.samples
            )),
        );
        out.fits.extend(stats.rows.iter().map(|r| FitRow {
            check: format!("ou_covariance t={t}"),
            x: r.k.unwrap() as f64,
            y: r.m2,
            fitted: oracle(r.k.unwrap()),
        }));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct MollifierParams {
    pub gamma: f64,
    pub cutoff: usize,
    pub t: f64,
    pub samples: usize,
}

impl Default for MollifierParams {
    fn default() -> Self {
        Self {
            gamma: 0.6,
            cutoff: 64,
            t: 1.0,
            samples: 1000,
        }
    }
}

impl MollifierParams {
    pub fn fast() -> Self {
        Self {
            samples: 300,
            ..Self::default()
        }
    }
}

/// `E|ŵ(k)|²` of the Wick square at cutoffs `K` and `2K`, independent
/// ensembles, compared mode by mode on `k ≤ K/4`.
pub fn mollifier_independence(
    p: &MollifierParams,
    ens: &Ensemble,
    seed: u64,
) -> Result<Outcome, VerifyError> {
    let fp = fingerprint(p, seed);
    let k_max = p.cutoff / 4;
    let mut tables = Vec::new();
    for (i, cutoff) in [p.cutoff, 2 * p.cutoff].into_iter().enumerate() {
        let spec = OUSpec::<f64>::power(p.gamma, cutoff);
        let grid = SpectralGrid::<f64>::new(cutoff);
        let samples = ens.map(p.samples, |s| -> Result<Vec<f64>, VerifyError> {
            let z = ou_sample(&spec, p.t, address(seed, TAG_MOLLIFIER + i as u64, s));
            let w = grid.square(&z)?;
            Ok((1..=k_max).map(|k| w.mode(k as i64).norm_sqr()).collect())
        });
        let samples: Vec<Vec<f64>> = samples.into_iter().collect::<Result<_, _>>()?;
        tables.push(EnsembleStats::by_mode(
            &format!("wick2_K{cutoff}"),
            1,
            k_max,
            &samples,
            fp.clone(),
        ));
    }
    let (worst, at) = tables[0]
        .rows
        .iter()
        .zip(&tables[1].rows)
        .map(|(a, b)| ((a.m2 - b.m2).abs() / a.stderr.hypot(b.stderr), a.k.unwrap()))
        .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
    let mut out = Outcome::default();
    out.push(
        judged(
            format!("mollifier_independence gamma={}", p.gamma),
            "Wick-square spectra agree across cutoffs K and 2K",
            0.0,
            worst,
            MOMENT_Z_MAX,
            Verdict::from_bool(worst <= MOMENT_Z_MAX),
            &fp,
        )
        .with_note(format!(
            "max standard errors over k <= {k_max} (at k = {at}), K = {} vs {}",
            p.cutoff,
            2 * p.cutoff
        )),
    );
    for (a, b) in tables[0].rows.iter().zip(&tables[1].rows) {
        out.fits.push(FitRow {
            check: "mollifier_independence".into(),
            x: a.k.unwrap() as f64,
            y: a.m2,
            fitted: b.m2,
        });
    }
    Ok(out)
}
