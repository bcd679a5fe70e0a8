//! Plain and time-shifted Girsanov integrands of `F = B(z)` under cutoff
//! doubling.

use gaussian_objects::{b_nonlinearity, ou_step, NoiseAddress, OUSpec};
use level_solvers::{girsanov_integrand_diagnostic, GirsanovMode};
use serde::Serialize;
use spectral_core::{FieldPath, FieldState, SpectralField, SpectralGrid};

use super::{address, judged};
use crate::ensemble::{fingerprint, Ensemble};
use crate::report::{FitRow, Outcome, Verdict};
use crate::tolerances::{GIRSANOV_GROWTH, GIRSANOV_STABLE};
use crate::VerifyError;

const TAG_GIRSANOV: u64 = 0x0909;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GirsanovCase {
    pub alpha: f64,
    /// Whether the plain integrand is expected to diverge.
    pub plain_diverges: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GirsanovParams {
    pub cases: Vec<GirsanovCase>,
    pub cutoff: usize,
    pub dt: f64,
    pub t: f64,
    pub samples: usize,
}

impl Default for GirsanovParams {
    fn default() -> Self {
        let case = |alpha, plain_diverges| GirsanovCase {
            alpha,
            plain_diverges,
        };
        Self {
            cases: vec![case(0.6, false), case(0.9, true)],
            cutoff: 128,
            dt: 1e-3,
            t: 0.5,
            samples: 128,
        }
    }
}

impl GirsanovParams {
    pub fn fast() -> Self {
        Self {
            cutoff: 64,
            dt: 2e-3,
            samples: 8,
            ..Self::default()
        }
    }
}

/// `B(z_s)` on the grid `0, dt, …, t` for `z` with `q_k = |k|^α` from 0.
fn drift_path(
    alpha: f64,
    p: &GirsanovParams,
    grid: &SpectralGrid<f64>,
    addr: NoiseAddress,
) -> Result<FieldPath<f64>, VerifyError> {
    let spec = OUSpec::<f64>::power(alpha, p.cutoff);
    let steps = (p.t / p.dt).round() as u64;
    let mut z = SpectralField::zeros(p.cutoff);
    let mut path = FieldPath::new();
    for m in 0..=steps {
        if m > 0 {
            z = ou_step(&z, &spec, p.dt, NoiseAddress { step: m, ..addr });
        }
        path.push(
            m as f64 * p.dt,
            FieldState::Alive(b_nonlinearity(grid, &z, &z)?),
        )?;
    }
    Ok(path)
}

/// With `β = α`, the time-shifted integrand must stay stable, and the
/// plain one must either stay stable or at least double per doubling, as
/// the case declares. Doubling means the truncations `K/4, K/2, K` of one
/// run.
pub fn girsanov_contrast(
    p: &GirsanovParams,
    ens: &Ensemble,
    seed: u64,
) -> Result<Outcome, VerifyError> {
    let fp = fingerprint(p, seed);
    let grid = SpectralGrid::<f64>::new(p.cutoff);
    let mut out = Outcome::default();
    for (ai, case) in p.cases.iter().enumerate() {
        let alpha = case.alpha;
        let per_sample = ens.map(
            p.samples,
            |s| -> Result<[Vec<(usize, f64)>; 2], VerifyError> {
                let path = drift_path(alpha, p, &grid, address(seed, TAG_GIRSANOV + ai as u64, s))?;
                let plain = girsanov_integrand_diagnostic(&path, alpha, GirsanovMode::Plain, p.t)?;
                let shifted =
                    girsanov_integrand_diagnostic(&path, alpha, GirsanovMode::TimeShifted, p.t)?;
                Ok([plain.truncations, shifted.truncations])
            },
        );
        let per_sample: Vec<[Vec<(usize, f64)>; 2]> =
            per_sample.into_iter().collect::<Result<_, _>>()?;
        for (mi, mode) in [GirsanovMode::Plain, GirsanovMode::TimeShifted]
            .into_iter()
            .enumerate()
        {
            let cuts: Vec<usize> = per_sample[0][mi].iter().map(|c| c.0).collect();
            let means: Vec<f64> = (0..cuts.len())
                .map(|c| {
                    per_sample.iter().map(|s| s[mi][c].1).sum::<f64>() / per_sample.len() as f64
                })
                .collect();
            let ratios: Vec<f64> = means.windows(2).map(|w| w[1] / w[0]).collect();
            let diverges = mode == GirsanovMode::Plain && case.plain_diverges;
            let name = format!(
                "girsanov {} alpha={alpha}",
                if mi == 0 { "plain" } else { "time_shifted" }
            );
            let report = if diverges {
                let worst = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                judged(&name, "plain integrand diverges as the cutoff doubles", GIRSANOV_GROWTH, worst, GIRSANOV_GROWTH, Verdict::from_bool(worst >= GIRSANOV_GROWTH), &fp)
                    .with_note(format!("smallest ratio per doubling, pass iff >= {GIRSANOV_GROWTH}; ratios {ratios:.4?}"))
            } else {
                let worst = ratios
                    .iter()
                    .copied()
                    .max_by(|a, b| (a - 1.0).abs().total_cmp(&(b - 1.0).abs()))
                    .unwrap_or(f64::NAN);
                judged(
                    &name,
                    "integrand stable as the cutoff doubles",
                    1.0,
                    worst,
                    GIRSANOV_STABLE,
                    Verdict::from_bool((worst - 1.0).abs() <= GIRSANOV_STABLE),
                    &fp,
                )
                .with_note(format!("ratio furthest from 1; ratios {ratios:.4?}"))
            };
            out.push(report.with_note_suffix(format!(", truncations {cuts:?}, n {}", p.samples)));
            out.fits
                .extend(cuts.iter().zip(&means).map(|(&k, &m)| FitRow {
                    check: name.clone(),
                    x: k as f64,
                    y: m,
                    fitted: f64::NAN,
                }));
        }
    }
    Ok(out)
}
