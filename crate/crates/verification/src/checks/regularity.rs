//! Besov exponents of sampled fields: OU fields and every path of a level
//! run.

use level_solvers::{run_split_remainder, Host, SystemConfig};
use serde::Serialize;
use spectral_core::{besov_exponent_fit, block_l2_norms, DyadicPartition, SpectralField};

use super::{address, judged, within};
use crate::ensemble::{fingerprint, Ensemble};
use crate::report::{fit_rows, CheckReport, FitRow, Outcome, Verdict};
use crate::tolerances::{
    LEVEL_EXPONENT, MAX_DEAD_FRACTION, MIN_R_SQUARED, OU_EXPONENT, REMAINDER_EXPONENT, RHO_ETA_GAP,
    RHO_EXPONENT,
};
use crate::VerifyError;
use gaussian_objects::{ou_sample, OUSpec};

const TAG_OU: u64 = 0x0202;
const TAG_LEVELS: u64 = 0x0808;

pub type BlockSample = Vec<(i32, f64)>;

/// Fits the Besov exponent of the ensemble over `j_range` and compares it
/// with `predicted`. `dead` counts samples that blew up and were left out.
#[allow(clippy::too_many_arguments)]
pub fn check_canonical_regularity(
    check: &str,
    reference: &str,
    ensemble: &[BlockSample],
    dead: usize,
    j_range: (i32, i32),
    predicted: f64,
    tolerance: f64,
    fp: &str,
) -> (CheckReport, Vec<FitRow>) {
    let total = ensemble.len() + dead;
    let dead_fraction = if total == 0 {
        1.0
    } else {
        dead as f64 / total as f64
    };
    if dead_fraction > MAX_DEAD_FRACTION {
        let r = judged(
            check,
            reference,
            predicted,
            f64::NAN,
            tolerance,
            Verdict::OutOfRegime,
            fp,
        )
        .with_note(format!("blow-up rate {dead_fraction:.3}"));
        return (r, Vec::new());
    }
    let fit = match besov_exponent_fit(ensemble, j_range) {
        Ok(f) => f,
        Err(e) => {
            let r = judged(
                check,
                reference,
                predicted,
                f64::NAN,
                tolerance,
                Verdict::OutOfRegime,
                fp,
            )
            .with_note(e.to_string());
            return (r, Vec::new());
        }
    };
    let (xs, ys): (Vec<f64>, Vec<f64>) = (fit.j_range[0]..=fit.j_range[1])
        .map(|j| {
            let m = ensemble
                .iter()
                .map(|s| s.iter().find(|b| b.0 == j).map_or(0.0, |b| b.1 * b.1))
                .sum::<f64>()
                / ensemble.len() as f64;
            (j as f64, m.log2())
        })
        .unzip();
    let slope = -2.0 * fit.exponent;
    let intercept =
        ys.iter().sum::<f64>() / ys.len() as f64 - slope * xs.iter().sum::<f64>() / xs.len() as f64;
    let mut r = within(check, reference, predicted, fit.exponent, tolerance, fp)
        .with_ci(fit.exponent, 2.0 * fit.stderr)
        .with_note(format!(
            "R2 {:.4}, blocks {}..{}, n {}",
            fit.r_squared,
            fit.j_range[0],
            fit.j_range[1],
            ensemble.len()
        ));
    r.verdict = r.verdict.require_fit(fit.r_squared, MIN_R_SQUARED);
    (r, fit_rows(check, &xs, &ys, intercept, slope))
}

fn blocks(f: &SpectralField<f64>) -> BlockSample {
    block_l2_norms(f, &DyadicPartition::SHARP)
}

#[derive(Clone, Debug, Serialize)]
pub struct OuRegularityParams {
    pub gammas: Vec<f64>,
    pub cutoff: usize,
    pub t: f64,
    pub samples: usize,
    pub j_range: (i32, i32),
}

impl Default for OuRegularityParams {
    fn default() -> Self {
        Self {
            gammas: vec![0.3, 0.6, 0.9],
            cutoff: 1024,
            t: 1.0,
            samples: 200,
            j_range: (2, 7),
        }
    }
}

impl OuRegularityParams {
    pub fn fast() -> Self {
        Self {
            cutoff: 256,
            samples: 60,
            j_range: (2, 5),
            ..Self::default()
        }
    }
}

/// `z` with `q_k = |k|^γ` has Besov exponent `1/2 - γ`.
pub fn ou_regularity(p: &OuRegularityParams, ens: &Ensemble, seed: u64) -> Outcome {
    let fp = fingerprint(p, seed);
    let mut out = Outcome::default();
    for (gi, &gamma) in p.gammas.iter().enumerate() {
        let spec = OUSpec::<f64>::power(gamma, p.cutoff);
        let sample = ens.map(p.samples, |s| {
            blocks(&ou_sample(&spec, p.t, address(seed, TAG_OU + gi as u64, s)))
        });
        let (r, fits) = check_canonical_regularity(
            &format!("ou_regularity gamma={gamma}"),
            "Besov exponent of the OU field, 1/2 - gamma",
            &sample,
            0,
            p.j_range,
            0.5 - gamma,
            OU_EXPONENT,
            &fp,
        );
        out.push(r);
        out.fits.extend(fits);
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelRegularityParams {
    pub alpha: f64,
    pub cutoff: usize,
    pub dt: f64,
    pub horizon: f64,
    pub samples: usize,
    pub j_range: (i32, i32),
}

impl Default for LevelRegularityParams {
    fn default() -> Self {
        Self {
            alpha: 0.8,
            cutoff: 512,
            dt: 1e-4,
            horizon: 0.5,
            samples: 40,
            j_range: (3, 7),
        }
    }
}

impl LevelRegularityParams {
    pub fn fast() -> Self {
        Self {
            cutoff: 256,
            dt: 5e-4,
            samples: 30,
            j_range: (2, 5),
            ..Self::default()
        }
    }
}

/// Final-time block norms of every path of one `𝔛`-system run with the
/// `η/ρ` split, or `None` if the run blew up.
fn level_sample(cfg: &SystemConfig) -> Result<Option<Vec<BlockSample>>, VerifyError> {
    let run = run_split_remainder::<f64>(cfg, Host::Frak)?;
    let mut paths: Vec<&spectral_core::FieldPath<f64>> = run.levels.iter().collect();
    paths.push(&run.remainder);
    paths.extend(run.eta.as_ref());
    paths.extend(run.rho.as_ref());
    let mut out = Vec::with_capacity(paths.len());
    for p in paths {
        match p.last().and_then(|(_, s)| s.field().cloned()) {
            Some(f) => out.push(blocks(&f)),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Levels at `1/2 - α_i`, the remainder at `1/2 - β_n`, `ρ` at `3/2 - α`,
/// and `ρ` smoother than `η` by at least the configured gap.
pub fn level_regularity(
    p: &LevelRegularityParams,
    ens: &Ensemble,
    seed: u64,
) -> Result<Outcome, VerifyError> {
    let fp = fingerprint(p, seed);
    let mut base = SystemConfig::planned(p.alpha, p.cutoff, p.dt, p.horizon, seed)?;
    base.tag = TAG_LEVELS;
    let plan = base.plan.clone();
    let beta = plan
        .beta_n
        .ok_or_else(|| level_solvers::SolverError::Config("the level check needs n >= 1".into()))?;
    let results = ens.map(p.samples, |s| {
        let mut cfg = base.clone();
        cfg.sample = s;
        level_sample(&cfg)
    });
    let mut alive = Vec::new();
    for r in results {
        if let Some(v) = r? {
            alive.push(v);
        }
    }
    let dead = p.samples - alive.len();
    let n = plan.n;
    let column = |i: usize| -> Vec<BlockSample> { alive.iter().map(|s| s[i].clone()).collect() };

    let mut out = Outcome::default();
    let push = |out: &mut Outcome, (r, f): (CheckReport, Vec<FitRow>)| {
        out.push(r);
        out.fits.extend(f);
    };
    for i in 0..=n {
        let c = check_canonical_regularity(
            &format!("level_regularity level={i}"),
            "canonical regularity of level i, 1/2 - alpha_i",
            &column(i),
            dead,
            p.j_range,
            0.5 - plan.alphas[i],
            LEVEL_EXPONENT,
            &fp,
        );
        push(&mut out, c);
    }
    let rem = check_canonical_regularity(
        "level_regularity remainder",
        "canonical regularity of the remainder, 1/2 - beta_n",
        &column(n + 1),
        dead,
        p.j_range,
        0.5 - beta,
        REMAINDER_EXPONENT,
        &fp,
    );
    push(&mut out, rem);
    let eta = check_canonical_regularity(
        "level_regularity eta",
        "regularity of the remainder noise part, 1/2 - beta_n",
        &column(n + 2),
        dead,
        p.j_range,
        0.5 - beta,
        REMAINDER_EXPONENT,
        &fp,
    );
    let rho = check_canonical_regularity(
        "level_regularity rho",
        "regularity of the smooth remainder part, 3/2 - alpha",
        &column(n + 3),
        dead,
        p.j_range,
        1.5 - p.alpha,
        RHO_EXPONENT,
        &fp,
    );
    let gap = rho.0.measured - eta.0.measured;
    push(&mut out, eta);
    push(&mut out, rho);
    out.push(
        judged(
            "level_regularity rho_minus_eta",
            "rho is smoother than eta",
            RHO_ETA_GAP,
            gap,
            RHO_ETA_GAP,
            if gap.is_nan() {
                Verdict::OutOfRegime
            } else {
                Verdict::from_bool(gap >= RHO_ETA_GAP)
            },
            &fp,
        )
        .with_note("pass iff measured >= predicted"),
    );
    Ok(out)
}
