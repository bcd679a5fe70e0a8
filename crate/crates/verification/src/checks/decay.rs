//! Fourier decay of OU fields and their second-chaos functionals.

use gaussian_objects::{
    b_nonlinearity, chaos_decay, ou_sample, sample_jz, ChaosKind, ChaosParams, Etd1, NoiseAddress,
    OUSpec, OuPropagator,
};
use serde::Serialize;
use spectral_core::{
    power_law_fit, resonant_product, DyadicPartition, SpectralField, SpectralGrid,
};

use super::{address, judged, within};
use crate::ensemble::{fingerprint, Ensemble, EnsembleStats};
use crate::report::{fit_rows, CheckReport, FitRow, Outcome, Verdict};
use crate::tolerances::{
    JZ_CIRC_Z_SLOPE, JZ_SLOPE, MIN_R_SQUARED, OU_EXPONENT, RESONANT_SLOPE, WICK2_SLOPE,
    WICK2_SLOPE_ENDPOINT,
};
use crate::VerifyError;

const TAG_DECAY: u64 = 0x0303;

/// Fits `log E|x̂(k)|²` against `log k` on `band` and compares the slope
/// with `-p` from the decay table.
pub fn check_mode_decay(
    kind: ChaosKind,
    params: &ChaosParams,
    stats: &EnsembleStats,
    band: [usize; 2],
    tolerance: f64,
) -> (CheckReport, Vec<FitRow>) {
    let name = match params.delta {
        Some(d) => format!("{}_decay gamma={} delta={d}", kind.name(), params.gamma),
        None => format!("{}_decay gamma={}", kind.name(), params.gamma),
    };
    let reference = "slope of log E|x(k)|^2 against log k equals -p";
    let fp = &stats.fingerprint;
    let spec = match chaos_decay(kind, params) {
        Ok(s) => s,
        Err(e) => {
            let r = judged(
                &name,
                reference,
                f64::NAN,
                f64::NAN,
                tolerance,
                Verdict::OutOfRegime,
                fp,
            )
            .with_note(e.to_string());
            return (r, Vec::new());
        }
    };
    let predicted = -spec.power;
    let out_of_regime = |note: String| {
        (
            judged(
                &name,
                reference,
                predicted,
                f64::NAN,
                tolerance,
                Verdict::OutOfRegime,
                fp,
            )
            .with_note(note),
            Vec::new(),
        )
    };
    if band[0] < spec.k_range[0] || band[1] > spec.k_range[1] || band[0] >= band[1] {
        return out_of_regime(format!(
            "band {band:?} outside the alias-safe range {:?}",
            spec.k_range
        ));
    }
    if stats.n_samples < spectral_core::besov::MIN_FIT_SAMPLES {
        return out_of_regime(format!("{} samples is too few to fit", stats.n_samples));
    }
    let (ks, m2): (Vec<f64>, Vec<f64>) = stats
        .rows
        .iter()
        .filter_map(|r| {
            r.k.filter(|k| (band[0]..=band[1]).contains(k))
                .map(|k| (k as f64, r.m2))
        })
        .unzip();
    let Some(fit) = power_law_fit(&ks, &m2) else {
        return out_of_regime("degenerate fit".into());
    };
    let mut r = within(&name, reference, predicted, fit.slope, tolerance, fp)
        .with_ci(fit.slope, 2.0 * fit.slope_stderr)
        .with_note(format!(
            "R2 {:.4}, k in [{}, {}], n {}",
            fit.r_squared, band[0], band[1], stats.n_samples
        ));
    r.verdict = r.verdict.require_fit(fit.r_squared, MIN_R_SQUARED);
    let lx: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let ly: Vec<f64> = m2.iter().map(|v| v.ln()).collect();
    let rows = fit_rows(&name, &lx, &ly, fit.intercept, fit.slope);
    (r, rows)
}

/// How one ensemble of a chaos object is drawn.
#[derive(Clone, Debug, Serialize)]
pub struct DecayRun {
    pub kind: ChaosKind,
    pub params: ChaosParams,
    pub t: f64,
    /// Length of the history used for `J`; older input is damped by at
    /// least `e^{-k² window}`.
    pub window: f64,
    pub dt: f64,
    pub samples: usize,
    pub band: [usize; 2],
    pub tolerance: f64,
}

impl DecayRun {
    fn new(
        kind: ChaosKind,
        gamma: f64,
        delta: Option<f64>,
        cutoff: usize,
        samples: usize,
        tolerance: f64,
    ) -> Self {
        Self {
            kind,
            params: ChaosParams {
                gamma,
                delta,
                cutoff,
            },
            t: 1.0,
            window: 0.25,
            dt: 1e-4,
            samples,
            band: [4, cutoff / 4],
            tolerance,
        }
    }
}

/// `J(z, z̃)` over the last `window` before `t`, with `J = 0` there.
fn sample_jzz(
    grid: &SpectralGrid<f64>,
    spec: &OUSpec<f64>,
    spec2: &OUSpec<f64>,
    run: &DecayRun,
    addr: NoiseAddress,
) -> Result<SpectralField<f64>, VerifyError> {
    let steps = (run.window / run.dt).round().max(1.0) as u64;
    let dt = run.window / steps as f64;
    let t0 = run.t - run.window;
    let second = NoiseAddress { level: 1, ..addr };
    let mut z = ou_sample(spec, t0, addr);
    let mut w = ou_sample(spec2, t0, second);
    let etd = Etd1::new(grid.cutoff(), dt);
    let prop = OuPropagator::new(grid.cutoff(), dt);
    let (mut j, mut inc) = (
        SpectralField::zeros(grid.cutoff()),
        SpectralField::zeros(grid.cutoff()),
    );
    let mut scratch = Vec::new();
    for m in 0..steps {
        etd.step(&mut j, &b_nonlinearity(grid, &z, &w)?);
        for (field, sp, a) in [(&mut z, spec, addr), (&mut w, spec2, second)] {
            prop.increment(
                sp.spectrum(),
                NoiseAddress { step: m + 1, ..a },
                1,
                &mut scratch,
                &mut inc,
            );
            etd.decay_only(field);
            *field += &inc;
        }
    }
    Ok(j)
}

/// Draws one sample of the object.
fn sample_object(
    run: &DecayRun,
    grid: &SpectralGrid<f64>,
    addr: NoiseAddress,
) -> Result<SpectralField<f64>, VerifyError> {
    let p = &run.params;
    let spec = OUSpec::<f64>::power(p.gamma, p.cutoff);
    let spec2 = || OUSpec::<f64>::power(p.delta.unwrap_or(p.gamma), p.cutoff);
    let second = NoiseAddress { level: 1, ..addr };
    let sharp = DyadicPartition::SHARP;
    Ok(match run.kind {
        ChaosKind::Ou => ou_sample(&spec, run.t, addr),
        ChaosKind::Wick2 => grid.square(&ou_sample(&spec, run.t, addr))?,
        ChaosKind::Jz => sample_jz(grid, &spec, run.t, run.window, run.dt, addr)?.1,
        ChaosKind::ZzResonant => {
            let (z, w) = (
                ou_sample(&spec, run.t, addr),
                ou_sample(&spec2(), run.t, second),
            );
            resonant_product(grid, &z, &w, &sharp)?
        }
        ChaosKind::Jzz => sample_jzz(grid, &spec, &spec2(), run, addr)?,
        ChaosKind::JzCircZ => {
            let (z, theta) = sample_jz(grid, &spec, run.t, run.window, run.dt, addr)?;
            resonant_product(grid, &theta, &z, &sharp)?
        }
        ChaosKind::JzCircZdelta => {
            let theta = sample_jz(grid, &spec, run.t, run.window, run.dt, addr)?.1;
            let w = ou_sample(&spec2(), run.t, NoiseAddress { level: 2, ..addr });
            resonant_product(grid, &theta, &w, &sharp)?
        }
    })
}

/// `|x̂(k)|²` on the fit band for every sample.
pub fn decay_ensemble(
    run: &DecayRun,
    ens: &Ensemble,
    seed: u64,
    tag: u64,
) -> Result<EnsembleStats, VerifyError> {
    let fp = fingerprint(run, seed);
    let grid = SpectralGrid::<f64>::new(run.params.cutoff);
    let [lo, hi] = run.band;
    let samples = ens.map(run.samples, |s| -> Result<Vec<f64>, VerifyError> {
        let x = sample_object(run, &grid, address(seed, tag, s))?;
        Ok((lo..=hi).map(|k| x.mode(k as i64).norm_sqr()).collect())
    });
    let samples: Vec<Vec<f64>> = samples.into_iter().collect::<Result<_, _>>()?;
    Ok(EnsembleStats::by_mode(
        run.kind.name(),
        lo,
        hi,
        &samples,
        fp,
    ))
}

pub fn run_decay_checks(
    runs: &[DecayRun],
    ens: &Ensemble,
    seed: u64,
) -> Result<Outcome, VerifyError> {
    let mut out = Outcome::default();
    for (i, run) in runs.iter().enumerate() {
        // Out-of-regime parameters are reported without sampling.
        let stats = match chaos_decay(run.kind, &run.params) {
            Ok(_) => decay_ensemble(run, ens, seed, TAG_DECAY + i as u64)?,
            Err(_) => EnsembleStats::by_mode(run.kind.name(), 1, 0, &[], fingerprint(run, seed)),
        };
        let (r, fits) = check_mode_decay(run.kind, &run.params, &stats, run.band, run.tolerance);
        out.push(r);
        out.fits.extend(fits);
    }
    Ok(out)
}

/// Reference chaos runs. Wick squares need a large cutoff because the
/// finite-`K` tail of the convolution decays only like `K^{-(4γ-2)}`.
impl DecayRun {
    /// Time-integrated objects on `[16, 64]` at `K = 256`. The forcing is
    /// frozen over each step, so `dt` must resolve the correlation time
    /// `1/(2k²)` of the band; the short window still damps the start-up
    /// transient by `e^{-k² window}` there.
    fn integrated(kind: ChaosKind, gamma: f64, samples: usize, tolerance: f64) -> Self {
        Self {
            dt: 1e-5,
            window: 0.05,
            band: [16, 64],
            ..Self::new(kind, gamma, None, 256, samples, tolerance)
        }
    }
}

pub fn chaos_runs() -> Vec<DecayRun> {
    let mut runs = vec![DecayRun::new(
        ChaosKind::Ou,
        0.6,
        None,
        256,
        200,
        OU_EXPONENT,
    )];
    for g in [0.5, 0.55, 0.6] {
        let tol = if g == 0.5 {
            WICK2_SLOPE_ENDPOINT
        } else {
            WICK2_SLOPE
        };
        runs.push(DecayRun::new(ChaosKind::Wick2, g, None, 8192, 64, tol));
    }
    // The cutoff tail shrinks like K^{-(4γ-3)}, so at γ = 0.7 the band stays
    // far below K and the shallow slope needs a large ensemble.
    runs.push(DecayRun {
        band: [4, 256],
        ..DecayRun::new(ChaosKind::Wick2, 0.7, None, 8192, 2048, WICK2_SLOPE)
    });
    for g in [0.8, 0.85, 0.9] {
        runs.push(DecayRun::integrated(ChaosKind::Jz, g, 256, JZ_SLOPE));
    }
    // Same K^{-(2γ+2δ-3)} tail as the Wick square.
    runs.push(DecayRun {
        band: [4, 64],
        ..DecayRun::new(
            ChaosKind::ZzResonant,
            0.7,
            Some(0.7),
            16384,
            512,
            RESONANT_SLOPE,
        )
    });
    runs.push(DecayRun::integrated(
        ChaosKind::JzCircZ,
        0.6,
        256,
        JZ_CIRC_Z_SLOPE,
    ));
    runs
}

/// Smaller cutoffs and ensembles for smoke runs.
pub fn chaos_runs_fast() -> Vec<DecayRun> {
    vec![
        DecayRun::new(ChaosKind::Ou, 0.6, None, 128, 60, OU_EXPONENT),
        DecayRun::new(ChaosKind::Wick2, 0.6, None, 2048, 128, WICK2_SLOPE),
        DecayRun {
            dt: 2e-5,
            ..DecayRun::integrated(ChaosKind::Jz, 0.85, 64, JZ_SLOPE)
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use gaussian_objects::MomentRow;

    fn stats_from(kind: &str, f: impl Fn(f64) -> f64, n: usize) -> EnsembleStats {
        EnsembleStats {
            kind: kind.into(),
            n_samples: n,
            rows: (1..=64)
                .map(|k| MomentRow {
                    kind: kind.into(),
                    k: Some(k),
                    j: None,
                    n_samples: n,
                    m2: f(k as f64),
                    stderr: 0.0,
                })
                .collect(),
            fingerprint: "t".into(),
        }
    }

    #[test]
    fn exact_power_law_passes() {
        let params = ChaosParams {
            gamma: 0.6,
            delta: None,
            cutoff: 256,
        };
        let st = stats_from("wick2", |k| 3.0 * k.powf(-0.6), 100);
        let (r, fits) = check_mode_decay(ChaosKind::Wick2, &params, &st, [4, 64], WICK2_SLOPE);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((r.measured + 0.6).abs() < 1e-12);
        assert_eq!(fits.len(), 61);
    }

    #[test]
    fn outside_window_is_out_of_regime() {
        let params = ChaosParams {
            gamma: 0.8,
            delta: None,
            cutoff: 256,
        };
        let st = stats_from("wick2", |k| k.powf(-0.2), 100);
        let (r, _) = check_mode_decay(ChaosKind::Wick2, &params, &st, [4, 64], WICK2_SLOPE);
        assert_eq!(r.verdict, Verdict::OutOfRegime);
    }

    #[test]
    fn guards() {
        let params = ChaosParams {
            gamma: 0.6,
            delta: None,
            cutoff: 128,
        };
        let st = stats_from("ou", |k| k.powf(-0.8), 100);
        assert_eq!(
            check_mode_decay(ChaosKind::Ou, &params, &st, [4, 64], 0.1)
                .0
                .verdict,
            Verdict::OutOfRegime
        );
        let few = stats_from("ou", |k| k.powf(-0.8), 10);
        assert_eq!(
            check_mode_decay(ChaosKind::Ou, &params, &few, [4, 32], 0.1)
                .0
                .verdict,
            Verdict::OutOfRegime
        );
        // A wrong slope is a failure, not a pass.
        let wrong = stats_from("ou", |k| k.powf(-1.5), 100);
        assert_eq!(
            check_mode_decay(ChaosKind::Ou, &params, &wrong, [4, 32], 0.1)
                .0
                .verdict,
            Verdict::Fail
        );
    }

    #[test]
    fn poor_fit_is_downgraded() {
        let params = ChaosParams {
            gamma: 0.6,
            delta: None,
            cutoff: 256,
        };
        // Flat on average (slope ≈ -0.6 by construction) but wildly noisy.
        let st = stats_from(
            "wick2",
            |k| k.powf(-0.6) * if (k as usize) % 2 == 0 { 20.0 } else { 0.05 },
            100,
        );
        let (r, _) = check_mode_decay(ChaosKind::Wick2, &params, &st, [4, 64], 10.0);
        assert_eq!(r.verdict, Verdict::OutOfRegime);
    }
}
