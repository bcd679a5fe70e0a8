//! The level sum against the direct equation under coupled noise, and the
//! time-step order of the shared discretization.

use level_solvers::{run_direct_burgers, run_x_system, InitialCondition, NoiseMode, SystemConfig};
use serde::Serialize;
use spectral_core::{FieldPath, SpectralField};

use super::judged;
use crate::ensemble::{fingerprint, Ensemble};
use crate::report::{Outcome, Verdict};
use crate::tolerances::{DECOMPOSITION_GAP, ORDER_TARGET, ORDER_TOLERANCE, ZERO_NOISE_GAP};
use crate::VerifyError;

const TAG_DECOMPOSITION: u64 = 0x0707;
/// How often the horizon may be halved after a blow-up.
const MAX_HALVINGS: u32 = 3;

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionParams {
    pub alpha: f64,
    pub cutoff: usize,
    pub dt: f64,
    pub horizon: f64,
    pub samples: usize,
}

impl Default for DecompositionParams {
    fn default() -> Self {
        Self {
            alpha: 0.6,
            cutoff: 64,
            dt: 1e-3,
            horizon: 0.5,
            samples: 8,
        }
    }
}

impl DecompositionParams {
    pub fn fast() -> Self {
        Self {
            cutoff: 32,
            samples: 8,
            ..Self::default()
        }
    }
}

fn final_field(p: &FieldPath<f64>) -> Option<SpectralField<f64>> {
    p.last().and_then(|(_, s)| s.field().cloned())
}

fn distance(a: &SpectralField<f64>, b: &SpectralField<f64>) -> f64 {
    let mut d = a.clone();
    d -= b;
    d.l2_norm()
}

/// Per sample: `‖u_T - Σ‖`, `‖u_T‖`, and the two successive differences of
/// the level sum at `dt`, `dt/2`, `dt/4`; `None` on blow-up.
type SampleGaps = Option<(f64, f64, f64, f64)>;

fn sample_gaps(base: &SystemConfig) -> Result<SampleGaps, VerifyError> {
    // All three resolutions share the Brownian path sampled at dt/4.
    let mut sums = Vec::with_capacity(3);
    let mut direct = None;
    for (i, substeps) in [4u64, 2, 1].into_iter().enumerate() {
        let mut cfg = base.clone();
        cfg.dt = base.dt / (1u64 << i) as f64;
        cfg.substeps = substeps;
        let Some(sum) = final_field(&run_x_system::<f64>(&cfg)?.sum) else {
            return Ok(None);
        };
        if i == 0 {
            let Some(u) = final_field(&run_direct_burgers::<f64>(&cfg)?) else {
                return Ok(None);
            };
            direct = Some(u);
        }
        sums.push(sum);
    }
    let u = direct.expect("set on the first resolution");
    Ok(Some((
        distance(&u, &sums[0]),
        u.l2_norm(),
        distance(&sums[0], &sums[1]),
        distance(&sums[1], &sums[2]),
    )))
}

/// Discrepancy between the direct solution and `ΣX^{(i)} + R^{(n)}` at the
/// reference step, the observed order from a Richardson triple, and the
/// same discrepancy with the noise off.
pub fn check_decomposition_identity(
    p: &DecompositionParams,
    ens: &Ensemble,
    seed: u64,
) -> Result<Outcome, VerifyError> {
    let fp = fingerprint(p, seed);
    let mut horizon = p.horizon;
    let mut halvings = 0;
    let gaps = loop {
        let mut base = SystemConfig::planned(p.alpha, p.cutoff, p.dt, horizon, seed)?;
        base.tag = TAG_DECOMPOSITION;
        base.noise = NoiseMode::Coupled;
        let results = ens.map(p.samples, |s| {
            let mut cfg = base.clone();
            cfg.sample = s;
            sample_gaps(&cfg)
        });
        let results: Vec<SampleGaps> = results.into_iter().collect::<Result<_, _>>()?;
        if results.iter().all(Option::is_some) || halvings == MAX_HALVINGS {
            break results;
        }
        horizon /= 2.0;
        halvings += 1;
    };
    let alive: Vec<(f64, f64, f64, f64)> = gaps.iter().flatten().copied().collect();
    let mut note = format!("T = {horizon}, n {}", alive.len());
    if halvings > 0 {
        note.push_str(&format!(
            ", horizon halved {halvings} time(s) after blow-up"
        ));
    }
    let mut out = Outcome::default();
    if alive.len() < gaps.len() {
        for check in ["decomposition_gap", "decomposition_order"] {
            out.push(
                judged(
                    check,
                    "blow-up before T",
                    0.0,
                    f64::NAN,
                    0.0,
                    Verdict::OutOfRegime,
                    &fp,
                )
                .with_note(format!(
                    "{} of {} samples blew up",
                    gaps.len() - alive.len(),
                    gaps.len()
                )),
            );
        }
    } else {
        let gap = alive.iter().map(|g| g.0 / g.1).fold(0.0, f64::max);
        out.push(
            judged(
                "decomposition_gap",
                "relative L2 gap between direct u_T and the level sum",
                0.0,
                gap,
                DECOMPOSITION_GAP,
                Verdict::from_bool(gap < DECOMPOSITION_GAP),
                &fp,
            )
            .with_note(format!(
                "largest over samples; pass iff measured < tolerance; {note}"
            )),
        );
        let e1: f64 = alive.iter().map(|g| g.2 * g.2).sum();
        let e2: f64 = alive.iter().map(|g| g.3 * g.3).sum();
        let order = 0.5 * (e1 / e2).log2();
        out.push(
            judged(
                "decomposition_order",
                "time-step order from successive differences at dt, dt/2, dt/4",
                ORDER_TARGET,
                order,
                ORDER_TOLERANCE,
                Verdict::from_bool((order - ORDER_TARGET).abs() <= ORDER_TOLERANCE),
                &fp,
            )
            .with_note(format!(
                "rms differences {:.3e} and {:.3e}; {note}",
                (e1 / alive.len() as f64).sqrt(),
                (e2 / alive.len() as f64).sqrt()
            )),
        );
    }
    out.push(zero_noise_gap(p, seed, &fp)?);
    Ok(out)
}

fn zero_noise_gap(
    p: &DecompositionParams,
    seed: u64,
    fp: &str,
) -> Result<crate::CheckReport, VerifyError> {
    let mut cfg = SystemConfig::planned(p.alpha, p.cutoff, p.dt, p.horizon, seed)?;
    cfg.noise_amplitude = 0.0;
    cfg.u0 = InitialCondition::Coeffs {
        coeffs: vec![[0.6, 0.0], [0.0, -0.4], [0.25, 0.25]],
    };
    let u = final_field(&run_direct_burgers::<f64>(&cfg)?);
    let sum = final_field(&run_x_system::<f64>(&cfg)?.sum);
    let gap = match (u, sum) {
        (Some(u), Some(s)) => distance(&u, &s) / u.l2_norm(),
        _ => f64::NAN,
    };
    Ok(judged(
        "decomposition_zero_noise",
        "with the noise off the level sum is deterministic Burgers",
        0.0,
        gap,
        ZERO_NOISE_GAP,
        Verdict::from_bool(gap <= ZERO_NOISE_GAP),
        fp,
    ))
}
