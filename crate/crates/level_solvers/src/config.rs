use serde::{Deserialize, Serialize};

use gaussian_objects::NoiseStream;
use noise_planner::{
    materialize_spectra, plan_schedule, power_spectrum, LevelPlan, LevelSpectra, MarginPolicy,
};
use spectral_core::{Complex, Real, SpectralField};

use crate::SolverError;

/// Tag offset separating the direct solver's own noise from the level noise.
pub const DIRECT_TAG_OFFSET: u64 = 1 << 32;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// The direct solver is driven by the sum of all level increments.
    #[default]
    Coupled,
    /// The direct solver draws its own noise with the base spectrum.
    Independent,
}

/// Where `u0` enters the decomposed systems.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialPlacement {
    /// Levels start at 0 and the remainder at `u0`.
    #[default]
    Remainder,
    /// Level 0 starts at `u0`, everything else at 0.
    FirstLevel,
    /// Every level starts at `u0/(n+1)`, the remainder at 0.
    Spread,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InitialCondition {
    #[default]
    Zero,
    /// `c_k = re + i·im` on a single mode.
    Mode { k: usize, re: f64, im: f64 },
    /// Explicit `[re, im]` pairs for `k = 1, 2, …`; missing modes are zero.
    Coeffs { coeffs: Vec<[f64; 2]> },
}

impl InitialCondition {
    pub fn field<T: Real>(&self, cutoff: usize) -> SpectralField<T> {
        let mut f = SpectralField::zeros(cutoff);
        match self {
            Self::Zero => {}
            Self::Mode { k, re, im } => {
                if (1..=cutoff).contains(k) {
                    f.set_mode(*k, Complex::new(T::lit(*re), T::lit(*im)));
                }
            }
            Self::Coeffs { coeffs } => {
                for (i, c) in coeffs.iter().take(cutoff).enumerate() {
                    f.set_mode(i + 1, Complex::new(T::lit(c[0]), T::lit(c[1])));
                }
            }
        }
        f
    }
}

/// Draws for levels `≥ from_level` (the remainder counts as above every
/// level) come from `seed` instead of the run seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reseed {
    pub from_level: u32,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub plan: LevelPlan,
    #[serde(rename = "K")]
    pub cutoff: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(default)]
    pub u0: InitialCondition,
    #[serde(default)]
    pub z0: InitialCondition,
    /// Declared Hölder exponent of `u0`, used only to classify the run.
    #[serde(default)]
    pub u0_regularity: Option<f64>,
    #[serde(default = "default_threshold")]
    pub blowup_threshold: f64,
    pub seed: u64,
    #[serde(default)]
    pub sample: u64,
    #[serde(default)]
    pub tag: u64,
    /// Multiplies every noise amplitude; 0 gives deterministic Burgers.
    #[serde(default = "one")]
    pub noise_amplitude: f64,
    #[serde(default)]
    pub noise: NoiseMode,
    /// Fine noise steps per solver step; equal `dt/substeps` across runs
    /// share one Brownian path.
    #[serde(default = "one_u64")]
    pub substeps: u64,
    /// Keep every `snapshot_every`-th node (the last node is always kept).
    #[serde(default = "one_usize")]
    pub snapshot_every: usize,
    #[serde(default)]
    pub placement: InitialPlacement,
    #[serde(default)]
    pub reseed: Option<Reseed>,
}

fn default_threshold() -> f64 {
    1e8
}
fn one() -> f64 {
    1.0
}
fn one_u64() -> u64 {
    1
}
fn one_usize() -> usize {
    1
}

impl SystemConfig {
    /// Planned configuration with defaults for everything but the grid.
    pub fn planned(
        alpha: f64,
        cutoff: usize,
        dt: f64,
        horizon: f64,
        seed: u64,
    ) -> Result<Self, SolverError> {
        Ok(Self {
            plan: plan_schedule(alpha, MarginPolicy::EqualSlack)?,
            cutoff,
            dt,
            horizon,
            u0: InitialCondition::Zero,
            z0: InitialCondition::Zero,
            u0_regularity: None,
            blowup_threshold: default_threshold(),
            seed,
            sample: 0,
            tag: 0,
            noise_amplitude: 1.0,
            noise: NoiseMode::Coupled,
            substeps: 1,
            snapshot_every: usize::MAX,
            placement: InitialPlacement::Remainder,
            reseed: None,
        })
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::Config(m.to_owned()));
        if self.cutoff == 0 {
            return bad("K must be positive");
        }
        if !(self.dt > 0.0 && self.horizon > 0.0) {
            return bad("dt and T must be positive");
        }
        if self.dt > self.horizon / 10.0 * (1.0 + 1e-12) {
            return bad("dt must not exceed T/10");
        }
        let steps = self.horizon / self.dt;
        if (steps - steps.round()).abs() > 1e-6 * steps.max(1.0) {
            return bad("T must be an integer multiple of dt");
        }
        if self.substeps == 0 || self.snapshot_every == 0 {
            return bad("substeps and snapshot_every must be positive");
        }
        if !(self.blowup_threshold > 0.0) {
            return bad("blow-up threshold must be positive");
        }
        if !(self.noise_amplitude >= 0.0 && self.noise_amplitude.is_finite()) {
            return bad("noise amplitude must be finite and nonnegative");
        }
        Ok(())
    }

    pub fn steps(&self) -> u64 {
        (self.horizon / self.dt).round() as u64
    }

    /// Per-level spectra for the base `q_k = |k|^α`, scaled by the noise
    /// amplitude.
    pub fn spectra(&self) -> Result<LevelSpectra, SolverError> {
        let mut s = materialize_spectra(&self.plan, self.cutoff, power_spectrum(self.plan.alpha))?;
        let a = self.noise_amplitude;
        for v in s.levels.iter_mut().chain([&mut s.remainder, &mut s.base]) {
            v.iter_mut().for_each(|q| *q *= a);
        }
        Ok(s)
    }

    /// Stream for level id `level` (the remainder uses `REMAINDER_LEVEL`).
    pub fn stream(&self, level: u32) -> NoiseStream {
        let seed = match self.reseed {
            Some(r) if level >= r.from_level => r.seed,
            _ => self.seed,
        };
        NoiseStream::new(seed)
            .with_sample(self.sample)
            .with_tag(self.tag)
    }

    pub fn direct_stream(&self) -> NoiseStream {
        NoiseStream::new(self.seed)
            .with_sample(self.sample)
            .with_tag(self.tag.wrapping_add(DIRECT_TAG_OFFSET))
    }
}
