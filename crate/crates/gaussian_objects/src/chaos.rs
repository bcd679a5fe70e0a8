//! Second-chaos objects built from OU fields: Wick squares, the Burgers
//! nonlinearity, the heat-convolution `J` and resonant products, together
//! with their predicted Fourier decay.

use serde::{Deserialize, Serialize};
use spectral_core::{
    resonant_product, symbol, Complex, DyadicPartition, FieldPath, FieldState, Real, SpectralField,
    SpectralGrid,
};

use crate::ou::{ou_step_variance, wick_constant, NoiseAddress, OUSpec, OuPropagator};
use crate::GaussianError;

/// `z²` with the Wick constant reported alongside. Products drop the mean,
/// so subtracting the constant leaves the coefficients untouched.
#[derive(Clone, Debug)]
pub struct WickSquare<T> {
    pub field: SpectralField<T>,
    pub removed_constant: f64,
}

pub fn wick_square<T: Real>(
    grid: &SpectralGrid<T>,
    field: &SpectralField<T>,
    spec: &OUSpec<T>,
    t: f64,
) -> Result<WickSquare<T>, GaussianError> {
    Ok(WickSquare {
        field: grid.square(field)?,
        removed_constant: wick_constant(spec, t),
    })
}

/// `B(f, g) = ∂ₓ(fg)`.
pub fn b_nonlinearity<T: Real>(
    grid: &SpectralGrid<T>,
    f: &SpectralField<T>,
    g: &SpectralField<T>,
) -> Result<SpectralField<T>, GaussianError> {
    Ok(grid.product(f, g)?.apply_diagonal(symbol::derivative()))
}

/// Exponential Euler for `∂ₜv = -Av + D`, with `D` frozen at the left end
/// of each step.
#[derive(Clone, Debug)]
pub struct Etd1<T> {
    pub dt: f64,
    decay: Vec<T>,
    /// `(1 - e^{-k²dt}) / k² = φ₁(-k²dt)·dt`.
    weight: Vec<T>,
}

impl<T: Real> Etd1<T> {
    pub fn new(cutoff: usize, dt: f64) -> Self {
        let k2 = |k: usize| (k * k) as f64;
        Self {
            dt,
            decay: (1..=cutoff).map(|k| T::lit((-k2(k) * dt).exp())).collect(),
            weight: (1..=cutoff)
                .map(|k| T::lit(-(-k2(k) * dt).exp_m1() / k2(k)))
                .collect(),
        }
    }

    pub fn cutoff(&self) -> usize {
        self.decay.len()
    }

    pub fn decay(&self) -> &[T] {
        &self.decay
    }

    /// `v ← e^{-dtA} v + φ₁(-dtA) dt · drift`.
    pub fn step(&self, v: &mut SpectralField<T>, drift: &SpectralField<T>) {
        for ((c, d), (&a, &w)) in v
            .coeffs_mut()
            .iter_mut()
            .zip(drift.coeffs())
            .zip(self.decay.iter().zip(&self.weight))
        {
            *c = *c * a + *d * w;
        }
    }

    /// Heat flow only: `v ← e^{-dtA} v`.
    pub fn decay_only(&self, v: &mut SpectralField<T>) {
        for (c, &a) in v.coeffs_mut().iter_mut().zip(&self.decay) {
            *c = *c * a;
        }
    }
}

/// `J_t = ∫₀ᵗ e^{-(t-s)A} D_s ds` on the grid of a precomputed drift path.
pub fn j_convolve<T: Real>(drift: &FieldPath<T>) -> Result<FieldPath<T>, GaussianError> {
    if let Some(t) = drift.death_time() {
        return Err(GaussianError::DeadNode { time: t.as_f64() });
    }
    let Some((_, first)) = drift.states().first().map(|s| ((), s)) else {
        return Ok(FieldPath::new());
    };
    let cutoff = first.field().map_or(0, |f| f.cutoff());
    let mut out = FieldPath::new();
    let mut j = SpectralField::zeros(cutoff);
    out.push(drift.times()[0], FieldState::Alive(j.clone()))?;
    if drift.len() == 1 {
        return Ok(out);
    }
    let dt = drift
        .uniform_step(T::lit(1e-9))
        .ok_or(GaussianError::NonUniformGrid)?;
    let etd = Etd1::new(cutoff, dt.as_f64());
    for (m, state) in drift.states()[..drift.len() - 1].iter().enumerate() {
        let d = state.field().expect("checked alive above");
        etd.step(&mut j, d);
        out.push(drift.times()[m + 1], FieldState::Alive(j.clone()))?;
    }
    Ok(out)
}

/// Draws `(z_t, J(z)_t)`.
///
/// `z` starts from an exact sample at `t - window` and `J` from zero there;
/// older contributions to `J_t(k)` are damped by `e^{-k² window}`. Step `m`
/// of the path uses draw index `m + 1` at the given level.
pub fn sample_jz<T: Real>(
    grid: &SpectralGrid<T>,
    spec: &OUSpec<T>,
    t: f64,
    window: f64,
    dt: f64,
    noise: NoiseAddress,
) -> Result<(SpectralField<T>, SpectralField<T>), GaussianError> {
    let window = window.min(t);
    let steps = (window / dt).round().max(1.0) as u64;
    let dt = window / steps as f64;
    let t0 = t - window;
    let mut z = if t0 > 0.0 {
        crate::ou::ou_sample(spec, t0, NoiseAddress { step: 0, ..noise })
    } else {
        spec.initial()
    };
    let etd = Etd1::new(spec.cutoff(), dt);
    let prop = OuPropagator::new(spec.cutoff(), dt);
    let mut j = SpectralField::zeros(spec.cutoff());
    let mut inc = SpectralField::zeros(spec.cutoff());
    let mut scratch = Vec::new();
    for m in 0..steps {
        etd.step(&mut j, &b_nonlinearity(grid, &z, &z)?);
        prop.increment(
            spec.spectrum(),
            NoiseAddress {
                step: m + 1,
                ..noise
            },
            1,
            &mut scratch,
            &mut inc,
        );
        etd.decay_only(&mut z);
        z += &inc;
    }
    let tag = T::lit(t);
    Ok((z.with_time_tag(tag), j.with_time_tag(tag)))
}

/// `ϑ_t ∘ z_t` for `ϑ = J(z)`, with `z` the same field that generated `ϑ`.
pub fn sample_jz_circ_z<T: Real>(
    grid: &SpectralGrid<T>,
    spec: &OUSpec<T>,
    t: f64,
    window: f64,
    dt: f64,
    noise: NoiseAddress,
    partition: &DyadicPartition,
) -> Result<SpectralField<T>, GaussianError> {
    let (z, theta) = sample_jz(grid, spec, t, window, dt, noise)?;
    Ok(resonant_product(grid, &theta, &z, partition)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChaosKind {
    Ou,
    Wick2,
    Jz,
    ZzResonant,
    Jzz,
    JzCircZ,
    JzCircZdelta,
}

impl ChaosKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ou => "ou",
            Self::Wick2 => "wick2",
            Self::Jz => "jz",
            Self::ZzResonant => "zz_resonant",
            Self::Jzz => "jzz",
            Self::JzCircZ => "jz_circ_z",
            Self::JzCircZdelta => "jz_circ_z_delta",
        }
    }
}

/// Exponents of the object; `delta` is the second field's exponent where
/// two independent fields enter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChaosParams {
    pub gamma: f64,
    pub delta: Option<f64>,
    pub cutoff: usize,
}

/// Predicted `E|x̂(k)|² ≲ |k|^{-p}` with `p = 1 + 2κ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySpec {
    pub power: f64,
    pub k_range: [usize; 2],
    pub holder_exponent: f64,
}

impl DecaySpec {
    fn new(power: f64, cutoff: usize) -> Self {
        Self {
            power,
            k_range: [4, (cutoff / 4).max(4)],
            holder_exponent: (power - 1.0) / 2.0,
        }
    }
}

fn require(ok: bool, kind: ChaosKind, condition: &str) -> Result<(), GaussianError> {
    if ok {
        Ok(())
    } else {
        Err(GaussianError::OutOfRegime {
            kind: kind.name(),
            condition: condition.to_owned(),
        })
    }
}

/// Decay power of each object inside the range where it is known to exist.
pub fn chaos_decay(kind: ChaosKind, params: &ChaosParams) -> Result<DecaySpec, GaussianError> {
    let g = params.gamma;
    let delta = || {
        params.delta.ok_or(GaussianError::OutOfRegime {
            kind: kind.name(),
            condition: "delta required".into(),
        })
    };
    let power = match kind {
        ChaosKind::Ou => 2.0 - 2.0 * g,
        ChaosKind::Wick2 => {
            require((0.5..0.75).contains(&g), kind, "1/2 <= gamma < 3/4")?;
            3.0 - 4.0 * g
        }
        ChaosKind::Jz => {
            require((0.5..1.0).contains(&g), kind, "1/2 <= gamma < 1")?;
            5.0 - 4.0 * g
        }
        ChaosKind::ZzResonant => {
            let d = delta()?;
            require(g + d < 1.5, kind, "gamma + delta < 3/2")?;
            3.0 - 2.0 * g - 2.0 * d
        }
        ChaosKind::Jzz => {
            let d = delta()?;
            require(
                (1.5..2.0).contains(&(g + d)),
                kind,
                "3/2 <= gamma + delta < 2",
            )?;
            5.0 - 2.0 * g - 2.0 * d
        }
        ChaosKind::JzCircZ => {
            require((0.5..1.0).contains(&g), kind, "1/2 <= gamma < 1")?;
            6.0 - 6.0 * g
        }
        ChaosKind::JzCircZdelta => {
            let d = delta()?;
            require((0.5..1.0).contains(&g), kind, "1/2 <= gamma < 1")?;
            6.0 - 4.0 * g - 2.0 * d
        }
    };
    Ok(DecaySpec::new(power, params.cutoff))
}

/// Exact `E|ŵ(k)|²` for `w = z_t^{◇2}` at finite cutoff:
/// `2 Σ_{k₁+k₂=k, 0<|kᵢ|≤K} s(k₁) s(k₂)` with `s` the mode variance at `t`.
pub fn wick2_oracle<T: Real>(spec: &OUSpec<T>, k: usize, t: f64) -> f64 {
    let cutoff = spec.cutoff() as i64;
    let s = |m: i64| {
        let m = m.unsigned_abs() as usize;
        spec.q(m).as_f64().powi(2) * ou_step_variance(m, t)
    };
    let k = k as i64;
    let lo = (k - cutoff).max(-cutoff);
    let hi = (k + cutoff).min(cutoff);
    2.0 * (lo..=hi)
        .filter(|&k1| k1 != 0 && k1 != k)
        .map(|k1| s(k1) * s(k - k1))
        .sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumMode {
    Full,
    /// Only pairs whose dyadic blocks differ by at most one.
    Resonant,
}

/// `Σ_{k₁+k₂=k, 0<|kᵢ|≤K} |k₁|^{-a} |k₂|^{-b}` by direct summation.
pub fn convolution_sum_bruteforce(a: f64, b: f64, k: i64, k_sum: i64, mode: SumMode) -> f64 {
    let lo = (k - k_sum).max(-k_sum);
    let hi = (k + k_sum).min(k_sum);
    let mut total = 0.0;
    for k1 in lo..=hi {
        let k2 = k - k1;
        if k1 == 0 || k2 == 0 {
            continue;
        }
        let (m1, m2) = (k1.unsigned_abs() as usize, k2.unsigned_abs() as usize);
        if mode == SumMode::Resonant
            && (DyadicPartition::sharp_block(m1) - DyadicPartition::sharp_block(m2)).abs() > 1
        {
            continue;
        }
        total += (m1 as f64).powf(-a) * (m2 as f64).powf(-b);
    }
    total
}

/// `z + i·0` helper for tests and callers building drifts by hand.
pub fn real_mode<T: Real>(cutoff: usize, k: usize, value: f64) -> SpectralField<T> {
    SpectralField::single_mode(cutoff, k, Complex::new(T::lit(value), T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseStream;
    use crate::ou::ou_sample;
    use spectral_core::grid::{analyze, synthesize};

    fn addr(sample: u64) -> NoiseAddress {
        NoiseAddress {
            stream: NoiseStream::new(11).with_sample(sample),
            level: 0,
            step: 0,
        }
    }

    #[test]
    fn burgers_term_of_cosine() {
        let grid = SpectralGrid::new(4);
        let cos = real_mode::<f64>(4, 1, 0.5);
        let b = b_nonlinearity(&grid, &cos, &cos).unwrap();
        assert!((b.mode(2) - Complex::new(0.0, 0.5)).norm() < 1e-15);
        assert!(b.mode(1).norm() < 1e-15);
        let zero = b_nonlinearity(&grid, &cos, &SpectralField::zeros(4)).unwrap();
        assert!(zero.coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn burgers_term_grid_oracle() {
        let f = SpectralField::from_fn(8, |k| Complex::new(1.0 / k as f64, (k as f64).sin()));
        let g = SpectralField::from_fn(8, |k| Complex::new((k as f64).cos(), 0.3));
        let pv: Vec<f64> = synthesize(&f, 64)
            .iter()
            .zip(synthesize(&g, 64))
            .map(|(a, b)| a * b)
            .collect();
        let oracle = analyze(&pv, 8).apply_diagonal(symbol::derivative());
        let b = b_nonlinearity(&SpectralGrid::new(8), &f, &g).unwrap();
        let b2 = b_nonlinearity(&SpectralGrid::new(8), &g, &f).unwrap();
        for k in 1..=8 {
            assert!((b.mode(k) - oracle.mode(k)).norm() < 1e-12 * oracle.l2_norm());
            assert!((b.mode(k) - b2.mode(k)).norm() < 1e-12 * oracle.l2_norm());
        }
    }

    #[test]
    fn wick_constant_metadata() {
        let spec = OUSpec::<f64>::power(0.0, 1);
        let w = wick_square(
            &SpectralGrid::new(1),
            &SpectralField::zeros(1),
            &spec,
            f64::INFINITY,
        )
        .unwrap();
        assert!((w.removed_constant - 1.0).abs() < 1e-15);
        assert!(w.field.coeffs().iter().all(|c| c.norm() == 0.0));
        let spec = OUSpec::<f64>::power(0.6, 8);
        let direct: f64 = (1..=8)
            .map(|k| {
                let k2 = (k * k) as f64;
                2.0 * (k as f64).powf(1.2) * (1.0 - (-2.0 * k2 * 0.3).exp()) / (2.0 * k2)
            })
            .sum();
        assert!((wick_constant(&spec, 0.3) - direct).abs() < 1e-14);
    }

    fn path(times: &[f64], f: impl Fn(f64) -> SpectralField<f64>) -> FieldPath<f64> {
        let mut p = FieldPath::new();
        for &t in times {
            p.push(t, FieldState::Alive(f(t))).unwrap();
        }
        p
    }

    #[test]
    fn constant_drift_is_exact() {
        let times: Vec<f64> = (0..=100).map(|m| m as f64 * 0.01).collect();
        let j = j_convolve(&path(&times, |_| real_mode(3, 1, 1.0))).unwrap();
        for (t, s) in j.times().iter().zip(j.states()) {
            let c = s.field().unwrap().mode(1).re;
            assert!((c - (1.0 - (-t).exp())).abs() < 1e-14, "t = {t}");
        }
        let zero = j_convolve(&path(&times, |_| SpectralField::zeros(3))).unwrap();
        assert!(zero
            .states()
            .iter()
            .all(|s| s.field().unwrap().l2_norm() == 0.0));
    }

    #[test]
    fn nonuniform_and_dead_rejected() {
        let p = path(&[0.0, 0.1, 0.3], |_| real_mode(2, 1, 1.0));
        assert!(matches!(j_convolve(&p), Err(GaussianError::NonUniformGrid)));
        let mut p = path(&[0.0, 0.1], |_| real_mode(2, 1, 1.0));
        p.push(
            0.2,
            FieldState::Dead(spectral_core::DeathState { blowup_time: 0.2 }),
        )
        .unwrap();
        assert!(matches!(
            j_convolve(&p),
            Err(GaussianError::DeadNode { .. })
        ));
    }

    #[test]
    fn linear_drift_first_order() {
        // Mode 2 forced by s: J_1 = ∫₀¹ e^{-4(1-s)} s ds = (3 + e^{-4}) / 16.
        let exact = (3.0 + (-4.0f64).exp()) / 16.0;
        let err = |dt: f64| {
            let n = (1.0 / dt).round() as usize;
            let times: Vec<f64> = (0..=n).map(|m| m as f64 * dt).collect();
            let j = j_convolve(&path(&times, |t| real_mode(2, 2, t))).unwrap();
            (j.last().unwrap().1.field().unwrap().mode(2).re - exact).abs()
        };
        // Cross-check the closed form against a fine reference run.
        assert!(err(1e-5) < 1e-5);
        let (e1, e2) = (err(1e-2), err(5e-3));
        assert!((e1 / e2 - 2.0).abs() < 0.4, "ratio {}", e1 / e2);
    }

    #[test]
    fn decay_powers() {
        let p = |g, d: Option<f64>| ChaosParams {
            gamma: g,
            delta: d,
            cutoff: 128,
        };
        let w = chaos_decay(ChaosKind::Wick2, &p(0.6, None)).unwrap();
        assert!((w.power - 0.6).abs() < 1e-12 && (w.holder_exponent + 0.2).abs() < 1e-12);
        let j = chaos_decay(ChaosKind::Jz, &p(0.8, None)).unwrap();
        assert!((j.power - 1.8).abs() < 1e-12 && (j.holder_exponent - 0.4).abs() < 1e-12);
        assert!(chaos_decay(ChaosKind::ZzResonant, &p(0.7, Some(0.7))).is_ok());
        match chaos_decay(ChaosKind::ZzResonant, &p(0.8, Some(0.8))) {
            Err(GaussianError::OutOfRegime { condition, .. }) => {
                assert_eq!(condition, "gamma + delta < 3/2")
            }
            other => panic!("{other:?}"),
        }
        assert!(chaos_decay(ChaosKind::Wick2, &p(0.8, None)).is_err());
        let t = chaos_decay(ChaosKind::JzCircZ, &p(0.6, None)).unwrap();
        assert!((t.power - 2.4).abs() < 1e-12);
        assert_eq!(t.k_range, [4, 32]);
    }

    #[test]
    fn wick2_oracle_small_case() {
        // K = 2, k = 1: pairs (2,-1) and (-1,2).
        let spec = OUSpec::<f64>::power(0.5, 2);
        let s = |k: usize| spec.q(k).powi(2) * ou_step_variance(k, 1.0);
        let want = 2.0 * 2.0 * s(2) * s(1);
        assert!((wick2_oracle(&spec, 1, 1.0) - want).abs() < 1e-15);
    }

    #[test]
    fn wick2_ensemble_matches_oracle() {
        let k_max = 16;
        let spec = OUSpec::<f64>::power(0.6, k_max);
        let grid = SpectralGrid::new(k_max);
        let n = 4000;
        let mut acc: Vec<Vec<f64>> = (0..5).map(|_| Vec::with_capacity(n)).collect();
        for i in 0..n as u64 {
            let z = ou_sample(&spec, 1.0, addr(i));
            let w = wick_square(&grid, &z, &spec, 1.0).unwrap().field;
            for (k, a) in acc.iter_mut().enumerate() {
                a.push(w.mode(k as i64 + 1).norm_sqr());
            }
        }
        for (k, a) in acc.iter().enumerate() {
            let (m, se) = crate::moments::mean_stderr(a);
            let want = wick2_oracle(&spec, k + 1, 1.0);
            assert!(
                (m - want).abs() < 4.0 * se,
                "k = {}: {m} ± {se} vs {want}",
                k + 1
            );
        }
    }

    #[test]
    fn fsum_cases() {
        let full = convolution_sum_bruteforce(1.2, 1.2, 8, 1000, SumMode::Full);
        let res = convolution_sum_bruteforce(1.2, 1.2, 8, 1000, SumMode::Resonant);
        assert!(full > res && res > 0.0);
        // k = 1, K = 1: no admissible pair (k₂ would be 0 or 2).
        assert_eq!(
            convolution_sum_bruteforce(1.0, 1.0, 1, 1, SumMode::Full),
            0.0
        );
        // k = 2, K = 1: only 1 + 1.
        assert_eq!(
            convolution_sum_bruteforce(0.5, 0.5, 2, 1, SumMode::Full),
            1.0
        );
        let d1 = convolution_sum_bruteforce(0.4, 0.4, 4, 1000, SumMode::Full);
        let d2 = convolution_sum_bruteforce(0.4, 0.4, 4, 2000, SumMode::Full);
        assert!(d2 / d1 > 1.1);
    }
}
