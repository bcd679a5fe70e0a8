//! Riemann sums of the Girsanov integrands `‖A^{-β/2} F_s‖²` (plain) and
//! `‖A^{-β/2} e^{-(t-s)A} F_s‖²` (time-shifted) along a drift path.

use serde::{Deserialize, Serialize};
use spectral_core::{FieldPath, Real, SpectralField};

use crate::SolverError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GirsanovMode {
    Plain,
    TimeShifted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GirsanovReport {
    pub mode: GirsanovMode,
    pub beta: f64,
    pub t: f64,
    /// Integral with every mode `≤ K`.
    pub value: f64,
    /// `(K', value)` restricted to modes `≤ K'` for `K' = K/4, K/2, K`.
    pub truncations: Vec<(usize, f64)>,
}

impl GirsanovReport {
    /// Successive ratios `value(2K')/value(K')`.
    pub fn growth(&self) -> Vec<f64> {
        self.truncations
            .windows(2)
            .map(|w| w[1].1 / w[0].1)
            .collect()
    }
}

/// `∫ e^{-2k²(t-s)} ds` over `[a, b]`.
fn shifted_weight(k2: f64, t: f64, a: f64, b: f64) -> f64 {
    if k2 == 0.0 {
        return b - a;
    }
    let lo = (-2.0 * k2 * (t - a)).exp();
    let hi = (-2.0 * k2 * (t - b)).exp();
    (hi - lo) / (2.0 * k2)
}

/// The drift is held at its left-end value on every interval `[t_m, t_{m+1}]`
/// inside `[t_0, t]`. In time-shifted mode the heat factor is integrated
/// exactly per mode on each interval.
pub fn girsanov_integrand_diagnostic<T: Real>(
    drift: &FieldPath<T>,
    beta: f64,
    mode: GirsanovMode,
    t: f64,
) -> Result<GirsanovReport, SolverError> {
    if let Some(td) = drift.death_time() {
        if td.as_f64() <= t {
            return Err(SolverError::DeadPath { time: td.as_f64() });
        }
    }
    let times: Vec<f64> = drift.times().iter().map(|x| x.as_f64()).collect();
    let Some(first) = drift.states().first().and_then(|s| s.field()) else {
        return Err(SolverError::Config("empty drift path".into()));
    };
    let cutoff = first.cutoff();
    // Per-mode integrated weight Σ_m w_m(k) 2|F_m(k)|² k^{-2β}.
    let mut per_mode = vec![0.0f64; cutoff];
    for (m, state) in drift.states().iter().enumerate() {
        let a = times[m];
        if a >= t {
            break;
        }
        let b = times.get(m + 1).copied().unwrap_or(t).min(t);
        let f: &SpectralField<T> = state.field().expect("alive before t");
        for (i, c) in f.coeffs().iter().enumerate() {
            let k = (i + 1) as f64;
            let w = match mode {
                GirsanovMode::Plain => b - a,
                GirsanovMode::TimeShifted => shifted_weight(k * k, t, a, b),
            };
            per_mode[i] += w * 2.0 * c.norm_sqr().as_f64() * k.powf(-2.0 * beta);
        }
    }
    let partial = |k_max: usize| per_mode[..k_max.min(cutoff)].iter().sum::<f64>();
    let truncations: Vec<(usize, f64)> = [cutoff / 4, cutoff / 2, cutoff]
        .into_iter()
        .filter(|&k| k >= 1)
        .map(|k| (k, partial(k)))
        .collect();
    Ok(GirsanovReport {
        mode,
        beta,
        t,
        value: partial(cutoff),
        truncations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::{Complex, FieldState};

    fn constant_e1(cutoff: usize, dt: f64, steps: usize) -> FieldPath<f64> {
        let mut p = FieldPath::new();
        for m in 0..=steps {
            p.push(
                m as f64 * dt,
                FieldState::Alive(SpectralField::single_mode(
                    cutoff,
                    1,
                    Complex::new(1.0, 0.0),
                )),
            )
            .unwrap();
        }
        p
    }

    #[test]
    fn single_mode_closed_forms() {
        let p = constant_e1(8, 0.01, 100);
        let plain = girsanov_integrand_diagnostic(&p, 0.0, GirsanovMode::Plain, 1.0).unwrap();
        assert!((plain.value - 2.0).abs() < 1e-12);
        let ts = girsanov_integrand_diagnostic(&p, 0.0, GirsanovMode::TimeShifted, 1.0).unwrap();
        let want = (1.0 - (-2.0f64).exp()) / 2.0 * 2.0;
        assert!((ts.value - want).abs() < 1e-12);
        assert_eq!(
            ts.truncations.iter().map(|x| x.0).collect::<Vec<_>>(),
            vec![2, 4, 8]
        );
    }

    #[test]
    fn dead_path_is_an_error() {
        let mut p = constant_e1(4, 0.1, 2);
        p.push(
            0.3,
            FieldState::Dead(spectral_core::DeathState { blowup_time: 0.3 }),
        )
        .unwrap();
        assert!(matches!(
            girsanov_integrand_diagnostic(&p, 0.0, GirsanovMode::Plain, 1.0),
            Err(SolverError::DeadPath { .. })
        ));
        assert!(girsanov_integrand_diagnostic(&p, 0.0, GirsanovMode::Plain, 0.2).is_ok());
    }
}
