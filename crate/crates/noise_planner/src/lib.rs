//! Planning the multilevel noise decomposition.
//!
//! For forcing `Q ≈ A^{α/2}` with `α ∈ [1/2, 1)` the noise is split into
//! `n + 2` independent slices `Q_0, …, Q_n, Q̃` with
//! `QQ* = Σ Q_iQ_i* + Q̃Q̃*`. Slice `i` has roughness `α_i`, the remainder
//! slice has `β_n`, and the exponents must satisfy
//!
//! * `β_n < α_n < … < α_0 = α`,
//! * `α_n < 1/2 ≤ α_{n-1}`,
//! * `α_0 + α_{i-1} - α_i < 1` for `1 ≤ i ≤ n`,
//! * `α_0 - β_n < 1/2`.
//!
//! The least admissible `n` is the least `n` with `α < (2n+1)/(2n+2)`.

// Negated comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("alpha = {alpha} is unsupported: the level decomposition needs alpha < 1")]
    UnsupportedRegime { alpha: f64 },
    #[error("plan violates {0} constraint(s); first: {1}")]
    InvalidPlan(usize, String),
    #[error("residual spectrum q_0(k)^2 = {value} is not positive at k = {k}")]
    InfeasibleBase { k: usize, value: f64 },
}

/// Least number of levels for roughness `alpha`.
pub fn minimal_levels(alpha: f64) -> Result<usize, PlanError> {
    if !(alpha < 1.0) {
        return Err(PlanError::UnsupportedRegime { alpha });
    }
    if alpha < 0.5 {
        return Ok(0);
    }
    let mut n = ((2.0 * alpha - 1.0) / (2.0 * (1.0 - alpha))).floor() as usize + 1;
    // Guard the closed form against rounding at the jump points.
    while n > 1 && alpha < level_threshold(n - 1) {
        n -= 1;
    }
    while alpha >= level_threshold(n) {
        n += 1;
    }
    Ok(n)
}

/// `(2n+1)/(2n+2)`: `n` levels suffice exactly for `α` below this.
pub fn level_threshold(n: usize) -> f64 {
    (2 * n + 1) as f64 / (2 * n + 2) as f64
}

/// Schedule choice; only the closed-form equal-slack rule is offered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarginPolicy {
    #[default]
    EqualSlack,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelPlan {
    pub alpha: f64,
    pub n: usize,
    /// `α_0 = α, α_1, …, α_n`.
    pub alphas: Vec<f64>,
    /// `None` in the single-equation regime `n = 0`.
    pub beta_n: Option<f64>,
    pub scheme: MarginPolicy,
}

/// Equal-slack schedule: with `L_i = (i+1)α - i` and `g = (1/2 - L_n)/(2n)`,
/// `α_i = L_i + i g` and `β_n` is the midpoint of `(α - 1/2, α_n)`.
pub fn plan_schedule(alpha: f64, policy: MarginPolicy) -> Result<LevelPlan, PlanError> {
    let n = minimal_levels(alpha)?;
    if n == 0 {
        return Ok(LevelPlan {
            alpha,
            n,
            alphas: vec![alpha],
            beta_n: None,
            scheme: policy,
        });
    }
    let lower = |i: usize| (i as f64 + 1.0) * alpha - i as f64;
    let g = (0.5 - lower(n)) / (2.0 * n as f64);
    let mut alphas = vec![alpha];
    alphas.extend((1..=n).map(|i| lower(i) + i as f64 * g));
    let beta = 0.5 * ((alpha - 0.5) + alphas[n]);
    Ok(LevelPlan {
        alpha,
        n,
        alphas,
        beta_n: Some(beta),
        scheme: policy,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Constraint {
    Supported,
    Shape,
    Ordering,
    LevelBoundary,
    CameronMartin {
        level: usize,
    },
    Remainder,
    /// `α_0 + α_{i-1} - α_i < 3/2`; implied by the Cameron-Martin bound.
    Regularity {
        level: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub detail: String,
    pub informational: bool,
}

pub fn is_valid(violations: &[Violation]) -> bool {
    violations.iter().all(|v| v.informational)
}

/// Signed slack of every constraint (positive = satisfied).
pub fn constraint_margins(plan: &LevelPlan) -> Vec<(Constraint, f64)> {
    let mut out = vec![(Constraint::Supported, 1.0 - plan.alpha)];
    let a = &plan.alphas;
    if plan.n == 0 || a.len() != plan.n + 1 {
        return out;
    }
    let Some(beta) = plan.beta_n else { return out };
    let n = plan.n;
    let order = a
        .windows(2)
        .map(|w| w[0] - w[1])
        .chain(std::iter::once(a[n] - beta))
        .fold(f64::INFINITY, f64::min);
    out.push((Constraint::Ordering, order));
    out.push((Constraint::LevelBoundary, (0.5 - a[n]).min(a[n - 1] - 0.5)));
    for i in 1..=n {
        out.push((
            Constraint::CameronMartin { level: i },
            1.0 - (a[0] + a[i - 1] - a[i]),
        ));
    }
    out.push((Constraint::Remainder, 0.5 - (a[0] - beta)));
    for i in 1..=n {
        out.push((
            Constraint::Regularity { level: i },
            1.5 - (a[0] + a[i - 1] - a[i]),
        ));
    }
    out
}

pub fn validate_plan(plan: &LevelPlan) -> Vec<Violation> {
    let mut v = Vec::new();
    if !(plan.alpha < 1.0) {
        v.push(Violation {
            constraint: Constraint::Supported,
            detail: format!("alpha = {} >= 1", plan.alpha),
            informational: false,
        });
    }
    if plan.alphas.len() != plan.n + 1
        || plan.alphas.first() != Some(&plan.alpha)
        || (plan.n > 0) != plan.beta_n.is_some()
    {
        v.push(Violation {
            constraint: Constraint::Shape,
            detail: format!(
                "expected alphas = [alpha, ...] of length {} and beta_n iff n > 0",
                plan.n + 1
            ),
            informational: false,
        });
        return v;
    }
    if plan.n == 0 {
        return v;
    }
    let a = &plan.alphas;
    let n = plan.n;
    let beta = plan.beta_n.unwrap_or(f64::NAN);
    if !(a.windows(2).all(|w| w[0] > w[1]) && beta < a[n]) {
        v.push(Violation {
            constraint: Constraint::Ordering,
            detail: format!(
                "need beta_n < alpha_n < ... < alpha_0; got alphas {a:?}, beta_n {beta}"
            ),
            informational: false,
        });
    }
    if !(a[n] < 0.5 && 0.5 <= a[n - 1]) {
        v.push(Violation {
            constraint: Constraint::LevelBoundary,
            detail: format!(
                "need alpha_n < 1/2 <= alpha_(n-1); got {} and {}",
                a[n],
                a[n - 1]
            ),
            informational: false,
        });
    }
    for i in 1..=n {
        let s = a[0] + a[i - 1] - a[i];
        if !(s < 1.0) {
            v.push(Violation {
                constraint: Constraint::CameronMartin { level: i },
                detail: format!("alpha_0 + alpha_{} - alpha_{i} = {s} >= 1", i - 1),
                informational: false,
            });
        }
        if !(s < 1.5) {
            v.push(Violation {
                constraint: Constraint::Regularity { level: i },
                detail: format!("alpha_0 + alpha_{} - alpha_{i} = {s} >= 3/2", i - 1),
                informational: true,
            });
        }
    }
    if !(a[0] - beta < 0.5) {
        v.push(Violation {
            constraint: Constraint::Remainder,
            detail: format!("alpha_0 - beta_n = {} >= 1/2", a[0] - beta),
            informational: false,
        });
    }
    v
}

/// Per-mode amplitudes for `k = 1..=K` (index `k - 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSpectra {
    pub cutoff: usize,
    pub base: Vec<f64>,
    /// `q_{i,k}` for `i = 0..=n`.
    pub levels: Vec<Vec<f64>>,
    /// `q̃_k`; all zero when `n = 0`.
    pub remainder: Vec<f64>,
}

impl LevelSpectra {
    /// `q_k² - Σ_i q_{i,k}² - q̃_k²`.
    pub fn budget_residual(&self, k: usize) -> f64 {
        let q2: f64 = self.levels.iter().map(|l| l[k - 1].powi(2)).sum::<f64>()
            + self.remainder[k - 1].powi(2);
        self.base[k - 1].powi(2) - q2
    }
}

/// The default base spectrum `q_k = |k|^α`.
pub fn power_spectrum(alpha: f64) -> impl Fn(usize) -> f64 {
    move |k| (k as f64).powf(alpha)
}

/// `q_{i,k} = k^{α_i}/√(n+2)` for `i ≥ 1`, `q̃_k = k^{β_n}/√(n+2)` and
/// `q_{0,k}` absorbs the rest of the budget.
pub fn materialize_spectra(
    plan: &LevelPlan,
    cutoff: usize,
    base_q: impl Fn(usize) -> f64,
) -> Result<LevelSpectra, PlanError> {
    let bad = validate_plan(plan);
    if !is_valid(&bad) {
        let first = bad
            .iter()
            .find(|v| !v.informational)
            .map(|v| v.detail.clone())
            .unwrap_or_default();
        return Err(PlanError::InvalidPlan(bad.len(), first));
    }
    let base: Vec<f64> = (1..=cutoff).map(&base_q).collect();
    if plan.n == 0 {
        return Ok(LevelSpectra {
            cutoff,
            levels: vec![base.clone()],
            remainder: vec![0.0; cutoff],
            base,
        });
    }
    let norm = ((plan.n + 2) as f64).sqrt();
    let pow = |e: f64| -> Vec<f64> { (1..=cutoff).map(|k| (k as f64).powf(e) / norm).collect() };
    let upper: Vec<Vec<f64>> = plan.alphas[1..].iter().map(|&a| pow(a)).collect();
    let remainder = pow(plan.beta_n.expect("validated plan has beta_n"));
    let mut q0 = Vec::with_capacity(cutoff);
    for k in 1..=cutoff {
        let taken: f64 =
            upper.iter().map(|l| l[k - 1].powi(2)).sum::<f64>() + remainder[k - 1].powi(2);
        let r = base[k - 1].powi(2) - taken;
        if !(r > 0.0) {
            return Err(PlanError::InfeasibleBase { k, value: r });
        }
        q0.push(r.sqrt());
    }
    let mut levels = vec![q0];
    levels.extend(upper);
    Ok(LevelSpectra {
        cutoff,
        base,
        levels,
        remainder,
    })
}

/// The `plan.json` document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub alpha: f64,
    pub n: usize,
    pub alphas: Vec<f64>,
    pub beta_n: Option<f64>,
    pub scheme: MarginPolicy,
    #[serde(rename = "K")]
    pub cutoff: usize,
}

impl PlanFile {
    pub fn new(plan: &LevelPlan, cutoff: usize) -> Self {
        Self {
            alpha: plan.alpha,
            n: plan.n,
            alphas: plan.alphas.clone(),
            beta_n: plan.beta_n,
            scheme: plan.scheme,
            cutoff,
        }
    }

    pub fn plan(&self) -> LevelPlan {
        LevelPlan {
            alpha: self.alpha,
            n: self.n,
            alphas: self.alphas.clone(),
            beta_n: self.beta_n,
            scheme: self.scheme,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    /// Least `n` with `α < (2n+1)/(2n+2)` by scanning.
    fn search(alpha: f64) -> usize {
        if alpha < 0.5 {
            return 0;
        }
        (1..).find(|&n| alpha < level_threshold(n)).unwrap()
    }

    #[test]
    fn spot_levels() {
        assert_eq!(minimal_levels(0.6), Ok(1));
        assert_eq!(minimal_levels(0.8), Ok(2));
        assert_eq!(minimal_levels(0.45), Ok(0));
        assert_eq!(minimal_levels(0.9), Ok(5));
        assert_eq!(minimal_levels(0.99), Ok(50));
        assert_eq!(minimal_levels(0.84), Ok(3));
        assert_eq!(minimal_levels(0.75), Ok(2));
        assert!(matches!(
            minimal_levels(1.0),
            Err(PlanError::UnsupportedRegime { .. })
        ));
    }

    #[test]
    fn schedule_alpha_06() {
        let p = plan_schedule(0.6, MarginPolicy::EqualSlack).unwrap();
        assert_eq!(p.n, 1);
        assert!(close(p.alphas[1], 0.35));
        assert!(close(p.beta_n.unwrap(), 0.225));
    }

    #[test]
    fn schedule_alpha_08() {
        let p = plan_schedule(0.8, MarginPolicy::EqualSlack).unwrap();
        assert_eq!(p.n, 2);
        assert!(close(p.alphas[1], 0.625));
        assert!(close(p.alphas[2], 0.45));
        assert!(close(p.beta_n.unwrap(), 0.375));
        assert!(validate_plan(&p).is_empty());
    }

    #[test]
    fn direct_regime_plan() {
        let p = plan_schedule(0.45, MarginPolicy::EqualSlack).unwrap();
        assert_eq!((p.n, p.beta_n), (0, None));
        assert!(validate_plan(&p).is_empty());
    }

    #[test]
    fn hand_built_cm_violation() {
        let p = LevelPlan {
            alpha: 0.8,
            n: 2,
            alphas: vec![0.8, 0.5, 0.45],
            beta_n: Some(0.375),
            scheme: MarginPolicy::EqualSlack,
        };
        let v = validate_plan(&p);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].constraint, Constraint::CameronMartin { level: 1 });
    }

    #[test]
    fn beta_equal_alpha_n_breaks_ordering() {
        let mut p = plan_schedule(0.8, MarginPolicy::EqualSlack).unwrap();
        p.beta_n = Some(p.alphas[2]);
        assert!(validate_plan(&p)
            .iter()
            .any(|v| v.constraint == Constraint::Ordering));
    }

    #[test]
    fn unit_mode_spectra() {
        let p = plan_schedule(0.6, MarginPolicy::EqualSlack).unwrap();
        let s = materialize_spectra(&p, 8, power_spectrum(0.6)).unwrap();
        let third = (1.0f64 / 3.0).sqrt();
        assert!(close(s.levels[1][0], third));
        assert!(close(s.remainder[0], third));
        assert!(close(s.levels[0][0], third));
    }

    #[test]
    fn residual_at_k4_for_alpha_08() {
        let p = plan_schedule(0.8, MarginPolicy::EqualSlack).unwrap();
        let s = materialize_spectra(&p, 8, power_spectrum(0.8)).unwrap();
        let want = 4f64.powf(1.6) - (4f64.powf(1.25) + 4f64.powf(0.9) + 4f64.powf(0.75)) / 4.0;
        assert!(want > 0.0);
        assert!((s.levels[0][3].powi(2) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn perturbed_base_can_be_infeasible() {
        let p = plan_schedule(0.6, MarginPolicy::EqualSlack).unwrap();
        let r = materialize_spectra(&p, 8, |k| 0.5 * (k as f64).powf(0.6));
        assert!(matches!(r, Err(PlanError::InfeasibleBase { k: 1, .. })));
    }

    #[test]
    fn plan_file_round_trip() {
        let p = plan_schedule(0.8, MarginPolicy::EqualSlack).unwrap();
        let json = serde_json::to_string(&PlanFile::new(&p, 64)).unwrap();
        assert!(json.contains("\"scheme\":\"equal-slack\""));
        assert!(json.contains("\"K\":64"));
        let back: PlanFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.plan(), p);
    }

    proptest! {
        #[test]
        fn schedule_always_valid(alpha in 0.5f64..0.995) {
            let p = plan_schedule(alpha, MarginPolicy::EqualSlack).unwrap();
            prop_assert!(validate_plan(&p).is_empty(), "{:?}", validate_plan(&p));
            prop_assert_eq!(p.n, search(alpha));
            prop_assert!(alpha - 0.5 < p.alphas[p.n]);
            prop_assert!(p.alphas[p.n - 1] >= 0.5);
        }

        #[test]
        fn levels_monotone(a in 0.0f64..0.99, b in 0.0f64..0.99) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(minimal_levels(lo).unwrap() <= minimal_levels(hi).unwrap());
        }

        #[test]
        fn budget_exact(alpha in 0.5f64..0.95) {
            let p = plan_schedule(alpha, MarginPolicy::EqualSlack).unwrap();
            let s = materialize_spectra(&p, 256, power_spectrum(alpha)).unwrap();
            for k in 1..=256 {
                prop_assert!(s.budget_residual(k).abs() <= 1e-12 * s.base[k - 1].powi(2));
            }
        }
    }

    #[test]
    fn jumps_at_thresholds() {
        for n in 1..20 {
            let t = level_threshold(n);
            assert_eq!(minimal_levels(t).unwrap(), n + 1);
            assert_eq!(minimal_levels(t - 1e-9).unwrap(), n);
        }
    }
}
