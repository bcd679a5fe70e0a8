//! Level counts against a direct search, schedule validity and the
//! spectral budget.

use noise_planner::{
    is_valid, materialize_spectra, minimal_levels, plan_schedule, power_spectrum, validate_plan,
    MarginPolicy,
};
use serde::Serialize;

use super::judged;
use crate::ensemble::fingerprint;
use crate::report::{Outcome, Verdict};
use crate::tolerances::BUDGET_RESIDUAL;
use crate::VerifyError;

#[derive(Clone, Debug, Serialize)]
pub struct PlannerParams {
    pub alphas: Vec<f64>,
    /// `(α, n)` pairs that must match exactly.
    pub spot_values: Vec<(f64, usize)>,
    pub budget_cutoff: usize,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            alphas: (0..50).map(|i| 0.02 + 0.97 * i as f64 / 49.0).collect(),
            spot_values: vec![
                (0.45, 0),
                (0.5, 1),
                (0.6, 1),
                (0.74, 1),
                (0.76, 2),
                (0.8, 2),
                (0.84, 3),
                (0.9, 5),
                (0.99, 50),
            ],
            budget_cutoff: 256,
        }
    }
}

/// Least `n` by scanning upward: `n = 0` below `1/2`, otherwise the first
/// `n` whose chain of Cameron–Martin bounds `α_i > α_0 + α_{i-1} - 1` lets
/// `α_n` drop below `1/2`, i.e. `(n+1)α - n < 1/2`. Landing on `1/2` is
/// not enough; the slack absorbs the drift of the repeated subtraction.
pub fn levels_by_search(alpha: f64) -> Option<usize> {
    if !(alpha < 1.0) {
        return None;
    }
    if alpha < 0.5 {
        return Some(0);
    }
    (1..).find(|&n| {
        let mut floor = alpha;
        for _ in 0..n {
            floor = alpha + floor - 1.0;
        }
        floor < 0.5 - 1e-12
    })
}

pub fn check_planner_table(p: &PlannerParams, seed: u64) -> Result<Outcome, VerifyError> {
    let fp = fingerprint(p, seed);
    let mut out = Outcome::default();

    let mut mismatches = Vec::new();
    let mut invalid = Vec::new();
    let mut budget = 0.0f64;
    for &alpha in &p.alphas {
        let n = minimal_levels(alpha)?;
        if Some(n) != levels_by_search(alpha) {
            mismatches.push(alpha);
        }
        let plan = plan_schedule(alpha, MarginPolicy::EqualSlack)?;
        if !is_valid(&validate_plan(&plan)) {
            invalid.push(alpha);
            continue;
        }
        let spectra = materialize_spectra(&plan, p.budget_cutoff, power_spectrum(alpha))?;
        for k in 1..=p.budget_cutoff {
            budget = budget.max(spectra.budget_residual(k).abs() / spectra.base[k - 1].powi(2));
        }
    }
    let count = |v: &Vec<f64>| v.len() as f64;
    out.push(
        judged(
            "planner_grid",
            "least level count equals the direct search",
            0.0,
            count(&mismatches),
            0.0,
            Verdict::from_bool(mismatches.is_empty()),
            &fp,
        )
        .with_note(format!(
            "{} alphas, mismatches at {mismatches:?}",
            p.alphas.len()
        )),
    );
    out.push(
        judged(
            "planner_validity",
            "every planned schedule satisfies all constraints",
            0.0,
            count(&invalid),
            0.0,
            Verdict::from_bool(invalid.is_empty()),
            &fp,
        )
        .with_note(format!("invalid at {invalid:?}")),
    );
    out.push(
        judged(
            "spectral_budget",
            "sum of level and remainder spectra equals the base spectrum",
            0.0,
            budget,
            BUDGET_RESIDUAL,
            Verdict::from_bool(budget <= BUDGET_RESIDUAL),
            &fp,
        )
        .with_note(format!(
            "largest relative residual over k <= {}",
            p.budget_cutoff
        )),
    );
    for &(alpha, n) in &p.spot_values {
        let got = minimal_levels(alpha)?;
        out.push(judged(
            format!("planner_spot alpha={alpha}"),
            "least number of levels",
            n as f64,
            got as f64,
            0.0,
            Verdict::from_bool(got == n),
            &fp,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn search_spot_values() {
        assert_eq!(levels_by_search(0.3), Some(0));
        assert_eq!(levels_by_search(0.74), Some(1));
        assert_eq!(levels_by_search(0.84), Some(3));
        assert_eq!(levels_by_search(0.99), Some(50));
        assert_eq!(levels_by_search(1.0), None);
    }

    #[test]
    fn reference_table_passes() {
        let out = check_planner_table(&PlannerParams::default(), 0).unwrap();
        assert!(out.all_pass(), "{:#?}", out.reports);
    }
}
