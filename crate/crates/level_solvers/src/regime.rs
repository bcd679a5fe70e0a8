//! Which local well-posedness argument covers an equation
//! `v = e^{-tA}v₀ + c₁J(v) + c₂J(g, v) + G` with `g ∈ 𝒞^γ`, `G ∈ 𝒞^σ` and
//! `v₀ ∈ 𝒞^{σ₀}`.

use noise_planner::LevelPlan;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Contraction in `C_T 𝒞^σ`: `γ+1 > σ > 0`, `σ+γ > 0`, `v₀ ∈ 𝒞^σ`.
    Classical,
    /// Contraction in the time-weighted space with `ρ = σ ∧ (γ+1)`.
    Weighted,
    OutOfScope,
}

pub fn fixed_point_regime_check(gamma: f64, sigma: f64, sigma0: f64) -> Regime {
    if gamma + 1.0 > sigma && sigma > 0.0 && sigma + gamma > 0.0 && sigma0 >= sigma {
        return Regime::Classical;
    }
    let rho = sigma.min(gamma + 1.0);
    let gap = rho - sigma0;
    if gamma > -0.5 && sigma > 0.0 && sigma + gamma > 0.0 && sigma0 > -1.0 && gap > 0.0 && gap < 2.0
    {
        Regime::Weighted
    } else {
        Regime::OutOfScope
    }
}

/// Slack used to turn "`𝒞^{s⁻}`" into a concrete exponent.
const EPS: f64 = 0.01;

/// Classification of the `ρ` equation of a planned run: `g` is the level sum
/// (`𝒞^{(1/2-α)⁻}`), `ρ` lives in `𝒞^{(3/2-α)⁻}`. A smooth or undeclared
/// `u0` counts as regular as `ρ`.
pub fn remainder_regime(plan: &LevelPlan, u0_regularity: Option<f64>) -> Regime {
    let gamma = 0.5 - plan.alpha - EPS;
    let sigma = 1.5 - plan.alpha - 2.0 * EPS;
    fixed_point_regime_check(gamma, sigma, u0_regularity.unwrap_or(sigma))
}
