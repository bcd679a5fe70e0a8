//! Every pass/fail threshold used by the checks. Exponent tolerances were
//! set from pilot ensembles at the reference sizes and then frozen.

/// Standard errors allowed between a Monte Carlo moment and its oracle.
pub const MOMENT_Z_MAX: f64 = 3.0;

/// Fitted OU decay slope or Besov exponent of an OU field.
pub const OU_EXPONENT: f64 = 0.1;
/// Wick-square decay slope for `γ > 1/2`.
pub const WICK2_SLOPE: f64 = 0.15;
/// Wick-square decay slope at the endpoint `γ = 1/2`, where a logarithm
/// bends the spectrum.
pub const WICK2_SLOPE_ENDPOINT: f64 = 0.2;
/// `J(z)` and resonant-product decay slopes.
pub const JZ_SLOPE: f64 = 0.2;
pub const RESONANT_SLOPE: f64 = 0.2;
/// `J(z) ∘ z` decay slope.
pub const JZ_CIRC_Z_SLOPE: f64 = 0.3;

/// Least `R²` for an exponent fit to count as a measurement.
pub const MIN_R_SQUARED: f64 = 0.9;

/// Canonical regularity of the levels.
pub const LEVEL_EXPONENT: f64 = 0.1;
/// Canonical regularity of the remainder.
pub const REMAINDER_EXPONENT: f64 = 0.15;
/// Regularity of `ρ`.
pub const RHO_EXPONENT: f64 = 0.2;
/// Least gap between the `ρ` and `η` exponents.
pub const RHO_ETA_GAP: f64 = 0.3;

/// Relative per-mode budget residual `|q² - Σq_i² - q̃²| / q²`.
pub const BUDGET_RESIDUAL: f64 = 1e-12;

/// Relative `L²` gap between the direct solution and the level sum.
pub const DECOMPOSITION_GAP: f64 = 1e-2;
/// The same with the noise switched off.
pub const ZERO_NOISE_GAP: f64 = 1e-10;
/// Admissible band for the observed time-step order.
pub const ORDER_TARGET: f64 = 1.0;
pub const ORDER_TOLERANCE: f64 = 0.2;

/// Girsanov integrand ratio under cutoff doubling counted as stable.
pub const GIRSANOV_STABLE: f64 = 0.1;
/// Least ratio counted as divergence.
pub const GIRSANOV_GROWTH: f64 = 2.0;

/// Convolution sums: relative change under `K_sum` doubling that still
/// counts as stable, and least relative growth that counts as divergent.
pub const FSUM_STABLE: f64 = 0.05;
pub const FSUM_GROWTH: f64 = 0.05;

/// Family-wise level of the two-sample tests.
pub const FAMILY_ALPHA: f64 = 0.01;
/// Least surviving samples per side for the two-sample tests.
pub const MIN_SURVIVORS: usize = 500;
/// Samples whose death rate above this make regularity fits meaningless.
pub const MAX_DEAD_FRACTION: f64 = 0.5;
