//! Time steppers for stochastic Burgers with rough noise: the direct
//! equation, the two level-decomposed systems, the `η/ρ` remainder split,
//! plus fixed-point regime classification and Girsanov diagnostics.

// Negated comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifacts;
pub mod config;
pub mod girsanov;
pub mod regime;
pub mod solve;

pub use artifacts::write_run_artifacts;
pub use config::{
    InitialCondition, InitialPlacement, NoiseMode, Reseed, SystemConfig, DIRECT_TAG_OFFSET,
};
pub use girsanov::{girsanov_integrand_diagnostic, GirsanovMode, GirsanovReport};
pub use regime::{fixed_point_regime_check, remainder_regime, Regime};
pub use solve::{
    blown_up, run_direct_burgers, run_frak_system, run_split_remainder, run_x_system, Host,
    LevelRun,
};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Plan(#[from] noise_planner::PlanError),
    #[error(transparent)]
    Spectral(#[from] spectral_core::SpectralError),
    #[error(transparent)]
    Gaussian(#[from] gaussian_objects::GaussianError),
    #[error("drift path died at t = {time}")]
    DeadPath { time: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type LevelRun64 = LevelRun<f64>;
