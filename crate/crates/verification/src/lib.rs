//! Monte Carlo statistics, exponent fits and oracle comparisons that turn
//! the quantitative claims about the level decomposition into pass/fail
//! reports.
//!
//! Each check group in [`checks`] has a parameter struct whose `Default` is
//! the reference size and a `fast()` variant for smoke runs. Suites in
//! [`suite`] bundle groups and are reproducible bit for bit from the seed,
//! whatever the worker count.

// Negated comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod ensemble;
pub mod report;
pub mod stats;
pub mod suite;
pub mod tolerances;

pub use checks::decay::check_mode_decay;
pub use checks::decomposition::check_decomposition_identity;
pub use checks::distribution::check_distributional_match;
pub use checks::fsum::check_fsum_lemmas;
pub use checks::planner::check_planner_table;
pub use checks::regularity::check_canonical_regularity;
pub use ensemble::{fingerprint, Ensemble, EnsembleStats};
pub use report::{CheckReport, FitRow, Outcome, SuiteReport, Verdict};
pub use suite::{run_suite, Suite};

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Solver(#[from] level_solvers::SolverError),
    #[error(transparent)]
    Gaussian(#[from] gaussian_objects::GaussianError),
    #[error(transparent)]
    Spectral(#[from] spectral_core::SpectralError),
    #[error(transparent)]
    Plan(#[from] noise_planner::PlanError),
    #[error("unknown suite {0:?} (expected fast, full, chaos or planner)")]
    UnknownSuite(String),
}
