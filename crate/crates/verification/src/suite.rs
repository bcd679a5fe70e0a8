//! Named bundles of checks.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::checks::decay::{chaos_runs, chaos_runs_fast, run_decay_checks};
use crate::checks::decomposition::{check_decomposition_identity, DecompositionParams};
use crate::checks::distribution::{check_distributional_match, DistributionParams};
use crate::checks::fsum::{check_fsum_lemmas, FsumParams};
use crate::checks::girsanov::{girsanov_contrast, GirsanovParams};
use crate::checks::ou::{
    mollifier_independence, ou_covariance, MollifierParams, OuCovarianceParams,
};
use crate::checks::planner::{check_planner_table, PlannerParams};
use crate::checks::regularity::{
    level_regularity, ou_regularity, LevelRegularityParams, OuRegularityParams,
};
use crate::ensemble::Ensemble;
use crate::report::{Outcome, SuiteReport};
use crate::VerifyError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Every check at smoke-test size.
    Fast,
    /// Every check at reference size.
    Full,
    /// Decay of OU fields and second-chaos objects, and cutoff independence.
    Chaos,
    /// Level counts, schedules and spectral budgets; deterministic.
    Planner,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Fast, Suite::Full, Suite::Chaos, Suite::Planner];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fast => "fast",
            Self::Full => "full",
            Self::Chaos => "chaos",
            Self::Planner => "planner",
        }
    }
}

impl FromStr for Suite {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| VerifyError::UnknownSuite(s.to_owned()))
    }
}

/// Runs a suite on `workers` threads (0 = all cores). The report depends
/// on `seed` only.
pub fn run_suite(suite: Suite, seed: u64, workers: usize) -> Result<SuiteReport, VerifyError> {
    let ens = Ensemble::new(workers);
    let mut out = Outcome::default();
    match suite {
        Suite::Planner => out.extend(check_planner_table(&PlannerParams::default(), seed)?),
        Suite::Chaos => {
            out.extend(run_decay_checks(&chaos_runs(), &ens, seed)?);
            out.extend(mollifier_independence(
                &MollifierParams::default(),
                &ens,
                seed,
            )?);
        }
        Suite::Fast => {
            out.extend(check_planner_table(&PlannerParams::default(), seed)?);
            out.extend(check_fsum_lemmas(&FsumParams::fast(), seed));
            out.extend(ou_covariance(&OuCovarianceParams::fast(), &ens, seed));
            out.extend(ou_regularity(&OuRegularityParams::fast(), &ens, seed));
            out.extend(run_decay_checks(&chaos_runs_fast(), &ens, seed)?);
            out.extend(mollifier_independence(
                &MollifierParams::fast(),
                &ens,
                seed,
            )?);
            out.extend(check_decomposition_identity(
                &DecompositionParams::fast(),
                &ens,
                seed,
            )?);
            out.extend(level_regularity(
                &LevelRegularityParams::fast(),
                &ens,
                seed,
            )?);
            out.extend(girsanov_contrast(&GirsanovParams::fast(), &ens, seed)?);
            out.extend(check_distributional_match(
                &DistributionParams::fast(),
                &ens,
                seed,
            )?);
        }
        Suite::Full => {
            out.extend(check_planner_table(&PlannerParams::default(), seed)?);
            out.extend(check_fsum_lemmas(&FsumParams::default(), seed));
            out.extend(ou_covariance(&OuCovarianceParams::default(), &ens, seed));
            out.extend(ou_regularity(&OuRegularityParams::default(), &ens, seed));
            out.extend(run_decay_checks(&chaos_runs(), &ens, seed)?);
            out.extend(mollifier_independence(
                &MollifierParams::default(),
                &ens,
                seed,
            )?);
            out.extend(check_decomposition_identity(
                &DecompositionParams::default(),
                &ens,
                seed,
            )?);
            out.extend(level_regularity(
                &LevelRegularityParams::default(),
                &ens,
                seed,
            )?);
            out.extend(girsanov_contrast(&GirsanovParams::default(), &ens, seed)?);
            out.extend(check_distributional_match(
                &DistributionParams::default(),
                &ens,
                seed,
            )?);
        }
    }
    Ok(SuiteReport {
        suite: suite.name().to_owned(),
        seed,
        reports: out.reports,
        fits: out.fits,
    })
}
