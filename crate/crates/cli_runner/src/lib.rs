//! Front end for the level-decomposition toolkit: planning, simulation
//! runs, verification suites and report inspection, each writing a
//! self-describing artifact directory.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use level_solvers::{
    run_direct_burgers, run_frak_system, run_split_remainder, run_x_system, write_run_artifacts,
    Host, InitialCondition, InitialPlacement, NoiseMode, Regime, SolverError, SystemConfig,
};
use noise_planner::{
    constraint_margins, plan_schedule, LevelPlan, MarginPolicy, PlanError, PlanFile,
};
use serde::{Deserialize, Serialize};
use spectral_core::FieldPath;
use verification::{run_suite, Suite, SuiteReport, VerifyError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "BURGERS_LEVELS_OUT";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("unsupported regime: alpha = {alpha} (the level decomposition needs alpha < 1)")]
    UnsupportedRegime { alpha: f64 },
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
    #[error("invalid config {path}: {source}")]
    Config {
        path: String,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Solver(SolverError),
    #[error(transparent)]
    Verify(VerifyError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::UnsupportedRegime { .. } | Self::Config { .. } => EXIT_USAGE,
            Self::Io { .. } => EXIT_IO,
            Self::Solver(e) => match e {
                SolverError::Io(_) | SolverError::Csv(_) | SolverError::Json(_) => EXIT_IO,
                _ => EXIT_USAGE,
            },
            Self::Verify(e) => match e {
                VerifyError::UnknownSuite(_) | VerifyError::Plan(_) => EXIT_USAGE,
                _ => EXIT_CHECK_FAILED,
            },
        }
    }
}

impl From<PlanError> for CliError {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::UnsupportedRegime { alpha } => Self::UnsupportedRegime { alpha },
            e => Self::Usage(e.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Plan(p) => p.into(),
            e => Self::Solver(e),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Plan(p) => p.into(),
            e => Self::Verify(e),
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(io_err(format!("writing {}", path.display())))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(format!("creating {}", dir.display())))
}

fn to_json<S: Serialize>(value: &S) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes") + "\n"
}

/// Reads a JSON config; unknown keys are rejected.
pub fn load_config<C: for<'de> Deserialize<'de>>(path: &Path) -> Result<C, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(format!("reading {}", path.display())))?;
    serde_json::from_str(&text).map_err(|source| CliError::Config {
        path: path.display().to_string(),
        source,
    })
}

/// `explicit`, else `$BURGERS_LEVELS_OUT/default_name`, else `./default_name`.
pub fn resolve_out(explicit: Option<PathBuf>, default_name: &str) -> PathBuf {
    explicit.unwrap_or_else(|| {
        let root = std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."));
        root.join(default_name)
    })
}

// ---------------------------------------------------------------- plan

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub alpha: f64,
    #[serde(rename = "K", default = "default_cutoff")]
    pub cutoff: usize,
}

fn default_cutoff() -> usize {
    64
}

/// Human-readable account of a plan and the slack in each constraint.
pub fn plan_summary(plan: &LevelPlan) -> String {
    let mut s = format!("alpha = {}\nn = {}", plan.alpha, plan.n);
    if plan.n == 0 {
        s.push_str(" (direct regime: the equation is solved as is)\n");
    } else {
        s.push('\n');
    }
    for (i, a) in plan.alphas.iter().enumerate() {
        let _ = writeln!(s, "alpha_{i} = {a:.6}");
    }
    if let Some(b) = plan.beta_n {
        let _ = writeln!(s, "beta_n = {b:.6}");
    }
    s.push_str("constraint margins (positive = satisfied):\n");
    for (c, m) in constraint_margins(plan) {
        let _ = writeln!(s, "  {c:?}: {m:.6}");
    }
    s
}

/// Writes `plan.json` and `plan.txt` into `out`.
pub fn cmd_plan(cfg: &PlanConfig, out: &Path) -> Result<LevelPlan, CliError> {
    let plan = plan_schedule(cfg.alpha, MarginPolicy::EqualSlack)?;
    create_dir(out)?;
    write_file(
        &out.join("plan.json"),
        to_json(&PlanFile::new(&plan, cfg.cutoff)),
    )?;
    write_file(&out.join("plan.txt"), plan_summary(&plan))?;
    Ok(plan)
}

// ------------------------------------------------------------ simulate

/// Which equations a simulation runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    /// Levels forced by their own partial sums.
    #[default]
    X,
    /// Levels forced by the Gaussian partial sums.
    Frak,
    /// Only the undecomposed equation.
    Direct,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub alpha: f64,
    #[serde(rename = "K")]
    pub cutoff: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one_u64")]
    pub samples: u64,
    #[serde(default)]
    pub system: System,
    /// Also run the undecomposed equation next to the level system.
    #[serde(default)]
    pub direct: bool,
    /// Split the remainder into its rough and smooth parts.
    #[serde(default)]
    pub split_remainder: bool,
    #[serde(default)]
    pub noise: NoiseMode,
    #[serde(default = "one_f64")]
    pub noise_amplitude: f64,
    #[serde(default)]
    pub u0: InitialCondition,
    #[serde(default)]
    pub z0: InitialCondition,
    #[serde(default)]
    pub u0_regularity: Option<f64>,
    #[serde(default)]
    pub placement: InitialPlacement,
    #[serde(default = "one_u64")]
    pub substeps: u64,
    #[serde(default = "one_usize")]
    pub snapshot_every: usize,
    #[serde(default = "default_threshold")]
    pub blowup_threshold: f64,
}

fn one_u64() -> u64 {
    1
}
fn one_f64() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn default_threshold() -> f64 {
    1e8
}

impl SimulateConfig {
    /// Solver configuration for one sample.
    pub fn system_config(&self, sample: u64) -> Result<SystemConfig, CliError> {
        let mut cfg =
            SystemConfig::planned(self.alpha, self.cutoff, self.dt, self.horizon, self.seed)?;
        cfg.sample = sample;
        cfg.noise = self.noise;
        cfg.noise_amplitude = self.noise_amplitude;
        cfg.u0 = self.u0.clone();
        cfg.z0 = self.z0.clone();
        cfg.u0_regularity = self.u0_regularity;
        cfg.placement = self.placement;
        cfg.substeps = self.substeps;
        cfg.snapshot_every = self.snapshot_every;
        cfg.blowup_threshold = self.blowup_threshold;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub sample: u64,
    pub dir: String,
    pub regime: Option<Regime>,
    /// Earliest blow-up time over all written paths.
    pub death_time: Option<f64>,
    pub paths: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateSummary {
    pub n_levels: usize,
    pub samples: Vec<SampleSummary>,
}

type Paths = Vec<(String, FieldPath<f64>)>;

fn simulate_sample(
    cfg: &SimulateConfig,
    sys: &SystemConfig,
) -> Result<(Paths, Option<Regime>), CliError> {
    let mut paths: Paths = Vec::new();
    let mut regime = None;
    if cfg.system != System::Direct {
        let host = if cfg.system == System::Frak {
            Host::Frak
        } else {
            Host::X
        };
        let run = match (cfg.split_remainder, host) {
            (true, h) => run_split_remainder::<f64>(sys, h)?,
            (false, Host::Frak) => run_frak_system::<f64>(sys)?,
            (false, Host::X) => run_x_system::<f64>(sys)?,
        };
        regime = Some(run.regime);
        paths.extend(run.named_paths().into_iter().map(|(n, p)| (n, p.clone())));
    }
    if cfg.direct || cfg.system == System::Direct {
        paths.push(("u".to_owned(), run_direct_burgers::<f64>(sys)?));
    }
    Ok((paths, regime))
}

/// Runs every sample on `workers` threads (0 = all cores), then writes the
/// artifacts from this thread: `run.json` and `summary.json` in `out`, the
/// per-sample files in `out` itself for one sample or in `sample_NNNN`.
pub fn cmd_simulate(
    cfg: &SimulateConfig,
    out: &Path,
    workers: usize,
) -> Result<SimulateSummary, CliError> {
    if cfg.samples == 0 {
        return Err(CliError::Usage("samples must be positive".into()));
    }
    let systems: Vec<SystemConfig> = (0..cfg.samples)
        .map(|s| cfg.system_config(s))
        .collect::<Result<_, _>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))?;
    let runs: Vec<Result<(Paths, Option<Regime>), CliError>> = pool.install(|| {
        use rayon::prelude::*;
        systems
            .par_iter()
            .map(|sys| simulate_sample(cfg, sys))
            .collect()
    });

    create_dir(out)?;
    write_file(&out.join("run.json"), to_json(cfg))?;
    let mut summary = SimulateSummary {
        n_levels: systems[0].plan.n,
        samples: Vec::new(),
    };
    for (s, (sys, run)) in systems.iter().zip(runs).enumerate() {
        let (paths, regime) = run?;
        let name = if cfg.samples == 1 {
            String::new()
        } else {
            format!("sample_{s:04}")
        };
        let dir = out.join(&name);
        let named: Vec<(String, &_)> = paths.iter().map(|(n, p)| (n.clone(), p)).collect();
        write_run_artifacts(&dir, sys, &named)?;
        summary.samples.push(SampleSummary {
            sample: s as u64,
            dir: if name.is_empty() { ".".into() } else { name },
            regime,
            death_time: paths
                .iter()
                .filter_map(|(_, p)| p.death_time())
                .reduce(f64::min),
            paths: paths.iter().map(|(n, _)| n.clone()).collect(),
        });
    }
    write_file(&out.join("summary.json"), to_json(&summary))?;
    Ok(summary)
}

// -------------------------------------------------------------- verify

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub suite: String,
    #[serde(default)]
    pub seed: u64,
}

/// Runs a suite and writes `verify.json`, `report.json`, `report.txt` and
/// `fits.csv` into `out`.
pub fn cmd_verify(cfg: &VerifyConfig, out: &Path, workers: usize) -> Result<SuiteReport, CliError> {
    let suite: Suite = cfg.suite.parse()?;
    let report = run_suite(suite, cfg.seed, workers)?;
    create_dir(out)?;
    write_file(&out.join("verify.json"), to_json(cfg))?;
    write_file(&out.join("report.json"), report.to_json())?;
    write_file(&out.join("report.txt"), report.to_text())?;
    let mut csv = Vec::new();
    report.write_fit_csv(&mut csv).map_err(|e| CliError::Io {
        context: "rendering fits.csv".into(),
        source: io::Error::other(e),
    })?;
    write_file(&out.join("fits.csv"), csv)?;
    Ok(report)
}

// -------------------------------------------------------------- report

#[derive(Clone, Debug, PartialEq)]
pub struct Inspection {
    pub text: String,
    /// `false` when a check failed or a reproduction differed.
    pub ok: bool,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(io_err(format!("reading {}", path.display())))
}

/// Summarizes an artifact directory. With `reproduce`, a verification
/// directory is rerun from its own `verify.json` and compared byte for
/// byte with the stored `report.json`.
pub fn cmd_report(dir: &Path, reproduce: bool, workers: usize) -> Result<Inspection, CliError> {
    if dir.join("report.json").is_file() {
        let stored = read(&dir.join("report.json"))?;
        let value: serde_json::Value =
            serde_json::from_str(&stored).map_err(|source| CliError::Config {
                path: dir.join("report.json").display().to_string(),
                source,
            })?;
        let all_pass = value["reports"]
            .as_array()
            .is_some_and(|r| r.iter().all(|c| c["verdict"] == "pass"));
        let mut text = read(&dir.join("report.txt"))?;
        let mut ok = all_pass;
        if reproduce {
            let cfg: VerifyConfig = load_config(&dir.join("verify.json"))?;
            let fresh = run_suite(cfg.suite.parse()?, cfg.seed, workers)?.to_json();
            let same = fresh == stored;
            let _ = writeln!(
                text,
                "reproduction: {}",
                if same { "identical" } else { "DIFFERS" }
            );
            ok &= same;
        }
        return Ok(Inspection { text, ok });
    }
    if dir.join("summary.json").is_file() {
        let summary: SimulateSummary = load_config(&dir.join("summary.json"))?;
        let mut text = format!(
            "simulation with {} level(s), {} sample(s)\n",
            summary.n_levels,
            summary.samples.len()
        );
        for s in &summary.samples {
            let death = s
                .death_time
                .map_or("none".to_owned(), |t| format!("t = {t}"));
            let regime = s.regime.map_or("n/a".to_owned(), |r| format!("{r:?}"));
            let _ = writeln!(
                text,
                "  sample {} in {}: regime {regime}, blow-up {death}, paths {}",
                s.sample,
                s.dir,
                s.paths.join(" ")
            );
        }
        return Ok(Inspection { text, ok: true });
    }
    if dir.join("plan.txt").is_file() {
        return Ok(Inspection {
            text: read(&dir.join("plan.txt"))?,
            ok: true,
        });
    }
    Err(CliError::Usage(format!(
        "{} holds no plan, run or verification artifacts",
        dir.display()
    )))
}
