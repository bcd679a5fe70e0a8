use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cli_runner::{
    cmd_plan, cmd_report, cmd_simulate, cmd_verify, load_config, plan_summary, resolve_out,
    CliError, PlanConfig, SimulateConfig, VerifyConfig, EXIT_CHECK_FAILED, EXIT_OK,
};

#[derive(Parser)]
#[command(
    name = "burgers-levels",
    version,
    about = "Level-decomposed stochastic Burgers: plan, simulate, verify"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Artifact directory (default: $BURGERS_LEVELS_OUT/<name>, else ./<name>).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, value_name = "N", default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Least number of levels and the regularity schedule for `alpha`.
    Plan {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long = "cutoff", short = 'K')]
        cutoff: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the level system (and optionally the direct equation).
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite: fast, full, chaos or planner.
    Verify {
        #[arg(long, value_name = "NAME")]
        suite: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Summarize an artifact directory.
    Report {
        /// Directory to inspect (default: --out).
        dir: Option<PathBuf>,
        /// Rerun a verification directory and compare with the stored report.
        #[arg(long)]
        reproduce: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Plan {
            alpha,
            cutoff,
            common,
        } => {
            let mut cfg = match &common.config {
                Some(p) => load_config::<PlanConfig>(p)?,
                None => PlanConfig {
                    alpha: alpha
                        .ok_or_else(|| CliError::Usage("plan needs --alpha or --config".into()))?,
                    cutoff: 64,
                },
            };
            cfg.alpha = alpha.unwrap_or(cfg.alpha);
            cfg.cutoff = cutoff.unwrap_or(cfg.cutoff);
            let out = resolve_out(common.out, &format!("plan-alpha{}", cfg.alpha));
            let plan = cmd_plan(&cfg, &out)?;
            print!("{}", plan_summary(&plan));
            println!("wrote {}", out.join("plan.json").display());
            Ok(EXIT_OK)
        }
        Command::Simulate { common } => {
            let path = common
                .config
                .ok_or_else(|| CliError::Usage("simulate needs --config".into()))?;
            let mut cfg: SimulateConfig = load_config(&path)?;
            cfg.seed = common.seed.unwrap_or(cfg.seed);
            let out = resolve_out(
                common.out,
                &format!("run-alpha{}-seed{}", cfg.alpha, cfg.seed),
            );
            let summary = cmd_simulate(&cfg, &out, common.workers)?;
            let dead = summary
                .samples
                .iter()
                .filter(|s| s.death_time.is_some())
                .count();
            println!(
                "{} sample(s), {} level(s), {dead} blown up; artifacts in {}",
                summary.samples.len(),
                summary.n_levels,
                out.display()
            );
            Ok(EXIT_OK)
        }
        Command::Verify { suite, common } => {
            let mut cfg = match &common.config {
                Some(p) => load_config::<VerifyConfig>(p)?,
                None => VerifyConfig {
                    suite: suite.clone().ok_or_else(|| {
                        CliError::Usage("verify needs --suite or --config".into())
                    })?,
                    seed: 0,
                },
            };
            cfg.suite = suite.unwrap_or(cfg.suite);
            cfg.seed = common.seed.unwrap_or(cfg.seed);
            // Validate before touching the output directory.
            cfg.suite.parse::<verification::Suite>()?;
            let out = resolve_out(
                common.out,
                &format!("verify-{}-seed{}", cfg.suite, cfg.seed),
            );
            let report = cmd_verify(&cfg, &out, common.workers)?;
            print!("{}", report.to_text());
            Ok(if report.all_pass() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            })
        }
        Command::Report {
            dir,
            reproduce,
            common,
        } => {
            let dir = dir
                .or(common.out)
                .ok_or_else(|| CliError::Usage("report needs a directory".into()))?;
            let inspection = cmd_report(&dir, reproduce, common.workers)?;
            print!("{}", inspection.text);
            Ok(if inspection.ok {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
