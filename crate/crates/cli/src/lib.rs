//! Batch front end: parses problem configs and dispatches to the region,
//! search, simulation and property-check routines of `fncomp-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod random;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::ProblemConfig;
use error::CliError;
use output::{Format, Report};

#[derive(Debug, Parser)]
#[command(name = "fncomp", version, about = "Rate/leakage regions and binning simulations for function computation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Half-space bounds, corner points and g/gbar residuals for explicit channels.
    Region(Common),
    /// Generator points, hull summary and Pareto frontiers over enumerated channels.
    Search(Common),
    /// Exact error probability and leakage of the binning scheme over a grid.
    Simulate(Common),
    /// Property suites on a config, or on a batch of random instances.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Problem config (JSON).
    pub config: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub out: Format,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to one per core.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: Option<u32>,
    /// Print the validated config and exit.
    #[arg(long)]
    pub dump_config: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Problem config (JSON); optional with --random-batch.
    #[arg(required_unless_present = "random_batch")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub out: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: Option<u32>,
    #[arg(long)]
    pub dump_config: bool,
    /// Check this many random three-user instances instead of a config.
    #[arg(long, conflicts_with = "config")]
    pub random_batch: Option<usize>,
}

fn with_pool<T>(jobs: Option<u32>, f: impl FnOnce() -> T + Send) -> Result<T, CliError>
where
    T: Send,
{
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j as usize);
    }
    let pool = b.build().map_err(|e| CliError::Other(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn load(path: &std::path::Path) -> Result<(ProblemConfig, config::Problem), CliError> {
    let cfg = ProblemConfig::load(path)?;
    let problem = cfg.problem()?;
    Ok((cfg, problem))
}

/// Runs one invocation and returns what goes to stdout. A failed property
/// check still returns its report, inside [`CliError::CheckFailed`].
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Region(a) | Command::Search(a) | Command::Simulate(a) => {
            let (cfg, problem) = load(&a.config)?;
            if a.dump_config {
                return Ok(cfg.to_json() + "\n");
            }
            with_pool(a.jobs, || match &cli.command {
                Command::Region(_) => commands::region::run(&problem).map(|r| r.render(a.out)),
                Command::Search(_) => {
                    let section = cfg.search.clone().unwrap_or_default();
                    commands::search::run(&problem, &section).map(|r| r.render(a.out))
                }
                _ => {
                    let section = cfg
                        .sim
                        .as_ref()
                        .ok_or_else(|| CliError::Config("sim: simulate needs a sim section".into()))?;
                    commands::simulate::run(&problem, section, a.seed).map(|r| r.render(a.out))
                }
            })?
        }
        Command::Check(a) => {
            let report = match (&a.config, a.random_batch) {
                (_, Some(count)) => with_pool(a.jobs, || commands::check::run_random_batch(count, a.seed))??,
                (Some(path), None) => {
                    let (cfg, problem) = load(path)?;
                    if a.dump_config {
                        return Ok(cfg.to_json() + "\n");
                    }
                    with_pool(a.jobs, || commands::check::run_config(&problem, cfg.search.as_ref()))??
                }
                (None, None) => unreachable!("clap requires one of them"),
            };
            let text = report.render(a.out);
            if report.passed {
                Ok(text)
            } else {
                Err(CliError::CheckFailed(text))
            }
        }
    }
}
