use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use drawdown::commands::{self, PolicySource};
use drawdown::config::RunConfig;
use drawdown::CliError;

#[derive(Parser, Debug)]
#[command(version, about = "Optimal proportional reinsurance against observed drawdowns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Random seed; overrides `sim.seed` in the configuration.
    #[arg(long, env = "DRAWDOWN_SEED")]
    seed: Option<u64>,

    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for the value function and optimal retention.
    Solve(Common),
    /// Estimate the value of a policy by simulation.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Use the policy stored in a `solution.csv`.
        #[arg(long, conflicts_with = "constant_b", required_unless_present = "constant_b")]
        solution: Option<PathBuf>,
        /// Use a constant retention level.
        #[arg(long)]
        constant_b: Option<f64>,
    },
    /// Compare simulated drawdowns with the closed-form law.
    ValidateDist(Common),
    /// Solve every variant of a figure sweep.
    Figures(Common),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Solve(c) | Command::ValidateDist(c) | Command::Figures(c) => c,
        Command::Simulate { common, .. } => common,
    };
    let cfg = RunConfig::load(&common.config)?;
    let seed = common.seed.unwrap_or(cfg.sim.seed);
    let out = common.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    match &cli.command {
        Command::Solve(_) => {
            let s = commands::run_solve(&cfg, &out)?;
            eprintln!("converged in {} sweeps, residual {:e}", s.iterations, s.residual);
        }
        Command::Simulate {
            solution, constant_b, ..
        } => {
            let source = match (solution, constant_b) {
                (Some(path), _) => PolicySource::Solution(path.clone()),
                (None, Some(b)) => PolicySource::Constant(*b),
                (None, None) => unreachable!("clap requires one policy source"),
            };
            for row in commands::run_simulate(&cfg, &source, seed, &out)? {
                eprintln!("z0={}: {} ± {}", row.z0, row.mean, row.std_err);
            }
        }
        Command::ValidateDist(_) => {
            commands::run_validate_dist(&cfg, seed, &out)?;
        }
        Command::Figures(_) => {
            commands::run_figures(&cfg, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_status() as u8)
        }
    }
}
