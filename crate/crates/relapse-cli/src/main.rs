//! `relapse`: analysis and simulation front end for the
//! contact-disaggregated SIR model with nonlinear relapse.
//!
//! Every subcommand except `sturm count` reads a JSON config (see the
//! repository `configs/` directory for ready-to-run recipes) and writes its
//! results under `--out`. Exit codes: 0 on success, 1 on domain errors
//! (invalid parameters, failed integrations), 2 on usage errors (bad flags,
//! missing or malformed configs).

// Negated comparisons like `!(x > 0.0)` reject NaN along with the range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use output::OutDir;

#[derive(Parser)]
#[command(name = "relapse", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory for CSV/JSON results.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweep cells (0 = all cores).
    #[arg(long, value_name = "N", default_value_t = 0)]
    workers: usize,
    /// Reserved for future stochastic paths; accepted and ignored.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the disease-free and endemic equilibria.
    Equilibria(CommonArgs),
    /// Classify every equilibrium by Jacobian eigenvalues.
    Stability(CommonArgs),
    /// Integrate one scenario and write the trajectory.
    Simulate(CommonArgs),
    /// Integrate a grid of initial infected proportions.
    Basin(CommonArgs),
    /// Sweep R0 and write the bifurcation branches and regions.
    Bifurcate(CommonArgs),
    /// Evaluate a (kappa, theta) grid of limiting or peak prevalence.
    Heatmap(CommonArgs),
    /// Locate the three-root window (single cell or surface).
    Window(CommonArgs),
    /// Exact real-root counting helpers.
    Sturm {
        #[command(subcommand)]
        command: SturmCommand,
    },
    /// Bifurcation-condition checks.
    Theorem {
        #[command(subcommand)]
        command: TheoremCommand,
    },
    /// Run the no-relapse influenza variants and report peak prevalence.
    Influenza(CommonArgs),
    /// Integrate the host-vector system.
    Vector(CommonArgs),
}

#[derive(Subcommand)]
enum SturmCommand {
    /// Count distinct real roots of a polynomial on an interval.
    Count {
        /// Ascending coefficients, comma separated (a0,a1,a2,a3).
        #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
        coeffs: String,
        /// Interval bounds, comma separated (a,b).
        #[arg(long, value_name = "A,B", allow_hyphen_values = true)]
        interval: String,
    },
}

#[derive(Subcommand)]
enum TheoremCommand {
    /// Report the inequality, line constants, theta thresholds and window.
    Check(CommonArgs),
}

enum AppError {
    Usage(anyhow::Error),
    Domain(anyhow::Error),
}

fn load(common: &CommonArgs) -> Result<(RunConfig, OutDir), AppError> {
    if common.workers > 0 {
        // Build the global pool once; a failure just means it exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(common.workers)
            .build_global();
    }
    let cfg = RunConfig::load(&common.config).map_err(AppError::Usage)?;
    Ok((cfg, OutDir::new(common.out.clone())))
}

fn run_with_config(
    common: &CommonArgs,
    f: impl FnOnce(&RunConfig, &OutDir) -> anyhow::Result<String>,
) -> Result<String, AppError> {
    let (cfg, out) = load(common)?;
    let summary = f(&cfg, &out).map_err(AppError::Domain)?;
    Ok(match &cfg.scenario {
        Some(name) => format!("{name}: {summary}"),
        None => summary,
    })
}

fn dispatch(cli: Cli) -> Result<String, AppError> {
    match cli.command {
        Command::Equilibria(common) => run_with_config(&common, run::equilibria),
        Command::Stability(common) => run_with_config(&common, run::stability),
        Command::Simulate(common) => run_with_config(&common, run::simulate),
        Command::Basin(common) => run_with_config(&common, run::basin),
        Command::Bifurcate(common) => run_with_config(&common, run::bifurcate),
        Command::Heatmap(common) => run_with_config(&common, run::heatmap),
        Command::Window(common) => run_with_config(&common, run::window),
        Command::Sturm { command } => match command {
            SturmCommand::Count { coeffs, interval } => {
                run::sturm_count(&coeffs, &interval).map_err(AppError::Domain)
            }
        },
        Command::Theorem { command } => match command {
            TheoremCommand::Check(common) => run_with_config(&common, run::theorem_check),
        },
        Command::Influenza(common) => run_with_config(&common, run::influenza),
        Command::Vector(common) => run_with_config(&common, run::vector),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(AppError::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(AppError::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
