//! The `ctsplit` command-line tool as a library, so that integration tests
//! can drive subcommands without spawning processes.

pub mod analysis;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

use std::io::Write;

use clap::{Args, Parser, Subcommand};

use analysis::Analysis;
use config::{CommonArgs, RunConfig, OUT_ENV};
use error::{CliError, CliResult};
use output::Sink;

#[derive(Debug, Parser)]
#[command(
    name = "ctsplit",
    version,
    about = "Splitting of separatrices for tori with constant-type frequencies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certified continued fraction, convergents and numerators
    Cf(CommonArgs),
    /// Diophantine limits and the constants C0, D0, B, C
    Constants(CommonArgs),
    /// Scan of h1 and the piecewise approximations over an eps grid
    Scan(CommonArgs),
    /// Exponentially small lower-bound estimates at chosen eps
    Bound(BoundArgs),
    /// Run the structural and oracle checks
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated eps values (default: 10 log-spaced points in the window)
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Multiply gamma* by this factor without recomputing C0 and D0
    #[arg(long, hide = true)]
    pub corrupt_gamma_star: Option<f64>,
}

fn analysis(args: &CommonArgs) -> CliResult<Analysis> {
    let env_out = std::env::var_os(OUT_ENV).map(Into::into);
    Analysis::build(&RunConfig::resolve(args, env_out)?)
}

/// Runs one subcommand, writing its report to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    let text = match &cli.command {
        Command::Cf(a) => commands::cf(&analysis(a)?)?,
        Command::Constants(a) => commands::constants(&analysis(a)?)?,
        Command::Scan(a) => commands::scan(&analysis(a)?)?,
        Command::Bound(b) => commands::bound(&analysis(&b.common)?, b.eps.as_deref())?,
        Command::Verify(v) => {
            let a = analysis(&v.common)?;
            let report = match v.corrupt_gamma_star {
                Some(f) => {
                    let mut c = *a.model.constants();
                    c.gamma_star *= f;
                    let m = ctsplit_core::splitting::SplittingModel::new(
                        a.freq.clone(),
                        a.config.depth,
                        c,
                        *a.model.params(),
                    )?;
                    verify::run_checks(&a, &m)?
                }
                None => verify::run_checks(&a, &a.model)?,
            };
            Sink::new("verify", &a.config)?.json("verify.json", &report)?;
            out.write_all(report.text().as_bytes())?;
            if report.failed > 0 {
                return Err(CliError::VerifyFailed(report.failed));
            }
            return Ok(());
        }
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}
