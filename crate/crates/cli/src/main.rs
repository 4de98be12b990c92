//! `chiralwalk`: index, essential spectrum, verification and plots for
//! chirally symmetric quantum walks described by a JSON config.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 not Fredholm,
//! 3 verification failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "chiralwalk",
    version,
    about = "Witten index and essential spectrum of chiral quantum walks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Witten index by the closed formula and both winding routes.
    Index(CommonArgs),
    /// Essential spectrum as CSV plus a classification summary.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write the sampled symbol-eigenvalue cloud to this CSV file.
        #[arg(long, value_name = "FILE")]
        cloud: Option<PathBuf>,
    },
    /// Residual checks, kernel witness and bound states on a finite section.
    Verify(CommonArgs),
    /// SVG plot of the essential spectrum.
    Plot {
        #[command(flatten)]
        common: CommonArgs,
        /// Overlay eigenvalues of the finite section of half-width --window.
        #[arg(long)]
        eigenvalues: bool,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Model configuration (JSON).
    pub config: PathBuf,
    /// Samples per endpoint for the symbol-eigenvalue cloud.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Half-width N of finite sections (sites -N..=N).
    #[arg(long)]
    pub window: Option<i64>,
    /// Residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for the randomized phase-assignment check.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Index(common) => commands::index(&common),
        Command::Spectrum { common, cloud } => commands::spectrum(&common, cloud.as_deref()),
        Command::Verify(common) => commands::verify(&common),
        Command::Plot {
            common,
            eigenvalues,
        } => commands::plot(&common, eigenvalues),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "chiralwalk",
            "verify",
            "c.json",
            "--window",
            "50",
            "--tol",
            "1e-9",
            "--seed",
            "3",
        ])
        .unwrap();
        let Command::Verify(args) = cli.command else {
            panic!()
        };
        assert_eq!(
            (args.window, args.tol, args.seed),
            (Some(50), Some(1e-9), 3)
        );
        assert!(Cli::try_parse_from(["chiralwalk", "index"]).is_err());
    }
}
