//! Command-line front end: `run`, `sweep` and `check-gains`.
//!
//! Exit codes: 0 intercept or passing certificate, 1 error, 2 miss, timeout,
//! guard breach or failing certificate, 3 inconclusive certificate.

pub mod commands;
pub mod csv_log;
pub mod scenario_file;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    cmd_check_gains, cmd_run, cmd_sweep, parse_grid, CertificateInputs, EXIT_ERROR,
    EXIT_INCONCLUSIVE, EXIT_NEGATIVE, EXIT_OK,
};
pub use scenario_file::{
    parse_scenario, parse_scenario_str, serialize_scenario, ScenarioFileError,
};

use crate::analysis::DEFAULT_AUDIT_SLACK;

#[derive(Debug, Parser)]
#[command(
    name = "igc-sim",
    version,
    about = "Integrated guidance and control simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one engagement and write its CSV log.
    Run(RunArgs),
    /// Run the scenario over a grid of gains.
    Sweep(SweepArgs),
    /// Print the small-gain certificate for the scenario's gains.
    CheckGains(CheckGainsArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub scenario: PathBuf,
    /// Output CSV log.
    #[arg(short, long)]
    pub out: PathBuf,
    /// Check the logged trajectory against its ISS bounds.
    #[arg(long)]
    pub audit: bool,
    /// Relative slack for --audit.
    #[arg(long, default_value_t = DEFAULT_AUDIT_SLACK)]
    pub slack: f64,
    /// Print the summary as JSON.
    #[arg(long)]
    pub summary_json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub scenario: PathBuf,
    /// `name=v1,v2,...` or `name1+name2=v1,v2,...`; repeat for a product grid.
    #[arg(long = "grid")]
    pub grid: Vec<String>,
    /// Output CSV table.
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckGainsArgs {
    pub scenario: PathBuf,
    /// Bound on the spectral norm of g0 (default: worst case over the flight domain).
    #[arg(long)]
    pub g0_norm: Option<f64>,
    /// Bound on the spectral norm of g1 (default: worst case over the flight domain).
    #[arg(long)]
    pub g1_norm: Option<f64>,
    /// Gain estimate of the LOS-rate subsystem.
    #[arg(long)]
    pub gamma0y: Option<f64>,
    /// Gain estimate of the attitude subsystem.
    #[arg(long)]
    pub gamma2y: Option<f64>,
    /// Estimate missing gains by probe simulations.
    #[arg(long)]
    pub probe: bool,
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match &cli.command {
        Command::Run(a) => cmd_run(
            &a.scenario,
            &a.out,
            a.audit.then_some(a.slack),
            a.summary_json,
            out,
            err,
        ),
        Command::Sweep(a) => cmd_sweep(&a.scenario, &a.grid, &a.out, out, err),
        Command::CheckGains(a) => cmd_check_gains(
            &a.scenario,
            &CertificateInputs {
                g0_norm: a.g0_norm,
                g1_norm: a.g1_norm,
                gamma0y: a.gamma0y,
                gamma2y: a.gamma2y,
                probe: a.probe,
            },
            out,
            err,
        ),
    }
}

/// Parses arguments and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            code
        }
    }
}
