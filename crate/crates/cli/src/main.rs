//! `padic-dyn`: run p-adic dynamics experiments and emit JSON or CSV reports.
//!
//! Exit status: 0 all assertions hold, 1 counterexample found, 2 invalid input,
//! 3 precision exhausted.

mod commands;
mod config;
mod error;
mod output;
mod verify;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use error::{CliError, ExitStatus};
use verify::{Suite, SuiteInputs};

#[derive(Parser)]
#[command(name = "padic-dyn", version, about = "Dynamics of f(x) = ax/(x^2 + a) over p-adic fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate f from a starting point and record the orbit.
    Orbit {
        #[command(flatten)]
        config: ExperimentConfig,
        /// Starting point literal.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Reference points; distances to each are recorded per step.
        #[arg(long, allow_hyphen_values = true)]
        refs: Vec<String>,
    },
    /// Run one assertion suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        config: ExperimentConfig,
        /// Sphere radius, e.g. "1/5", "5^-2" or "2^-3/2".
        #[arg(long)]
        r: Option<String>,
        /// Explicit point (ball-image center).
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Fixed-point test and conjugacy reduction of (ax + b)/(x^2 + cx + d).
    Reduce {
        #[command(flatten)]
        config: ExperimentConfig,
        /// Coefficients "a,b,c,d".
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
    /// Query the radius map.
    Phi {
        #[command(flatten)]
        config: ExperimentConfig,
        #[arg(long)]
        r: Option<String>,
        /// Fixed value of A* for the boundary sphere.
        #[arg(long)]
        astar: Option<String>,
        /// Point on the boundary sphere to resolve A* from.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Haar measure of a ball V_rho(c) inside S_r(0).
    Measure {
        #[command(flatten)]
        config: ExperimentConfig,
        #[arg(long)]
        r: String,
        /// Ball radius; defaults to r^3/A when --a is given.
        #[arg(long)]
        rho: Option<String>,
    },
}

impl Command {
    fn config(&self) -> &ExperimentConfig {
        match self {
            Command::Orbit { config, .. }
            | Command::Verify { config, .. }
            | Command::Reduce { config, .. }
            | Command::Phi { config, .. }
            | Command::Measure { config, .. } => config,
        }
    }
}

fn run(command: &Command, config: &ExperimentConfig) -> Result<ExitStatus, CliError> {
    if let Some(jobs) = config.jobs {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let report = match command {
        Command::Orbit { x, refs, .. } => commands::orbit(config, x, refs)?,
        Command::Verify { suite, r, x, .. } => {
            verify::run(config, *suite, &SuiteInputs { r: r.as_deref(), x: x.as_deref() })?
        }
        Command::Reduce { coeffs, .. } => commands::reduce(config, coeffs)?,
        Command::Phi { r, astar, x, .. } => commands::phi(config, r.as_deref(), astar.as_deref(), x.as_deref())?,
        Command::Measure { r, rho, .. } => commands::measure(config, r, rho.as_deref())?,
    };
    output::emit(config, &report)?;
    Ok(report.status)
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitStatus::InvalidInput as i32 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let status = match cli.command.config().clone().resolve().and_then(|config| run(&cli.command, &config)) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            e.status()
        }
    };
    std::process::exit(status as i32);
}
