//! Command-line front end for the `rfwpt` simulator: single simulations,
//! swarm optimizations and parameter sweeps driven by a TOML config.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{FormatName, ProfileName, RunConfig};
pub use error::CliError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "rfwpt", version, about = "RF wireless power transfer chain simulator and optimizer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the chain once and dump every stage.
    Simulate(CommonArgs),
    /// Optimize the waveform and phase word.
    Optimize(CommonArgs),
    /// Optimize once per point of the configured sweep.
    Sweep(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Table,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Paper,
    Desk,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML run configuration; the reference system is used when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides `swarm.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Overrides the config's profile (desk by default).
    #[arg(long, value_enum)]
    pub profile: Option<ProfileArg>,
}

impl CommonArgs {
    /// Loads the config and applies the command-line overrides.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.swarm.seed = seed;
        }
        if let Some(p) = self.profile {
            cfg.profile = match p {
                ProfileArg::Paper => ProfileName::Paper,
                ProfileArg::Desk => ProfileName::Desk,
            };
        }
        if let Some(f) = self.format {
            cfg.output.format = Some(match f {
                FormatArg::Table => FormatName::Table,
                FormatArg::Structured => FormatName::Structured,
            });
        }
        if let Some(out) = &self.out {
            cfg.output.path = Some(out.display().to_string());
        }
        cfg.check()?;
        Ok(cfg)
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.output.path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

/// Executes a parsed command and returns its exit status.
pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Simulate(args) => {
            let cfg = args.resolve()?;
            let report = commands::simulate(&cfg)?;
            let format = cfg.output.format.unwrap_or(FormatName::Structured);
            emit(&cfg, &output::render_simulation(&report, format)?)?;
            Ok(EXIT_OK)
        }
        Command::Optimize(args) => {
            let cfg = args.resolve()?;
            let result = commands::optimize(&cfg)?;
            let format = cfg.output.format.unwrap_or(FormatName::Structured);
            emit(&cfg, &output::render_optimization(&result, cfg.swarm.seed, format)?)?;
            if result.feasible {
                Ok(EXIT_OK)
            } else {
                eprintln!(
                    "infeasible: best design harvests {} W, {} W required",
                    output::fmt9(result.p_out_dc),
                    output::fmt9(cfg.swarm.required_dc_w)
                );
                Ok(EXIT_INFEASIBLE)
            }
        }
        Command::Sweep(args) => {
            let cfg = args.resolve()?;
            let rows = commands::sweep(&cfg)?;
            let format = cfg.output.format.unwrap_or(FormatName::Table);
            emit(&cfg, &output::render_sweep(&rows, format)?)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
