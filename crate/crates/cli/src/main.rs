mod commands;
mod error;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;
use input::{Input, Overrides};
use report::Report;

/// Exterior differential systems: Pfaff analysis, Cartan topology, period
/// integrals and field-physics residuals.
#[derive(Debug, Parser)]
#[command(name = "cartan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pfaff sequence, torsion, parity and Cartan topology of a 1-form.
    Analyze,
    /// Cartan topology table, either of a 1-form or of a point count.
    Topology,
    /// Circulation of a 1-form around each curve.
    Circulate,
    /// Gauss linking integral of the first two curves.
    Link,
    /// Braid integral over the first three curves.
    Braid,
    /// Residuals and diagnostics for a fluid or electromagnetic block.
    Physics,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Debug, Args)]
struct Opts {
    /// Input specification (TOML).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long = "tol-abs", global = true)]
    tol_abs: Option<f64>,
    #[arg(long = "tol-rel", global = true)]
    tol_rel: Option<f64>,
    #[arg(long, global = true)]
    panels: Option<usize>,
    #[arg(long, global = true)]
    refine: Option<u32>,
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let o = &cli.opts;
    let overrides = Overrides {
        samples: o.samples,
        seed: o.seed,
        tol_abs: o.tol_abs,
        tol_rel: o.tol_rel,
        panels: o.panels,
        refine: o.refine,
    };
    let input = o.input.as_deref().map(|p| Input::load(p, overrides)).transpose()?;
    let required = || input.as_ref().ok_or_else(|| CliError::Input("--input is required for this command".into()));
    match cli.command {
        Command::Analyze => commands::analyze_cmd(required()?),
        Command::Topology => commands::topology_cmd(input.as_ref()),
        Command::Circulate => commands::circulate_cmd(required()?),
        Command::Link => commands::link_cmd(required()?),
        Command::Braid => commands::braid_cmd(required()?),
        Command::Physics => commands::physics_cmd(required()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let rendered = match cli.opts.format {
        Format::Text => report.human(),
        Format::Machine => report.machine(),
    };
    match &cli.opts.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{rendered}"),
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    ExitCode::from(if report.inconclusive { 2 } else { 0 })
}
