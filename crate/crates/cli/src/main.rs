use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use terp_cli::{parse_assignments, parse_axis, CliError, Mode, Model, Opts, Outcome};

#[derive(Parser)]
#[command(name = "terp", version, about = "Regular singular TERP-structures: spectra, twistors, limits")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Approx,
}

#[derive(Args)]
struct Common {
    /// Model file (JSON).
    model: PathBuf,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    /// Relative tolerance in approximate mode.
    #[arg(long, default_value_t = 1e-9)]
    eps: f64,
    /// Parameter values, `name=value`; repeatable or comma separated.
    #[arg(long)]
    point: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the topological data and the lattice.
    Validate(Common),
    /// Spectral numbers.
    Spectrum(Common),
    /// Spectral pairs.
    Pairs(Common),
    /// Hodge filtration on H^∞.
    Hodge(Common),
    /// Splitting type, the form h and the purity/polarization class.
    Twistor(Common),
    /// Classify over a parameter grid and write CSV.
    Scan {
        #[command(flatten)]
        common: Common,
        /// `name=start:stop:count[,log]`, one flag per axis.
        #[arg(long, required = true)]
        grid: Vec<String>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Limit of a named one-parameter family.
    Limit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        family: String,
    },
    /// Admissible spectra and the chart around the given lattice.
    Strata(Common),
}

fn opts(c: &Common) -> Result<Opts, CliError> {
    Ok(Opts {
        json: c.json,
        mode: match c.mode {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Approx => Mode::Approx,
        },
        eps: c.eps,
        point: parse_assignments(&c.point)?,
    })
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match &cli.cmd {
        Cmd::Validate(c) => terp_cli::cmd_validate(&Model::load(&c.model)?, &opts(c)?),
        Cmd::Spectrum(c) => terp_cli::cmd_spectrum(&Model::load(&c.model)?, &opts(c)?),
        Cmd::Pairs(c) => terp_cli::cmd_pairs(&Model::load(&c.model)?, &opts(c)?),
        Cmd::Hodge(c) => terp_cli::cmd_hodge(&Model::load(&c.model)?, &opts(c)?),
        Cmd::Twistor(c) => terp_cli::cmd_twistor(&Model::load(&c.model)?, &opts(c)?),
        Cmd::Strata(c) => terp_cli::cmd_strata(&Model::load(&c.model)?, &opts(c)?),
        Cmd::Limit { common, family } => terp_cli::cmd_limit(&Model::load(&common.model)?, &opts(common)?, family),
        Cmd::Scan { common, grid, out } => {
            let axes = grid.iter().map(|g| parse_axis(g)).collect::<Result<Vec<_>, _>>()?;
            let o = terp_cli::cmd_scan(&Model::load(&common.model)?, &opts(common)?, &axes)?;
            match out {
                Some(path) => {
                    std::fs::write(path, &o.stdout).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                    Ok(Outcome { stdout: String::new(), code: o.code })
                }
                None => Ok(o),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(o) => {
            print!("{}", o.stdout);
            ExitCode::from(o.code as u8)
        }
        Err(e) => {
            eprintln!("terp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
