//! `koszul`: Betti tables, oracle comparisons, duality checks, sweeps, fits
//! and equivariant checks for monomial section systems.
//!
//! Exit codes: 0 success/agreement, 1 a computed disagreement, 2 a
//! configuration error, 3 an internal integrity error.

mod commands;
mod config;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use koszul_core::{par, Error, Exec, FieldSpec, LinAlg};

use crate::config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "koszul", version, about = "Exact Koszul cohomology of monomial section systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Prime modulus (overrides the config).
    #[arg(long, global = true)]
    field_prime: Option<u64>,

    /// Two-prime certified ranks with rational escalation.
    #[arg(long, global = true)]
    certify: bool,

    /// Worker threads (default 1).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the primary output (CSV or report) here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Betti table as CSV plus a diagram.
    Betti,
    /// Wedge-complex dimensions against the free-resolution oracle.
    OracleCompare,
    /// Duality check on projective space.
    Duality,
    /// `d,dim` sweep over `L_d = P + dA`.
    Sweep,
    /// Exact polynomial fit of a sweep, validated on held-out samples.
    Fit,
    /// Invariant diagonal complex against the wedge complex.
    Equivariant,
}

/// What a command produced.
pub struct Report {
    /// CSV or report text; goes to `--out` when given.
    pub primary: String,
    /// Human-oriented extra text, always on stdout.
    pub notes: String,
    /// `false` when the command found a disagreement.
    pub ok: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Integrity(_) => 3,
        _ => 2,
    }
}

fn linalg(cli: &Cli, cfg: &RunConfig, threads: usize) -> Result<LinAlg, Error> {
    let field = match (cli.field_prime, cfg.field.prime, cfg.field.rationals) {
        (Some(p), _, _) => FieldSpec::prime(p)?,
        (None, Some(p), false) => FieldSpec::prime(p)?,
        (None, None, true) => FieldSpec::Rationals,
        (None, Some(_), true) => {
            return Err(Error::Config("field: give either prime or rationals".into()))
        }
        (None, None, false) => FieldSpec::default(),
    };
    let exec = if threads > 1 {
        Exec::Parallel
    } else {
        Exec::Sequential
    };
    let la = LinAlg::new(field)
        .with_certify(cli.certify || cfg.field.certify)
        .with_exec(exec);
    la.validate()?;
    Ok(la)
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg = RunConfig::parse(&text)?;
    let threads = cli.threads.or(cfg.threads).unwrap_or(1);
    if threads == 0 {
        return Err(Error::Config("--threads must be at least 1".into()));
    }
    let la = linalg(cli, &cfg, threads)?;
    par::with_threads(threads, || match cli.command {
        Command::Betti => commands::betti(&cfg, &la),
        Command::OracleCompare => commands::oracle_compare(&cfg, &la),
        Command::Duality => commands::duality(&cfg, &la),
        Command::Sweep => commands::sweep(&cfg, &la),
        Command::Fit => commands::fit(&cfg, &la),
        Command::Equivariant => commands::equivariant(&cfg, &la),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    print!("{}", report.notes);
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &report.primary) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{}", report.primary),
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("disagreement found; see the report above");
        ExitCode::from(1)
    }
}
