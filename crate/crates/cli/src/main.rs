//! `admwex`: weighted extremal profiles, stability verdicts and
//! Einstein–Maxwell searches driven by TOML job files.

mod commands;
mod config;
mod exit;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::commands::{default_mode, Ctx, DEFAULT_TOL};
use crate::config::Mode;
use crate::report::{envelope, render, Run};

#[derive(Debug, Parser)]
#[command(name = "admwex", version, about = "Weighted extremal metrics on admissible projective bundles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML job file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Arithmetic; overrides the config's `mode`.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Directory for the JSON report and CSV curve; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Float-mode tolerance for `A1 = 0`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Also write the command's curve as CSV (needs --out).
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Build the extremal profile and test its positivity.
    Solve,
    /// Futaki and Donaldson–Futaki invariants with stability verdicts.
    Stability,
    /// Roots of A1(a) with |a| > 1, or the conformally-Einstein solve.
    EmSearch,
    /// Sample the Yamabe-type functional and find its critical points.
    Yamabe,
    /// Vandermonde and extremality checks on orthotoric data.
    Orthotoric,
    /// Weighted Mabuchi energy along perturbations of the extremal profile.
    Mabuchi,
    /// Grid over the x values of the first two blocks.
    Sweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Stability => "stability",
            Command::EmSearch => "em-search",
            Command::Yamabe => "yamabe",
            Command::Orthotoric => "orthotoric",
            Command::Mabuchi => "mabuchi",
            Command::Sweep => "sweep",
        }
    }
}

fn init_pool() -> Result<()> {
    if let Ok(v) = std::env::var("ADMWEX_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| exit::usage(format!("ADMWEX_THREADS = {v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("thread pool")?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<i32> {
    init_pool()?;
    let command = cli.command.name();
    if cli.csv && cli.out.is_none() {
        return Err(exit::usage("--csv needs --out <dir>"));
    }
    let path = cli.config.as_ref().ok_or_else(|| exit::usage("--config <file> is required"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| exit::usage(format!("reading {}: {e}", path.display())))?;
    let cfg = config::parse(&text)?;
    let mode = cli.mode.or(cfg.mode).unwrap_or_else(|| default_mode(command));
    let tol = cli.tol.or(cfg.tol).unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(exit::usage(format!("tol = {tol} must be positive")));
    }
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let ctx = Ctx { cfg: &cfg, mode, tol, seed };
    let outcome = commands::run(command, &ctx).with_context(|| command.to_string())?;
    let run = Run::new(command, mode, tol, seed, &text)?;
    match &cli.out {
        Some(dir) => {
            let p = report::write_files(dir, &run, &outcome, cli.csv)?;
            eprintln!("{}", p.display());
        }
        None => {
            let text = render(&envelope(&run, &outcome, None))?;
            std::io::stdout().lock().write_all(text.as_bytes()).context("writing report")?;
        }
    }
    Ok(outcome.exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("admwex: {e:#}");
            ExitCode::from(exit::code_for(&e) as u8)
        }
    }
}
