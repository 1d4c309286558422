//! `heisenkep`: batch front end for simulations, identity checks, exact
//! variational equations and Galois verdicts.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on
//! invalid input or a computation error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use commands::{Ctx, ParamArgs};
use config::{Format, RunConfig, DEFAULT_SEED};
use output::{to_json, write_outputs, Outcome};

#[derive(Parser)]
#[command(name = "heisenkep", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for the report and tables.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and monitor its conserved quantities.
    Simulate(Common),
    /// Check bracket identities, dJ/dt = 2H and the extended Poisson structure.
    Verify(Common),
    /// Exact variational equations and their reduced scalar forms.
    Ve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Galois verdict for the reduced variational equation.
    Galois {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Block decomposition of a 4×4 system from its exterior square.
    Factorize {
        #[command(flatten)]
        common: Common,
        /// Only report the Plücker quadric of each exponential solution.
        #[arg(long)]
        plucker_only: bool,
    },
    /// Many trajectories over a grid of energies.
    Sweep(Common),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Verify(_) => "verify",
            Command::Ve { .. } => "ve",
            Command::Galois { .. } => "galois",
            Command::Factorize { .. } => "factorize",
            Command::Sweep(_) => "sweep",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Simulate(c) | Command::Verify(c) | Command::Sweep(c) => c,
            Command::Ve { common, .. } | Command::Galois { common, .. } | Command::Factorize { common, .. } => common,
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let common = cli.command.common();
    let cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(sub) = &cfg.subcommand {
        if sub != cli.command.name() {
            bail!("the config is for `{sub}`, not `{}`", cli.command.name());
        }
    }
    let seed = common.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let format = common.format.or(cfg.format).unwrap_or_default();
    let out_dir = common.out.clone().or_else(|| cfg.out.clone());
    let ctx = Ctx { cfg, seed, format };
    let outcome = match &cli.command {
        Command::Simulate(_) => commands::simulate::run(&ctx)?,
        Command::Verify(_) => commands::verify::run(&ctx)?,
        Command::Ve { params, .. } => commands::ve::run(&ctx, params)?,
        Command::Galois { params, .. } => commands::galois::run(&ctx, params)?,
        Command::Factorize { plucker_only, .. } => {
            commands::factorize::run(&ctx, *plucker_only || ctx.cfg.factorize.plucker_only)?
        }
        Command::Sweep(_) => commands::sweep::run(&ctx)?,
    };
    if let Some(dir) = out_dir {
        write_outputs(&outcome, &dir, ctx.format)?;
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for c in &outcome.report.checks {
                eprintln!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
            }
            match to_json(&outcome.report) {
                Ok(s) => print!("{s}"),
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(2);
                }
            }
            if outcome.report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
