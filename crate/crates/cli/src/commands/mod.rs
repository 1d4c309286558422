//! One module per subcommand.

mod chain;
pub mod factorize;
pub mod galois;
pub mod simulate;
pub mod sweep;
pub mod ve;
pub mod verify;

use anyhow::{bail, Result};
use heisenkep::exactalg::ExactScalar;

use crate::config::{Branch, Format, RunConfig, VeParams};

/// Command-line overrides of the exact parameters.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct ParamArgs {
    #[arg(long, value_enum)]
    pub system: Option<Branch>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub w2: Option<String>,
}

impl ParamArgs {
    pub fn apply(&self, p: &mut VeParams) {
        if let Some(s) = self.system {
            p.system = s;
        }
        if self.a.is_some() {
            p.a.clone_from(&self.a);
        }
        for (src, dst) in [(&self.c, &mut p.c), (&self.mu, &mut p.mu), (&self.tau0, &mut p.tau0), (&self.w2, &mut p.w2)] {
            if let Some(v) = src {
                dst.clone_from(v);
            }
        }
    }
}

pub struct Ctx {
    pub cfg: RunConfig,
    pub seed: u64,
    pub format: Format,
}

pub fn exact(name: &str, s: &str) -> Result<ExactScalar> {
    match s.trim().parse::<ExactScalar>() {
        Ok(v) => Ok(v),
        Err(_) => bail!("{name} = {s:?} is not an exact number"),
    }
}
