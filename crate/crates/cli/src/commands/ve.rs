//! Exact variational equations and their reduced scalar forms.

use anyhow::Result;
use serde_json::json;

use super::{chain, Ctx, ParamArgs};
use crate::config::Branch;
use crate::output::Outcome;

pub fn run(ctx: &Ctx, args: &ParamArgs) -> Result<Outcome> {
    let mut p = ctx.cfg.ve.clone();
    args.apply(&mut p);
    let (checks, data) = match p.system {
        Branch::Kepler => {
            let c = chain::kepler(&ctx.cfg, &p)?;
            (c.checks.clone(), json!({ "system": "kepler", "kepler": c }))
        }
        Branch::Twobody => {
            let c = chain::twobody(&p)?;
            (c.checks.clone(), json!({ "system": "twobody", "twobody": c }))
        }
    };
    Ok(Outcome::new("ve", ctx.seed, checks, data))
}
