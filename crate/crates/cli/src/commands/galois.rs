//! Galois verdicts for the reduced variational equations.

use anyhow::Result;
use heisenkep::galois::{liouvillian_verdict, rehm_classify};
use serde_json::json;

use super::chain::{self, TwoBodyReduction};
use super::{Ctx, ParamArgs};
use crate::config::Branch;
use crate::output::{Check, Outcome};

pub fn run(ctx: &Ctx, args: &ParamArgs) -> Result<Outcome> {
    let mut p = ctx.cfg.ve.clone();
    args.apply(&mut p);
    let (mut checks, verdict, input) = match p.system {
        Branch::Kepler => {
            let c = chain::kepler(&ctx.cfg, &p)?;
            let v = rehm_classify(&c.parabolic)?;
            (c.checks.clone(), v, json!({ "a": c.a, "c": c.c, "parabolic": c.parabolic }))
        }
        Branch::Twobody => {
            let c = chain::twobody(&p)?;
            chain::require_reduction(&c)?;
            let v = match &c.reduction {
                TwoBodyReduction::Parabolic { parabolic, .. } => rehm_classify(parabolic)?,
                TwoBodyReduction::ThirdOrder { operator, .. } => liouvillian_verdict(operator)?,
                TwoBodyReduction::None { .. } => unreachable!("checked above"),
            };
            let input = match &c.reduction {
                TwoBodyReduction::Parabolic { parabolic, .. } => json!({ "parabolic": parabolic }),
                TwoBodyReduction::ThirdOrder { operator, .. } => json!({ "operator": operator }),
                TwoBodyReduction::None { .. } => json!(null),
            };
            (c.checks.clone(), v, json!({ "mu": c.mu, "tau0": c.tau0, "w2": c.w2, "input": input }))
        }
    };
    checks.push(Check::flag("identity_component_not_solvable", verdict.is_not_solvable()));
    let data = json!({ "system": p.system, "parameters": input, "verdict": verdict });
    Ok(Outcome::new("galois", ctx.seed, checks, data))
}
