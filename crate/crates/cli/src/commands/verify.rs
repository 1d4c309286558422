//! Bracket identities, `dJ/dt = 2H` along a trajectory and the rank and
//! Casimir of the extended Poisson structure.

use anyhow::Result;
use heisenkep::dynamics::{extended_poisson_build, integrate, monitor_conserved, ExtendedState, IntegratorConfig};
use heisenkep::heisenmodel::{
    dilation_j, hamiltonian_flat, p_theta, poisson_bracket, potential_argument, rho, two_body_integrals, PhaseState,
    SystemKind, SystemSpec,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::Ctx;
use crate::config::{random_state, seeded_rng};
use crate::output::{Check, Outcome};

fn sample(spec: &SystemSpec, rng: &mut ChaCha8Rng, scale: f64) -> Vec<f64> {
    let n = spec.kind.dim() / 2;
    loop {
        let y: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-scale..scale)).collect();
        if rho(&potential_argument(spec.kind, &y[..n])) > 0.1 * scale {
            return y;
        }
    }
}

/// `max_k |residual_k|`, each residual relative to `1 + |H|`.
fn max_residual(states: &[Vec<f64>], spec: &SystemSpec, f: impl Fn(&[f64]) -> f64) -> f64 {
    states.iter().map(|y| f(y).abs() / (1.0 + hamiltonian_flat(spec, y).unwrap_or(0.0).abs())).fold(0.0, f64::max)
}

fn suite(ctx: &Ctx, spec: &SystemSpec, stream: u64, label: &str) -> Result<Vec<Check>> {
    let p = &ctx.cfg.verify;
    let tol = &ctx.cfg.tolerances;
    let mut rng = seeded_rng(ctx.seed, stream);
    let states: Vec<Vec<f64>> = (0..p.samples).map(|_| sample(spec, &mut rng, p.scale)).collect();
    let h = |v: &[f64]| hamiltonian_flat(spec, v).unwrap_or(f64::NAN);
    let row = |name: &str, v: f64| Check::bound(format!("{label}: {name}"), v, tol.bracket);
    let mut checks = Vec::new();

    checks.push(row("{J, H} = 2H", max_residual(&states, spec, |y| poisson_bracket(dilation_j, h, y) - 2.0 * h(y))));
    match spec.kind {
        SystemKind::OneBody => {
            checks.push(row("{p_θ, H} = 0", max_residual(&states, spec, |y| poisson_bracket(p_theta, h, y))));
        }
        SystemKind::TwoBody => {
            let i = |k: usize| move |v: &[f64]| two_body_integrals(v)[k];
            let rel = |y: &[f64]| two_body_integrals(y);
            checks.push(row("{I₁, I₂} = I₃", max_residual(&states, spec, |y| poisson_bracket(i(0), i(1), y) - rel(y)[2])));
            checks.push(row("{I₁, I₄} = I₂", max_residual(&states, spec, |y| poisson_bracket(i(0), i(3), y) - rel(y)[1])));
            checks.push(row("{I₂, I₄} = −I₁", max_residual(&states, spec, |y| poisson_bracket(i(1), i(3), y) + rel(y)[0])));
            for k in 0..4 {
                let name = format!("{{I{}, H}} = 0", k + 1);
                checks.push(row(&name, max_residual(&states, spec, |y| poisson_bracket(i(k), h, y))));
            }
        }
    }

    // An expanding orbit: H > 0 and J > 0 keep it away from collision.
    let y0 = random_state(spec, &mut rng, 0.5, p.scale, 0.5, Some(0.5))?;
    let cfg = IntegratorConfig { dense: true, ..IntegratorConfig::with_tol(1e-12, p.t_end) };
    let traj = integrate(spec, &PhaseState::from_slice(spec.kind, &y0)?, &cfg)?;
    let rep = monitor_conserved(spec, &traj)?;
    checks.push(Check::flag(format!("{label}: trajectory reached t_end"), traj.event.is_none()));
    let dj = rep.max_dj_residual.unwrap_or(f64::NAN);
    checks.push(Check::bound(format!("{label}: dJ/dt − 2H along a trajectory"), dj, tol.dj_residual));

    let ext = extended_poisson_build(spec)?;
    let dim = spec.kind.dim();
    let (mut rank_ok, mut casimir) = (true, 0.0f64);
    for y in &states {
        let x = ExtendedState::on_leaf(spec.kind, y).to_vec();
        rank_ok &= ext.poisson_rank(&x, 1e-10)? == dim;
        let dp = ext.casimir_gradient(&x);
        for k in 0..x.len() {
            let ek: Vec<f64> = (0..x.len()).map(|j| if j == k { 1.0 } else { 0.0 }).collect();
            casimir = casimir.max(ext.bracket(&x, &dp, &ek)?.abs());
        }
    }
    checks.push(Check::flag(format!("{label}: extended structure has rank {dim}"), rank_ok));
    checks.push(Check::bound(format!("{label}: Casimir brackets"), casimir, tol.casimir));
    Ok(checks)
}

pub fn run(ctx: &Ctx) -> Result<Outcome> {
    let systems = match &ctx.cfg.system {
        Some(_) => vec![ctx.cfg.system()?],
        None => vec![SystemSpec::kepler(1.0)?, SystemSpec::kepler_two_body(1.0, 1.0, 2.0)?],
    };
    let mut checks = Vec::new();
    for (k, spec) in systems.iter().enumerate() {
        let label = match spec.kind {
            SystemKind::OneBody => "one-body",
            SystemKind::TwoBody => "two-body",
        };
        checks.extend(suite(ctx, spec, k as u64, label)?);
    }
    let data = json!({ "systems": systems, "samples": ctx.cfg.verify.samples, "tolerances": ctx.cfg.tolerances });
    Ok(Outcome::new("verify", ctx.seed, checks, data))
}
