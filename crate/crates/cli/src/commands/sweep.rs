//! Independent trajectories over a grid of energies, run concurrently.

use anyhow::{Context, Result};
use heisenkep::dynamics::{integrate, monitor_conserved, IntegratorConfig};
use heisenkep::heisenmodel::{PhaseState, SystemSpec};
use rayon::prelude::*;
use serde_json::json;

use super::Ctx;
use crate::config::{random_state, seeded_rng};
use crate::output::{Check, Outcome, Table};

/// Upper bound on the worker threads of a sweep.
pub const THREADS_ENV: &str = "HEISENKEP_THREADS";

struct Row {
    energy: f64,
    h0: f64,
    h_drift: f64,
    j_drift: f64,
    integral_drift: f64,
    t_final: f64,
    stopped: bool,
}

fn one_run(spec: &SystemSpec, cfg: &IntegratorConfig, ctx: &Ctx, index: usize, energy: f64) -> Result<Row> {
    let p = &ctx.cfg.sweep;
    let y0 = random_state(spec, &mut seeded_rng(ctx.seed, index as u64), energy, p.scale, p.rho_min, None)?;
    let traj = integrate(spec, &PhaseState::from_slice(spec.kind, &y0)?, cfg)?;
    let rep = monitor_conserved(spec, &traj)?;
    let integral_drift = rep.max_p_theta_drift.into_iter().chain(rep.max_i_drift.into_iter().flatten()).fold(0.0, f64::max);
    Ok(Row {
        energy,
        h0: rep.h0,
        h_drift: rep.max_h_drift,
        j_drift: rep.max_j_drift,
        integral_drift,
        t_final: *traj.times.last().expect("trajectories hold the initial state"),
        stopped: traj.event.is_some(),
    })
}

fn pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().with_context(|| format!("{THREADS_ENV}={v:?} is not a thread count"))?;
        b = b.num_threads(n.max(1));
    }
    Ok(b.build()?)
}

pub fn run(ctx: &Ctx) -> Result<Outcome> {
    let spec = ctx.cfg.system()?;
    let p = &ctx.cfg.sweep;
    let cfg = ctx.cfg.integrator;
    let jobs: Vec<(usize, f64)> =
        p.energies.iter().flat_map(|&e| std::iter::repeat(e).take(p.samples)).enumerate().collect();
    let rows = pool()?.install(|| {
        jobs.par_iter().map(|&(k, e)| one_run(&spec, &cfg, ctx, k, e)).collect::<Result<Vec<Row>>>()
    })?;

    let tol = &ctx.cfg.tolerances;
    let finished = rows.iter().filter(|r| !r.stopped);
    let h_drift = finished.clone().map(|r| r.h_drift).fold(0.0, f64::max);
    let integral_drift = finished.map(|r| r.integral_drift).fold(0.0, f64::max);
    let stopped = rows.iter().filter(|r| r.stopped).count();
    let mut checks = vec![
        Check::bound("energy_drift", h_drift, tol.h_drift),
        Check::bound("integrals_drift", integral_drift, tol.integral_drift),
    ];
    if p.fail_on_event {
        checks.push(Check::flag("no_events", stopped == 0).with_detail(format!("{stopped} runs stopped early")));
    }

    let columns = ["run", "energy", "h0", "max_h_drift", "max_j_drift", "max_integral_drift", "t_final", "stopped"];
    let table_rows = rows
        .iter()
        .enumerate()
        .map(|(k, r)| {
            vec![k as f64, r.energy, r.h0, r.h_drift, r.j_drift, r.integral_drift, r.t_final, f64::from(u8::from(r.stopped))]
        })
        .collect();
    let data = json!({
        "system": spec,
        "integrator": cfg,
        "sweep": p,
        "runs": rows.len(),
        "stopped": stopped,
    });
    let mut out = Outcome::new("sweep", ctx.seed, checks, data);
    out.tables.push(Table { name: "sweep", seed: ctx.seed, columns: columns.map(String::from).to_vec(), rows: table_rows });
    Ok(out)
}
