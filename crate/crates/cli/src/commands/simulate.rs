//! A single trajectory with its conserved-quantity report.

use anyhow::{bail, Result};
use heisenkep::dynamics::{integrate, monitor_conserved, state_labels, Trajectory};
use heisenkep::heisenmodel::{first_integrals_flat, particular_solution, PhaseState, SystemKind, SystemSpec};
use serde_json::json;

use super::Ctx;
use crate::config::{random_state, seeded_rng, Initial};
use crate::output::{Check, Outcome, Table};

pub fn initial_state(ctx: &Ctx, spec: &SystemSpec) -> Result<Vec<f64>> {
    match &ctx.cfg.initial {
        None => bail!("the config has no \"initial\" state"),
        Some(Initial::State(y)) => Ok(PhaseState::from_slice(spec.kind, y)?.to_vec()),
        Some(Initial::Random { energy, scale, rho_min, j_min }) => {
            random_state(spec, &mut seeded_rng(ctx.seed, 0), *energy, *scale, *rho_min, *j_min)
        }
        Some(Initial::Particular(p)) => Ok(particular_solution(spec, *p, ctx.cfg.integrator.t_start)?.to_vec()),
    }
}

/// Maximum distance of `(x, y)` from the line through the origin spanned by
/// the initial position (or momentum), plus `|z|`; `None` off the invariant
/// submanifold `z = p_z = p_θ = 0`.
fn straight_line_deviation(traj: &Trajectory) -> Option<f64> {
    let y0 = &traj.states[0];
    let (x, y, z, px, py, pz) = (y0[0], y0[1], y0[2], y0[3], y0[4], y0[5]);
    let scale = 1.0 + x.hypot(y) * px.hypot(py);
    if traj.kind != SystemKind::OneBody || z != 0.0 || pz != 0.0 || (x * py - y * px).abs() > 1e-14 * scale {
        return None;
    }
    let (dx, dy) = if x.hypot(y) > 0.0 { (x, y) } else { (px, py) };
    let norm = dx.hypot(dy);
    if norm == 0.0 {
        return None;
    }
    Some(traj.states.iter().map(|s| (s[0] * dy - s[1] * dx).abs() / norm + s[2].abs()).fold(0.0, f64::max))
}

fn trajectory_table(spec: &SystemSpec, traj: &Trajectory, seed: u64) -> Result<Table> {
    let mut columns: Vec<String> = std::iter::once("t").chain(state_labels(traj.kind)).map(String::from).collect();
    columns.push("H".into());
    match traj.kind {
        SystemKind::OneBody => columns.push("p_theta".into()),
        SystemKind::TwoBody => columns.extend(["I1", "I2", "I3", "I4"].map(String::from)),
    }
    columns.push("J".into());
    let mut rows = Vec::with_capacity(traj.times.len());
    for (t, y) in traj.times.iter().zip(&traj.states) {
        let fi = first_integrals_flat(spec, y)?;
        let mut row = vec![*t];
        row.extend(y);
        row.push(fi.h);
        row.extend(fi.p_theta);
        row.extend(fi.i.into_iter().flatten());
        row.push(fi.j);
        rows.push(row);
    }
    Ok(Table { name: "trajectory", seed, columns, rows })
}

pub fn run(ctx: &Ctx) -> Result<Outcome> {
    let spec = ctx.cfg.system()?;
    let y0 = initial_state(ctx, &spec)?;
    let mut cfg = ctx.cfg.integrator;
    cfg.dense = true;
    let traj = integrate(&spec, &PhaseState::from_slice(spec.kind, &y0)?, &cfg)?;
    let report = monitor_conserved(&spec, &traj)?;
    let tol = &ctx.cfg.tolerances;

    let mut checks = vec![Check::flag("reached_t_end", traj.event.is_none())];
    if let Some(e) = &traj.event {
        let last = checks.last_mut().expect("just pushed");
        last.detail = Some(format!("stopped at t = {}: {:?}", e.t, e.reason));
    }
    checks.push(Check::bound("energy_drift", report.max_h_drift, tol.h_drift));
    if let Some(d) = report.max_p_theta_drift {
        checks.push(Check::bound("p_theta_drift", d, tol.integral_drift));
    }
    if let Some(d) = report.max_i_drift {
        checks.push(Check::bound("integrals_drift", d.into_iter().fold(0.0, f64::max), tol.integral_drift));
    }
    if let Some(r) = report.max_dj_residual {
        checks.push(Check::bound("dj_dt_minus_2h", r, tol.dj_residual));
    }
    if report.zero_energy {
        checks.push(Check::bound("j_constant_at_zero_energy", report.max_j_drift, tol.j_drift));
    }
    if let Some(d) = straight_line_deviation(&traj) {
        checks.push(Check::bound("straight_line", d, tol.straight_line));
    }

    let data = json!({
        "system": spec,
        "integrator": cfg,
        "initial_state": y0,
        "monitor": report,
        "stats": traj.stats,
        "event": traj.event,
        "final_state": traj.last(),
    });
    let mut out = Outcome::new("simulate", ctx.seed, checks, data);
    out.tables.push(trajectory_table(&spec, &traj, ctx.seed)?);
    Ok(out)
}
