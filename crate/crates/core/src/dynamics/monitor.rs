//! Conserved-quantity monitoring along trajectories.

use serde::{Deserialize, Serialize};

use super::trajectory::Trajectory;
use super::DynamicsError;
use crate::heisenmodel::{dilation_j, first_integrals_flat, hamiltonian_flat, SystemSpec};

/// Energy level treated as `H = 0` for the `J`-constancy report.
pub const ZERO_ENERGY_TOL: f64 = 1e-9;
/// `J` counts as constant when its drift stays below this.
pub const J_CONSTANT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub samples: usize,
    pub h0: f64,
    pub max_h_drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_p_theta_drift: Option<f64>,
    /// Drifts of `I₁..I₄`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_i_drift: Option<[f64; 4]>,
    pub max_j_drift: f64,
    /// `max |dJ/dt − 2H|` from the derivative of the dense output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_dj_residual: Option<f64>,
    pub zero_energy: bool,
    /// On `H = 0`: whether `J` stayed constant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_constant: Option<bool>,
}

/// Gradient of `J` contracted with a tangent vector.
fn j_dot(y: &[f64], ydot: &[f64]) -> f64 {
    let n = y.len() / 2;
    (0..n)
        .map(|i| {
            let w = if i % 3 == 2 { 2.0 } else { 1.0 };
            w * (ydot[i] * y[n + i] + y[i] * ydot[n + i])
        })
        .sum()
}

pub fn monitor_conserved(spec: &SystemSpec, traj: &Trajectory) -> Result<MonitorReport, DynamicsError> {
    let y0 = &traj.states[0];
    let fi0 = first_integrals_flat(spec, y0)?;
    let mut rep = MonitorReport {
        samples: traj.states.len(),
        h0: fi0.h,
        max_h_drift: 0.0,
        max_p_theta_drift: fi0.p_theta.map(|_| 0.0),
        max_i_drift: fi0.i.map(|_| [0.0; 4]),
        max_j_drift: 0.0,
        max_dj_residual: None,
        zero_energy: fi0.h.abs() <= ZERO_ENERGY_TOL,
        j_constant: None,
    };
    for y in &traj.states {
        let fi = first_integrals_flat(spec, y)?;
        rep.max_h_drift = rep.max_h_drift.max((fi.h - fi0.h).abs());
        rep.max_j_drift = rep.max_j_drift.max((fi.j - fi0.j).abs());
        if let (Some(d), Some(p), Some(p0)) = (rep.max_p_theta_drift.as_mut(), fi.p_theta, fi0.p_theta) {
            *d = d.max((p - p0).abs());
        }
        if let (Some(d), Some(i), Some(i0)) = (rep.max_i_drift.as_mut(), fi.i, fi0.i) {
            for k in 0..4 {
                d[k] = d[k].max((i[k] - i0[k]).abs());
            }
        }
    }
    if !traj.dense.is_empty() {
        let mut worst: f64 = 0.0;
        for seg in &traj.dense {
            for theta in [0.0, 0.5, 1.0] {
                let t = seg.t0 + theta * seg.h;
                let y = seg.eval(t);
                let ydot = seg.eval_derivative(t);
                let h = hamiltonian_flat(spec, &y)?;
                worst = worst.max((j_dot(&y, &ydot) - 2.0 * h).abs());
            }
        }
        rep.max_dj_residual = Some(worst);
    }
    if rep.zero_energy {
        rep.j_constant = Some(rep.max_j_drift < J_CONSTANT_TOL);
    }
    Ok(rep)
}

/// `J` along the stored samples.
pub fn j_series(traj: &Trajectory) -> Vec<f64> {
    traj.states.iter().map(|y| dilation_j(y)).collect()
}
