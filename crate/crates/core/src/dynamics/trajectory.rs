//! Trajectories of the one- and two-body systems.

use serde::{Deserialize, Serialize};

use super::dopri::{dopri5, DenseSegment, IntegratorConfig, IntegratorStats, StopReason};
use super::rhs::hamilton_rhs_flat;
use super::DynamicsError;
use crate::heisenmodel::{potential_argument, rho, PhaseState, SystemKind, SystemSpec};

/// Terminal event of a run that did not reach `t_end`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEvent {
    pub t: f64,
    pub reason: StopReason,
    pub last_state: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub kind: SystemKind,
    pub times: Vec<f64>,
    /// Flat states: positions then momenta.
    pub states: Vec<Vec<f64>>,
    pub stats: IntegratorStats,
    pub dense: Vec<DenseSegment>,
    pub event: Option<TrajectoryEvent>,
}

impl Trajectory {
    pub fn state(&self, i: usize) -> PhaseState {
        PhaseState::from_slice(self.kind, &self.states[i]).expect("dimension fixed by kind")
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectories hold the initial state")
    }

    fn segment(&self, t: f64) -> Option<&DenseSegment> {
        let idx = self.dense.partition_point(|s| {
            let end = s.t0 + s.h;
            if s.h > 0.0 {
                end < t
            } else {
                end > t
            }
        });
        self.dense.get(idx).filter(|s| s.contains(t))
    }

    /// State from the dense interpolant; `None` outside the run or without dense output.
    pub fn interpolate(&self, t: f64) -> Option<Vec<f64>> {
        self.segment(t).map(|s| s.eval(t))
    }

    /// Time derivative of the dense interpolant.
    pub fn interpolate_derivative(&self, t: f64) -> Option<Vec<f64>> {
        self.segment(t).map(|s| s.eval_derivative(t))
    }
}

/// Adaptive DOPRI5 integration with a collision guard `ρ < cfg.rho_min`.
///
/// A guard hit ends the run early and is recorded in `event`; step-size
/// underflow (typically a near-collision) is an error carrying the last good state.
pub fn integrate(spec: &SystemSpec, s0: &PhaseState, cfg: &IntegratorConfig) -> Result<Trajectory, DynamicsError> {
    if s0.kind() != spec.kind {
        return Err(DynamicsError::Model(crate::heisenmodel::ModelError::Dimension {
            expected: spec.kind.dim(),
            found: s0.kind().dim(),
        }));
    }
    if !(cfg.abs_tol > 0.0 && cfg.rel_tol > 0.0) {
        return Err(DynamicsError::Config("tolerances must be positive".into()));
    }
    let y0 = s0.to_vec();
    let n = y0.len() / 2;
    let r0 = rho(&potential_argument(spec.kind, &y0[..n]));
    if !(r0 > cfg.rho_min) {
        return Err(DynamicsError::Model(crate::heisenmodel::ModelError::Collision { rho: r0 }));
    }
    let sol = dopri5(
        |_, y| hamilton_rhs_flat(spec, y).map_err(|e| e.to_string()),
        &y0,
        cfg,
        |_, y| {
            let r = rho(&potential_argument(spec.kind, &y[..n]));
            (r < cfg.rho_min).then(|| ("collision".to_string(), r))
        },
    );
    let event = sol.stop.map(|(t, reason)| TrajectoryEvent {
        t,
        reason,
        last_state: sol.states.last().expect("nonempty").clone(),
    });
    if let Some(TrajectoryEvent { t, reason: StopReason::StepUnderflow { h }, last_state }) = &event {
        return Err(DynamicsError::StepUnderflow { t: *t, h: *h, last_state: last_state.clone() });
    }
    Ok(Trajectory {
        kind: spec.kind,
        times: sol.times,
        states: sol.states,
        stats: sol.stats,
        dense: sol.dense,
        event,
    })
}
