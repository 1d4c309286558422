//! Numerical integration of the one-body, two-body and extended systems.

mod dopri;
mod export;
mod extended;
mod monitor;
mod rhs;
mod trajectory;

pub use dopri::{dopri5, dopri5_projected, DenseSegment, IntegratorConfig, IntegratorStats, OdeSolution, StopReason};
pub use export::{state_labels, write_trajectory_csv};
pub use extended::{
    extended_poisson_build, integrate_extended, ExtendedOptions, ExtendedState, ExtendedSystem, ExtendedTrajectory,
    LEAF_START_TOL,
};
pub use monitor::{j_series, monitor_conserved, MonitorReport, J_CONSTANT_TOL, ZERO_ENERGY_TOL};
pub use rhs::{hamilton_rhs, hamilton_rhs_flat, rhs_jacobian};
pub use trajectory::{integrate, Trajectory, TrajectoryEvent};

use crate::heisenmodel::ModelError;

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid integrator configuration: {0}")]
    Config(String),
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64, last_state: Vec<f64> },
    #[error("branch point: ∂P/∂u = 0")]
    BranchPoint,
    #[error("initial point is off the leaf P = 0 (P = {casimir:e})")]
    OffLeaf { casimir: f64 },
    #[error("csv export failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
