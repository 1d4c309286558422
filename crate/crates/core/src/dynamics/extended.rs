//! Poisson extension of the algebraic Hamiltonian.
//!
//! `ρ` is replaced by a new variable `u` tied to the positions by the
//! minimal polynomial `P(u) = u² − R(q)`, `R = (X²+Y²)² + 16Z²`. On
//! `x = (q, p, u)` the rational Hamiltonian `K = T(q,p) + W(Z, u)` generates
//! `ẋ = J(x)∇K` with
//!
//! ```text
//!        ⎡  0    𝟙        0     ⎤
//! J(x) = ⎢ −𝟙    0    ∇_qP/∂ᵤP  ⎥
//!        ⎣  0  −∇_qPᵀ/∂ᵤP   0   ⎦
//! ```
//!
//! and `P` is a Casimir, so the physical leaf `u = ρ(q)` is invariant.

use serde::{Deserialize, Serialize};

use super::dopri::{dopri5_projected, IntegratorConfig, IntegratorStats, StopReason};
use super::trajectory::TrajectoryEvent;
use super::DynamicsError;
use crate::exactalg::ExactScalar;
use crate::heisenmodel::{kinetic_energy, kinetic_rhs, potential_argument, SystemKind, SystemSpec};

/// `|P(u(0))|` allowed at the start of an extended run.
pub const LEAF_START_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub u: f64,
}

impl ExtendedState {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.q.clone();
        v.extend(&self.p);
        v.push(self.u);
        v
    }

    pub fn from_slice(x: &[f64]) -> Self {
        let n = (x.len() - 1) / 2;
        ExtendedState { q: x[..n].to_vec(), p: x[n..2 * n].to_vec(), u: x[2 * n] }
    }

    /// Lift of a phase-space point onto the physical leaf `u = ρ(q)`.
    pub fn on_leaf(kind: SystemKind, y: &[f64]) -> Self {
        let n = y.len() / 2;
        let u = crate::heisenmodel::rho(&potential_argument(kind, &y[..n]));
        ExtendedState { q: y[..n].to_vec(), p: y[n..].to_vec(), u }
    }
}

/// The extended Poisson system of a [`SystemSpec`].
#[derive(Clone, Debug)]
pub struct ExtendedSystem {
    spec: SystemSpec,
    inv_mass: Vec<ExactScalar>,
}

/// `(J, K)` for the system: the structure matrix is evaluated by
/// [`ExtendedSystem::poisson_matrix`], the rational Hamiltonian by [`ExtendedSystem::k`].
pub fn extended_poisson_build(spec: &SystemSpec) -> Result<ExtendedSystem, DynamicsError> {
    let inv_mass = spec
        .masses()
        .iter()
        .map(|m| ExactScalar::from_f64(*m).and_then(|m| m.inv()))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| DynamicsError::Config("invalid masses".into()))?;
    Ok(ExtendedSystem { spec: spec.clone(), inv_mass })
}

impl ExtendedSystem {
    pub fn n(&self) -> usize {
        self.spec.kind.dim() / 2
    }

    pub fn dim(&self) -> usize {
        2 * self.n() + 1
    }

    fn check(&self, x: &[f64]) -> Result<(), DynamicsError> {
        if x.len() != self.dim() {
            return Err(DynamicsError::Config(format!("extended state has length {}, expected {}", x.len(), self.dim())));
        }
        Ok(())
    }

    /// Relative coordinates `(X, Y, Z)` and their Jacobian with respect to `q`.
    fn relative(&self, q: &[f64]) -> ([f64; 3], Vec<[f64; 3]>) {
        let g = potential_argument(self.spec.kind, q);
        let jac = match self.spec.kind {
            SystemKind::OneBody => vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            // Columns indexed by q; rows are d/dq_j of (X, Y, Z).
            SystemKind::TwoBody => vec![
                [-1.0, 0.0, -0.5 * q[4]],
                [0.0, -1.0, 0.5 * q[3]],
                [0.0, 0.0, -1.0],
                [1.0, 0.0, 0.5 * q[1]],
                [0.0, 1.0, -0.5 * q[0]],
                [0.0, 0.0, 1.0],
            ],
        };
        ([g.x, g.y, g.z], jac)
    }

    /// `R(q) = ρ²` and its gradient.
    fn r_and_grad(&self, q: &[f64]) -> (f64, Vec<f64>) {
        let ([x, y, z], jac) = self.relative(q);
        let s = x * x + y * y;
        let gr = [4.0 * s * x, 4.0 * s * y, 32.0 * z];
        let grad = jac.iter().map(|row| row[0] * gr[0] + row[1] * gr[1] + row[2] * gr[2]).collect();
        (s * s + 16.0 * z * z, grad)
    }

    /// The Casimir `P(x) = u² − R(q)`.
    pub fn casimir(&self, x: &[f64]) -> f64 {
        let n = self.n();
        x[2 * n] * x[2 * n] - self.r_and_grad(&x[..n]).0
    }

    pub fn casimir_gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let (_, gr) = self.r_and_grad(&x[..n]);
        let mut g: Vec<f64> = gr.iter().map(|v| -v).collect();
        g.extend(std::iter::repeat(0.0).take(n));
        g.push(2.0 * x[2 * n]);
        g
    }

    /// `K(q, p, u) = T(q, p) + W(Z, u)`.
    pub fn k(&self, x: &[f64]) -> Result<f64, DynamicsError> {
        self.check(x)?;
        let n = self.n();
        let ([_, _, z], _) = self.relative(&x[..n]);
        let w = self.spec.potential.jet(z, x[2 * n]).ok_or(crate::heisenmodel::ModelError::SingularPotential)?;
        Ok(kinetic_energy(&x[..2 * n], &self.spec.masses()) + w.w)
    }

    pub fn grad_k(&self, x: &[f64]) -> Result<Vec<f64>, DynamicsError> {
        self.check(x)?;
        let n = self.n();
        let ([_, _, z], jac) = self.relative(&x[..n]);
        let w = self.spec.potential.jet(z, x[2 * n]).ok_or(crate::heisenmodel::ModelError::SingularPotential)?;
        let kin = kinetic_rhs(&x[..2 * n], &self.inv_mass);
        let mut g = vec![0.0; 2 * n + 1];
        for j in 0..n {
            g[j] = -kin[n + j] + w.wz * jac[j][2];
            g[n + j] = kin[j];
        }
        g[2 * n] = w.wr;
        Ok(g)
    }

    /// The structure matrix `J(x)`; fails at branch points `∂ᵤP = 0`.
    pub fn poisson_matrix(&self, x: &[f64]) -> Result<Vec<Vec<f64>>, DynamicsError> {
        self.check(x)?;
        let n = self.n();
        let pu = 2.0 * x[2 * n];
        if pu == 0.0 {
            return Err(DynamicsError::BranchPoint);
        }
        let (_, gr) = self.r_and_grad(&x[..n]);
        let d = 2 * n + 1;
        let mut m = vec![vec![0.0; d]; d];
        for i in 0..n {
            m[i][n + i] = 1.0;
            m[n + i][i] = -1.0;
            let c = -gr[i] / pu;
            m[n + i][2 * n] = c;
            m[2 * n][n + i] = -c;
        }
        Ok(m)
    }

    /// Numerical rank of `J(x)` from its singular values, relative to the largest.
    pub fn poisson_rank(&self, x: &[f64], rel_tol: f64) -> Result<usize, DynamicsError> {
        let m = self.poisson_matrix(x)?;
        let d = m.len();
        let svd = nalgebra::DMatrix::from_fn(d, d, |i, j| m[i][j]).svd(false, false);
        let smax = svd.singular_values.max();
        Ok(svd.singular_values.iter().filter(|&&s| s > rel_tol * smax).count())
    }

    /// `ẋ = J(x)∇K(x)`.
    pub fn rhs(&self, x: &[f64]) -> Result<Vec<f64>, DynamicsError> {
        let m = self.poisson_matrix(x)?;
        let g = self.grad_k(x)?;
        Ok(m.iter().map(|row| row.iter().zip(&g).map(|(a, b)| a * b).sum()).collect())
    }

    /// `{f, g} = ∇fᵀ J ∇g` for given gradients.
    pub fn bracket(&self, x: &[f64], df: &[f64], dg: &[f64]) -> Result<f64, DynamicsError> {
        let m = self.poisson_matrix(x)?;
        Ok(m.iter().zip(df).map(|(row, a)| a * row.iter().zip(dg).map(|(b, c)| b * c).sum::<f64>()).sum())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedOptions {
    /// `|P|` beyond which the run stops with a leaf-departure event.
    pub leaf_tol: f64,
    /// Reset `u` to `√R(q)` after every step instead of only measuring drift.
    pub renormalize: bool,
}

impl Default for ExtendedOptions {
    fn default() -> Self {
        ExtendedOptions { leaf_tol: 1e-6, renormalize: false }
    }
}

#[derive(Clone, Debug)]
pub struct ExtendedTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub stats: IntegratorStats,
    pub max_casimir_drift: f64,
    pub event: Option<TrajectoryEvent>,
}

pub fn integrate_extended(
    sys: &ExtendedSystem,
    x0: &ExtendedState,
    cfg: &IntegratorConfig,
    opts: &ExtendedOptions,
) -> Result<ExtendedTrajectory, DynamicsError> {
    let x = x0.to_vec();
    sys.check(&x)?;
    let p0 = sys.casimir(&x);
    if p0.abs() > LEAF_START_TOL {
        return Err(DynamicsError::OffLeaf { casimir: p0 });
    }
    let n = sys.n();
    let sol = dopri5_projected(
        |_, x| sys.rhs(x).map_err(|e| e.to_string()),
        &x,
        cfg,
        |_, x| {
            let p = sys.casimir(x);
            (p.abs() > opts.leaf_tol).then(|| ("leaf departure".to_string(), p))
        },
        |x| {
            if opts.renormalize {
                x[2 * n] = sys.r_and_grad(&x[..n]).0.sqrt();
            }
            opts.renormalize
        },
    );
    let max_casimir_drift = sol.states.iter().map(|x| (sys.casimir(x) - p0).abs()).fold(0.0, f64::max);
    let event = sol.stop.map(|(t, reason)| TrajectoryEvent { t, reason, last_state: sol.states.last().unwrap().clone() });
    if let Some(TrajectoryEvent { t, reason: StopReason::StepUnderflow { h }, last_state }) = &event {
        return Err(DynamicsError::StepUnderflow { t: *t, h: *h, last_state: last_state.clone() });
    }
    Ok(ExtendedTrajectory { times: sol.times, states: sol.states, stats: sol.stats, max_casimir_drift, event })
}
