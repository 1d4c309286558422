//! Kinetic and potential parts of the Hamiltonian and their derivatives.
//!
//! Per body with inverse mass `μ`, `A = p_x − ½y p_z`, `B = p_y + ½x p_z`,
//! the kinetic energy is `μ(A² + B²)/2`. Flat states list all positions
//! followed by all momenta.

use std::ops::{Add, Mul, Neg, Sub};

use super::group::{rho_derivatives, GroupElement};
use super::system::{PhaseState, SystemKind, SystemSpec};
use super::ModelError;
use crate::exactalg::{ExactPoly, ExactScalar};

/// Minimal ring interface for the kinetic field, so the same formulas give
/// floating-point and exact polynomial Jacobians.
pub trait Ring:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// The constant `c` in the ring containing `self`.
    fn constant_like(&self, c: &ExactScalar) -> Self;
    fn scaled(&self, c: &ExactScalar) -> Self;
}

impl Ring for f64 {
    fn constant_like(&self, c: &ExactScalar) -> Self {
        c.to_complex().re
    }

    fn scaled(&self, c: &ExactScalar) -> Self {
        self * c.to_complex().re
    }
}

impl Ring for ExactPoly {
    fn constant_like(&self, c: &ExactScalar) -> Self {
        ExactPoly::constant(c.clone(), self.variable())
    }

    fn scaled(&self, c: &ExactScalar) -> Self {
        self.scale(c)
    }
}

/// Kinetic part of Hamilton's equations; `inv_mass[b]` is `1/m_b`.
pub fn kinetic_rhs<T: Ring>(y: &[T], inv_mass: &[ExactScalar]) -> Vec<T> {
    let n = 3 * inv_mass.len();
    let zero = y[0].constant_like(&ExactScalar::zero());
    let mut out = vec![zero; 2 * n];
    let h = ExactScalar::from_ratio(1, 2);
    for (b, mu) in inv_mass.iter().enumerate() {
        let (q, p) = (&y[3 * b..3 * b + 3], &y[n + 3 * b..n + 3 * b + 3]);
        let a = p[0].clone() - (q[1].clone() * p[2].clone()).scaled(&h);
        let bb = p[1].clone() + (q[0].clone() * p[2].clone()).scaled(&h);
        let hm = &h * mu;
        out[3 * b] = a.scaled(mu);
        out[3 * b + 1] = bb.scaled(mu);
        out[3 * b + 2] = (q[0].clone() * bb.clone() - q[1].clone() * a.clone()).scaled(&hm);
        out[n + 3 * b] = -(p[2].clone() * bb).scaled(&hm);
        out[n + 3 * b + 1] = (p[2].clone() * a).scaled(&hm);
    }
    out
}

/// Jacobian of [`kinetic_rhs`], as rows.
pub fn kinetic_jacobian<T: Ring>(y: &[T], inv_mass: &[ExactScalar]) -> Vec<Vec<T>> {
    let n = 3 * inv_mass.len();
    let zero = y[0].constant_like(&ExactScalar::zero());
    let one = y[0].constant_like(&ExactScalar::one());
    let mut jac = vec![vec![zero; 2 * n]; 2 * n];
    let h = ExactScalar::from_ratio(1, 2);
    let mut add = |r: usize, c: usize, v: T| {
        let cur = jac[r][c].clone();
        jac[r][c] = cur + v;
    };
    for (b, mu) in inv_mass.iter().enumerate() {
        let (qi, pi) = (3 * b, n + 3 * b);
        let (q, p) = (&y[qi..qi + 3], &y[pi..pi + 3]);
        let a = p[0].clone() - (q[1].clone() * p[2].clone()).scaled(&h);
        let bb = p[1].clone() + (q[0].clone() * p[2].clone()).scaled(&h);
        let da = [(qi + 1, -p[2].scaled(&h)), (pi, one.clone()), (pi + 2, -q[1].scaled(&h))];
        let db = [(qi, p[2].scaled(&h)), (pi + 1, one.clone()), (pi + 2, q[0].scaled(&h))];
        let hm = &h * mu;
        for (c, v) in &da {
            add(qi, *c, v.scaled(mu));
            add(qi + 2, *c, -(q[1].clone() * v.clone()).scaled(&hm));
            add(pi + 1, *c, (p[2].clone() * v.clone()).scaled(&hm));
        }
        for (c, v) in &db {
            add(qi + 1, *c, v.scaled(mu));
            add(qi + 2, *c, (q[0].clone() * v.clone()).scaled(&hm));
            add(pi, *c, -(p[2].clone() * v.clone()).scaled(&hm));
        }
        add(qi + 2, qi, bb.scaled(&hm));
        add(qi + 2, qi + 1, -a.scaled(&hm));
        add(pi, pi + 2, -bb.scaled(&hm));
        add(pi + 1, pi + 2, a.scaled(&hm));
    }
    jac
}

pub fn kinetic_energy(y: &[f64], masses: &[f64]) -> f64 {
    let n = 3 * masses.len();
    masses
        .iter()
        .enumerate()
        .map(|(b, m)| {
            let (q, p) = (&y[3 * b..3 * b + 3], &y[n + 3 * b..n + 3 * b + 3]);
            let a = p[0] - 0.5 * q[1] * p[2];
            let bb = p[1] + 0.5 * q[0] * p[2];
            0.5 * (a * a + bb * bb) / m
        })
        .sum()
}

/// The element whose `(z, ρ)` enters the potential: `q` itself for one body,
/// `g₁⁻¹·g₂` for two.
pub fn potential_argument(kind: SystemKind, q: &[f64]) -> GroupElement {
    match kind {
        SystemKind::OneBody => GroupElement::new(q[0], q[1], q[2]),
        SystemKind::TwoBody => GroupElement::new(
            q[3] - q[0],
            q[4] - q[1],
            q[5] - q[2] + 0.5 * (q[3] * q[1] - q[0] * q[4]),
        ),
    }
}

/// Value, gradient and (optionally) Hessian of the potential in the position
/// coordinates.
#[derive(Clone, Debug)]
pub struct PotentialDerivatives {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hessian: Option<Vec<Vec<f64>>>,
}

pub fn potential_derivatives(spec: &SystemSpec, q: &[f64], with_hessian: bool) -> Result<PotentialDerivatives, ModelError> {
    let g = potential_argument(spec.kind, q);
    let (r, rg, rh) = rho_derivatives(&g);
    if !(r > 0.0) {
        return Err(ModelError::Collision { rho: r });
    }
    let jet = spec.potential.jet(g.z, r).ok_or(ModelError::SingularPotential)?;
    // Derivatives with respect to the relative coordinates (X, Y, Z).
    let grad_rel = [jet.wr * rg[0], jet.wr * rg[1], jet.wz + jet.wr * rg[2]];
    // Jacobian of (X, Y, Z) with respect to q.
    let nq = q.len();
    let jr: Vec<Vec<f64>> = match spec.kind {
        SystemKind::OneBody => (0..3).map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect(),
        SystemKind::TwoBody => vec![
            vec![-1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0, 0.0, 1.0, 0.0],
            vec![-0.5 * q[4], 0.5 * q[3], -1.0, 0.5 * q[1], -0.5 * q[0], 1.0],
        ],
    };
    let grad: Vec<f64> = (0..nq).map(|j| (0..3).map(|i| jr[i][j] * grad_rel[i]).sum()).collect();
    let hessian = with_hessian.then(|| {
        let mut hr = [[0.0; 3]; 3];
        let zs = [0.0, 0.0, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                hr[i][j] = jet.wr * rh[i][j]
                    + jet.wrr * rg[i] * rg[j]
                    + jet.wzr * (zs[i] * rg[j] + rg[i] * zs[j])
                    + jet.wzz * zs[i] * zs[j];
            }
        }
        let mut h = vec![vec![0.0; nq]; nq];
        for a in 0..nq {
            for b in 0..nq {
                h[a][b] = (0..3).map(|i| (0..3).map(|j| jr[i][a] * hr[i][j] * jr[j][b]).sum::<f64>()).sum();
            }
        }
        if spec.kind == SystemKind::TwoBody {
            // Z contains ½(x₂y₁ − x₁y₂).
            let gz = grad_rel[2];
            h[0][4] -= 0.5 * gz;
            h[4][0] -= 0.5 * gz;
            h[1][3] += 0.5 * gz;
            h[3][1] += 0.5 * gz;
        }
        h
    });
    Ok(PotentialDerivatives { value: jet.w, grad, hessian })
}

pub fn hamiltonian_flat(spec: &SystemSpec, y: &[f64]) -> Result<f64, ModelError> {
    if y.len() != spec.kind.dim() {
        return Err(ModelError::Dimension { expected: spec.kind.dim(), found: y.len() });
    }
    let n = y.len() / 2;
    let g = potential_argument(spec.kind, &y[..n]);
    let r = super::group::rho(&g);
    if !(r > 0.0) {
        return Err(ModelError::Collision { rho: r });
    }
    let v = spec.potential.jet(g.z, r).ok_or(ModelError::SingularPotential)?.w;
    Ok(kinetic_energy(y, &spec.masses()) + v)
}

/// Kinetic plus potential energy.
pub fn hamiltonian(spec: &SystemSpec, s: &PhaseState) -> Result<f64, ModelError> {
    if s.kind() != spec.kind {
        return Err(ModelError::Dimension { expected: spec.kind.dim(), found: s.kind().dim() });
    }
    hamiltonian_flat(spec, &s.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenmodel::PhaseState1B;

    fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, y: &[f64]) -> Vec<Vec<f64>> {
        let h = 1e-6;
        let m = f(y).len();
        let mut jac = vec![vec![0.0; y.len()]; m];
        for j in 0..y.len() {
            let mut yp = y.to_vec();
            let mut ym = y.to_vec();
            yp[j] += h;
            ym[j] -= h;
            let (fp, fm) = (f(&yp), f(&ym));
            for i in 0..m {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        jac
    }

    #[test]
    fn kinetic_jacobian_matches_finite_differences() {
        let inv = [ExactScalar::from_ratio(1, 2), ExactScalar::from_ratio(4, 3)];
        let y: Vec<f64> = (0..12).map(|k| ((k * 7 % 11) as f64 - 5.0) / 3.0).collect();
        let jac = kinetic_jacobian(&y, &inv);
        let fd = fd_jacobian(|v| kinetic_rhs(v, &inv), &y);
        for i in 0..12 {
            for j in 0..12 {
                assert!((jac[i][j] - fd[i][j]).abs() < 1e-7, "({i},{j}) {} vs {}", jac[i][j], fd[i][j]);
            }
        }
    }

    #[test]
    fn potential_hessian_matches_finite_differences() {
        for spec in [SystemSpec::kepler(1.3).unwrap(), SystemSpec::kepler_two_body(0.7, 1.5, 0.5).unwrap()] {
            let nq = spec.kind.dim() / 2;
            let q: Vec<f64> = (0..nq).map(|k| 0.3 + 0.4 * k as f64 - 0.17 * (k * k) as f64).collect();
            let d = potential_derivatives(&spec, &q, true).unwrap();
            let fd = fd_jacobian(|v| potential_derivatives(&spec, v, false).unwrap().grad, &q);
            let h = d.hessian.unwrap();
            for i in 0..nq {
                for j in 0..nq {
                    assert!((h[i][j] - fd[i][j]).abs() < 1e-6 * (1.0 + h[i][j].abs()));
                }
            }
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let spec = SystemSpec::kepler(2.0).unwrap();
        let s = PhaseState1B { z: -0.5, pz: 3.0, ..Default::default() };
        assert_eq!(hamiltonian(&spec, &s.into()).unwrap(), -2.0 / 2.0);
        let free = PhaseState1B { x: 1e3, px: 1.0, ..Default::default() };
        let tiny = SystemSpec::kepler(1e-300).unwrap();
        assert!((hamiltonian(&tiny, &free.into()).unwrap() - 0.5).abs() < 1e-15);
        let origin = PhaseState1B::default();
        assert!(matches!(hamiltonian(&spec, &origin.into()), Err(ModelError::Collision { .. })));
    }
}
