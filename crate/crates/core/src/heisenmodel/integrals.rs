//! First integrals and the canonical Poisson bracket.

use serde::{Deserialize, Serialize};

use super::hamiltonian::hamiltonian_flat;
use super::system::{PhaseState, SystemKind, SystemSpec};
use super::ModelError;

/// Values of the known first integrals. `J` is conserved only on `H = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstIntegrals {
    pub h: f64,
    pub j: f64,
    /// One body: `p_θ = x p_y − y p_x`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_theta: Option<f64>,
    /// Two bodies: `I₁, I₂, I₃, I₄`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<[f64; 4]>,
}

/// `J = Σ (x p_x + y p_y + 2z p_z)` over bodies.
pub fn dilation_j(y: &[f64]) -> f64 {
    let n = y.len() / 2;
    (0..n / 3)
        .map(|b| {
            let (q, p) = (&y[3 * b..3 * b + 3], &y[n + 3 * b..n + 3 * b + 3]);
            q[0] * p[0] + q[1] * p[1] + 2.0 * q[2] * p[2]
        })
        .sum()
}

pub fn p_theta(y: &[f64]) -> f64 {
    y[0] * y[4] - y[1] * y[3]
}

/// `I₁..I₄` for the flat two-body state.
pub fn two_body_integrals(y: &[f64]) -> [f64; 4] {
    let [x1, y1, _z1, x2, y2, _z2, px1, py1, pz1, px2, py2, pz2] = y.try_into().expect("two-body state");
    [
        px1 + 0.5 * y1 * pz1 + px2 + 0.5 * y2 * pz2,
        py1 - 0.5 * x1 * pz1 + py2 - 0.5 * x2 * pz2,
        pz1 + pz2,
        y1 * px1 - x1 * py1 + y2 * px2 - x2 * py2,
    ]
}

pub fn first_integrals_flat(spec: &SystemSpec, y: &[f64]) -> Result<FirstIntegrals, ModelError> {
    let h = hamiltonian_flat(spec, y)?;
    let j = dilation_j(y);
    Ok(match spec.kind {
        SystemKind::OneBody => FirstIntegrals { h, j, p_theta: Some(p_theta(y)), i: None },
        SystemKind::TwoBody => FirstIntegrals { h, j, p_theta: None, i: Some(two_body_integrals(y)) },
    })
}

pub fn first_integrals(spec: &SystemSpec, s: &PhaseState) -> Result<FirstIntegrals, ModelError> {
    first_integrals_flat(spec, &s.to_vec())
}

/// Gradient by central differences with step `ε^{1/3}·max(1, |yᵢ|)`.
pub fn numeric_gradient(f: impl Fn(&[f64]) -> f64, y: &[f64]) -> Vec<f64> {
    let base = f64::EPSILON.cbrt();
    let mut v = y.to_vec();
    (0..y.len())
        .map(|i| {
            let h = base * y[i].abs().max(1.0);
            v[i] = y[i] + h;
            let fp = f(&v);
            v[i] = y[i] - h;
            let fm = f(&v);
            v[i] = y[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Canonical bracket `{f, g} = Σ ∂f/∂qᵢ ∂g/∂pᵢ − ∂f/∂pᵢ ∂g/∂qᵢ` on a flat state.
pub fn poisson_bracket(f: impl Fn(&[f64]) -> f64, g: impl Fn(&[f64]) -> f64, y: &[f64]) -> f64 {
    let n = y.len() / 2;
    let df = numeric_gradient(f, y);
    let dg = numeric_gradient(g, y);
    (0..n).map(|i| df[i] * dg[n + i] - df[n + i] * dg[i]).sum()
}
