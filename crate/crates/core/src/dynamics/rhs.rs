//! Hamilton's equations of the one- and two-body systems.

use crate::exactalg::ExactScalar;
use crate::heisenmodel::{kinetic_jacobian, kinetic_rhs, potential_derivatives, ModelError, PhaseState, SystemSpec};

fn inverse_masses(spec: &SystemSpec) -> Result<Vec<ExactScalar>, ModelError> {
    spec.masses()
        .iter()
        .map(|m| {
            ExactScalar::from_f64(*m)
                .and_then(|m| m.inv())
                .ok_or_else(|| ModelError::InvalidSpec(format!("bad mass {m}")))
        })
        .collect()
}

/// `(∂H/∂p, −∂H/∂q)` on a flat state.
pub fn hamilton_rhs_flat(spec: &SystemSpec, y: &[f64]) -> Result<Vec<f64>, ModelError> {
    if y.len() != spec.kind.dim() {
        return Err(ModelError::Dimension { expected: spec.kind.dim(), found: y.len() });
    }
    let n = y.len() / 2;
    let mut out = kinetic_rhs(y, &inverse_masses(spec)?);
    let pd = potential_derivatives(spec, &y[..n], false)?;
    for (o, g) in out[n..].iter_mut().zip(&pd.grad) {
        *o -= g;
    }
    Ok(out)
}

/// The vector field at `s`, returned as a tangent vector in state form.
pub fn hamilton_rhs(spec: &SystemSpec, s: &PhaseState) -> Result<PhaseState, ModelError> {
    PhaseState::from_slice(spec.kind, &hamilton_rhs_flat(spec, &s.to_vec())?)
}

/// Jacobian of [`hamilton_rhs_flat`].
pub fn rhs_jacobian(spec: &SystemSpec, y: &[f64]) -> Result<Vec<Vec<f64>>, ModelError> {
    let n = y.len() / 2;
    let mut jac = kinetic_jacobian(y, &inverse_masses(spec)?);
    let hess = potential_derivatives(spec, &y[..n], true)?.hessian.expect("requested");
    for i in 0..n {
        for j in 0..n {
            jac[n + i][j] -= hess[i][j];
        }
    }
    Ok(jac)
}
