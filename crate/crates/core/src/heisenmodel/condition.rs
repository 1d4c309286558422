//! The coefficient `a` of the vertical particular solutions.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::system::{exact, PhaseState, PhaseState1B, PhaseState2B, SystemKind, SystemSpec};
use super::ModelError;
use super::GroupElement;
use crate::exactalg::ExactScalar;

fn sign(c: &ExactScalar) -> Result<ExactScalar, ModelError> {
    if c.is_zero() {
        return Err(ModelError::ZeroParameter);
    }
    if !c.is_real() {
        return Err(ModelError::InvalidSpec("the axis parameter must be real".into()));
    }
    Ok(if c.re() > &num_rational::BigRational::zero() { ExactScalar::one() } else { ExactScalar::from_i64(-1) })
}

/// Exact `a` for the solution on the vertical axis.
///
/// One body: `c` is the height and `a = ½[W_z + 4 sgn(c) W_ρ]` at `(c, 4|c|)`,
/// so that `p_z = −2at`. Two bodies: `c` is `w₂ = z₁ − z₂`; the relative
/// height is `−w₂` and `a = ½[4 sgn(w₂) W_ρ − W_z]` at `(−w₂, 4|w₂|)`, so
/// that `p_{w₂} = −2at`.
pub fn condition_coefficient_a_exact(spec: &SystemSpec, c: &ExactScalar) -> Result<ExactScalar, ModelError> {
    let s = sign(c)?;
    let rho = &(&s * c) * &ExactScalar::from_i64(4);
    let four_s = &s * &ExactScalar::from_i64(4);
    let half = ExactScalar::from_ratio(1, 2);
    match spec.kind {
        SystemKind::OneBody => {
            let j = spec.potential.jet_exact(c, &rho).ok_or(ModelError::SingularPotential)?;
            Ok(&half * &(&j.wz + &(&four_s * &j.wr)))
        }
        SystemKind::TwoBody => {
            let j = spec.potential.jet_exact(&-c.clone(), &rho).ok_or(ModelError::SingularPotential)?;
            Ok(&half * &(&(&four_s * &j.wr) - &j.wz))
        }
    }
}

pub fn condition_coefficient_a(spec: &SystemSpec, c: f64) -> Result<f64, ModelError> {
    Ok(condition_coefficient_a_exact(spec, &exact(c)?)?.to_complex().re)
}

/// Parameters of the vertical particular solutions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ParticularParams {
    #[serde(rename = "one-body")]
    OneBody { c: f64 },
    #[serde(rename = "two-body")]
    TwoBody { w1: f64, w2: f64, pw1: f64 },
}

/// The particular solution at time `t` in the original canonical coordinates.
///
/// One body: `(0, 0, c, 0, 0, −2at)`. Two bodies: `w₁, w₂, p_{w₁}` constant,
/// `p_{w₂} = −2at`, with `z₁ = (w₁+w₂)/2`, `z₂ = (w₁−w₂)/2`,
/// `p_{z₁} = p_{w₁}+p_{w₂}`, `p_{z₂} = p_{w₁}−p_{w₂}` and all else zero.
pub fn particular_solution(spec: &SystemSpec, params: ParticularParams, t: f64) -> Result<PhaseState, ModelError> {
    match (spec.kind, params) {
        (SystemKind::OneBody, ParticularParams::OneBody { c }) => {
            let a = condition_coefficient_a(spec, c)?;
            Ok(PhaseState1B { z: c, pz: -2.0 * a * t, ..Default::default() }.into())
        }
        (SystemKind::TwoBody, ParticularParams::TwoBody { w1, w2, pw1 }) => {
            let a = condition_coefficient_a(spec, w2)?;
            let pw2 = -2.0 * a * t;
            Ok(PhaseState2B {
                g1: GroupElement::new(0.0, 0.0, 0.5 * (w1 + w2)),
                g2: GroupElement::new(0.0, 0.0, 0.5 * (w1 - w2)),
                p1: [0.0, 0.0, pw1 + pw2],
                p2: [0.0, 0.0, pw1 - pw2],
            }
            .into())
        }
        _ => Err(ModelError::InvalidSpec("particular-solution parameters do not match the system kind".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenmodel::{BiPoly, PotentialSpec};

    #[test]
    fn kepler_coefficient() {
        let spec = SystemSpec::kepler(3.0).unwrap();
        let a = condition_coefficient_a_exact(&spec, &ExactScalar::from_ratio(1, 2)).unwrap();
        assert_eq!(a, ExactScalar::from_ratio(3, 2));
        let a = condition_coefficient_a_exact(&spec, &ExactScalar::from_ratio(-1, 2)).unwrap();
        assert_eq!(a, ExactScalar::from_ratio(-3, 2));
    }

    #[test]
    fn linear_potential() {
        let w = PotentialSpec::new(
            BiPoly::from_terms([(0, 1, ExactScalar::one())]),
            BiPoly::from_terms([(0, 0, ExactScalar::one())]),
        )
        .unwrap();
        let spec = SystemSpec::new(SystemKind::OneBody, 1.0, 1.0, 1.0, w).unwrap();
        assert_eq!(condition_coefficient_a(&spec, 0.3).unwrap(), 2.0);
        assert_eq!(condition_coefficient_a(&spec, -0.3).unwrap(), -2.0);
    }

    #[test]
    fn two_body_coefficient() {
        let spec = SystemSpec::kepler_two_body(1.0, 2.0, 3.0).unwrap();
        for w2 in [0.25, -0.25] {
            let a = condition_coefficient_a(&spec, w2).unwrap();
            assert!((a - 6.0 / (8.0 * w2 * w2.abs())).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_parameter_rejected() {
        let spec = SystemSpec::kepler(1.0).unwrap();
        assert!(matches!(condition_coefficient_a(&spec, 0.0), Err(ModelError::ZeroParameter)));
        assert!(particular_solution(&spec, ParticularParams::OneBody { c: 0.0 }, 1.0).is_err());
    }
}
