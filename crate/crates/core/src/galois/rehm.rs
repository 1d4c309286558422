//! Rehm's criterion for `w'' − (α²z² + 2αβz + γ)w = 0`.

use serde::{Deserialize, Serialize};

use super::{Evidence, GaloisError, GaloisVerdict, VerdictTag};
use crate::exactalg::ExactScalar;
use crate::variational::ScalarODE;

/// Parameters of the parabolic cylinder equation, kept through `α²` and
/// `αβ` so that `α` need not have an exact square root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicParams {
    pub alpha_sq: ExactScalar,
    pub alpha_beta: ExactScalar,
    pub gamma: ExactScalar,
}

impl ParabolicParams {
    pub fn new(alpha: &ExactScalar, beta: &ExactScalar, gamma: &ExactScalar) -> Result<Self, GaloisError> {
        if alpha.is_zero() {
            return Err(GaloisError::InvalidParameter("α must be nonzero".into()));
        }
        Ok(ParabolicParams { alpha_sq: alpha * alpha, alpha_beta: alpha * beta, gamma: gamma.clone() })
    }

    /// `α` with the sign fixed by [`ExactScalar::sqrt`], when exact.
    pub fn alpha(&self) -> Option<ExactScalar> {
        self.alpha_sq.sqrt()
    }

    /// `β` matching [`ParabolicParams::alpha`].
    pub fn beta(&self) -> Option<ExactScalar> {
        Some(&self.alpha_beta / &self.alpha()?)
    }

    pub fn beta_sq(&self) -> ExactScalar {
        &(&self.alpha_beta * &self.alpha_beta) / &self.alpha_sq
    }

    /// `((β² − γ)/α)²`, which does not depend on the sign of `α`.
    pub fn ratio_sq(&self) -> ExactScalar {
        let d = &self.beta_sq() - &self.gamma;
        &(&d * &d) / &self.alpha_sq
    }
}

/// Matches `w'' − (c₂t² + c₁t + c₀)w = 0`: `α² = c₂`, `2αβ = c₁`, `γ = c₀`.
pub fn parabolic_from_ode(ode: &ScalarODE) -> Result<ParabolicParams, GaloisError> {
    if ode.order() != 2 || !ode.coeff(1).is_zero() {
        return Err(GaloisError::Shape("not of the form w'' + a₀w = 0".into()));
    }
    let c = ode.coeff(0).as_poly().filter(|p| p.degree().unwrap_or(0) <= 2).map(|p| -p.clone());
    let c = c.ok_or_else(|| GaloisError::Shape("a₀ is not a polynomial of degree at most 2".into()))?;
    let alpha_sq = c.coeff(2);
    if alpha_sq.is_zero() {
        return Err(GaloisError::InvalidParameter("α = 0".into()));
    }
    Ok(ParabolicParams { alpha_sq, alpha_beta: &c.coeff(1) * &ExactScalar::from_ratio(1, 2), gamma: c.coeff(0) })
}

/// `r` is an odd integer for one of the two signs exactly when `r²` is the
/// square of an odd integer.
fn is_odd_integer_square(r_sq: &ExactScalar) -> bool {
    r_sq.sqrt().and_then(|r| r.as_integer()).is_some_and(|k| k.bit(0))
}

/// The Galois group is `SL(2, ℂ)` unless `(β² − γ)/α` is an odd integer.
pub fn rehm_classify(p: &ParabolicParams) -> Result<GaloisVerdict, GaloisError> {
    if p.alpha_sq.is_zero() {
        return Err(GaloisError::InvalidParameter("α must be nonzero".into()));
    }
    let ratio_sq = p.ratio_sq();
    let odd = is_odd_integer_square(&ratio_sq);
    let evidence = Evidence::Rehm {
        alpha_sq: p.alpha_sq.to_string(),
        beta_sq: p.beta_sq().to_string(),
        gamma: p.gamma.to_string(),
        ratio_sq: ratio_sq.to_string(),
        odd_integer: odd,
    };
    let tag = if odd { VerdictTag::Inconclusive } else { VerdictTag::NotSolvableIdentityComponent };
    Ok(GaloisVerdict { tag, evidence: vec![evidence] })
}
