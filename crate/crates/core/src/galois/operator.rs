//! Monic linear differential operators with rational coefficients.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::GaloisError;
use crate::exactalg::{ExactPoly, ExactRatFunc, Var};
use crate::variational::{log_derivative_substitution, ScalarODE};

/// `L = Dⁿ + a_{n−1}Dⁿ⁻¹ + … + a₀`; `coeffs[k]` is `a_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOperator {
    ode: ScalarODE,
}

impl DiffOperator {
    pub fn new(coeffs: Vec<ExactRatFunc>) -> Result<Self, GaloisError> {
        Ok(DiffOperator { ode: ScalarODE::new(coeffs)? })
    }

    /// From `b_n Dⁿ + … + b₀`, dividing by `b_n`.
    pub fn from_unnormalized(b: &[ExactRatFunc]) -> Result<Self, GaloisError> {
        Ok(DiffOperator { ode: ScalarODE::from_unnormalized(b)? })
    }

    /// From coefficient strings `a₀, …, a_{n−1}` in [`ExactPoly::parse`] syntax.
    pub fn parse(coeffs: &[&str], var: Var) -> Result<Self, GaloisError> {
        let cs = coeffs
            .iter()
            .map(|s| ExactPoly::parse(s, var).map(ExactRatFunc::from_poly))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(cs)
    }

    pub fn order(&self) -> usize {
        self.ode.order()
    }

    pub fn coeffs(&self) -> &[ExactRatFunc] {
        self.ode.coeffs()
    }

    pub fn coeff(&self, k: usize) -> &ExactRatFunc {
        self.ode.coeff(k)
    }

    /// `a_k` with `a_n = 1`.
    pub fn full_coeff(&self, k: usize) -> ExactRatFunc {
        if k == self.order() { ExactRatFunc::one(self.variable()) } else { self.coeff(k).clone() }
    }

    pub fn variable(&self) -> Var {
        self.ode.variable()
    }

    pub fn as_ode(&self) -> &ScalarODE {
        &self.ode
    }

    /// `b₀, …, b_n` with `L = (1/b_n) Σ b_k Dᵏ`, all polynomial and `b_n` the
    /// monic lcm of the coefficient denominators.
    pub fn cleared(&self) -> Vec<ExactPoly> {
        let v = self.variable();
        let lead = self.coeffs().iter().fold(ExactPoly::one(v), |acc, c| {
            if c.den().is_one() || c.den() == &acc { acc } else { ExactPoly::lcm(&acc, c.den()) }
        });
        let mut b: Vec<ExactPoly> = self.coeffs().iter().map(|c| c.num() * &lead.exact_div(c.den())).collect();
        b.push(lead);
        b
    }

    pub fn apply(&self, f: &ExactRatFunc) -> ExactRatFunc {
        let mut d = f.clone().with_var(self.variable());
        let mut acc = ExactRatFunc::zero(self.variable());
        for k in 0..=self.order() {
            let a = self.full_coeff(k);
            if !a.is_zero() && !d.is_zero() {
                acc = &acc + &(&a * &d);
            }
            d = d.derivative();
        }
        acc
    }

    /// The operator for `w` when `y = w·E` and `E'/E = u`.
    pub fn log_substitution(&self, u: &ExactRatFunc) -> DiffOperator {
        DiffOperator { ode: log_derivative_substitution(&self.ode, u).expect("order is preserved") }
    }

    /// Remainder of the right division by `D − r`; zero exactly when every
    /// `y` with `y'/y = r` is a solution.
    pub fn riccati_remainder(&self, r: &ExactRatFunc) -> ExactRatFunc {
        self.log_substitution(r).coeff(0).clone()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &DiffOperator) -> DiffOperator {
        let v = self.variable();
        let (n, m) = (self.order(), other.order());
        let mut out = vec![ExactRatFunc::zero(v); n + m + 1];
        for i in 0..=n {
            let p = self.full_coeff(i);
            if p.is_zero() {
                continue;
            }
            for j in 0..=m {
                // Dⁱ ∘ q D^j = Σ_l C(i, l) q⁽ˡ⁾ D^{i−l+j}
                let mut q = other.full_coeff(j);
                for l in 0..=i {
                    if !q.is_zero() {
                        let term = (&p * &q).scale(&crate::variational::binomial_coefficient(i, l));
                        out[i - l + j] = &out[i - l + j] + &term;
                    }
                    q = q.derivative();
                }
            }
        }
        out.pop();
        DiffOperator::new(out).expect("order at least 1")
    }
}

impl From<ScalarODE> for DiffOperator {
    fn from(ode: ScalarODE) -> Self {
        DiffOperator { ode }
    }
}

impl From<DiffOperator> for ScalarODE {
    fn from(op: DiffOperator) -> Self {
        op.ode
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D^{}", self.order())?;
        for (k, c) in self.coeffs().iter().enumerate().rev() {
            if !c.is_zero() {
                write!(f, " + ({c})*D^{k}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for DiffOperator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.ode.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiffOperator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(DiffOperator { ode: ScalarODE::deserialize(deserializer)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(c: &[&str]) -> DiffOperator {
        DiffOperator::parse(c, Var::Tau).unwrap()
    }

    #[test]
    fn composition_matches_application() {
        let p = op(&["τ", "1"]);
        let q = op(&["τ^2", "-2*τ"]);
        let f = ExactRatFunc::from_poly(ExactPoly::parse("τ^5 - 3*i*τ + 2", Var::Tau).unwrap());
        assert_eq!(p.compose(&q).apply(&f), p.apply(&q.apply(&f)));
    }

    #[test]
    fn riccati_remainder_detects_right_factor() {
        // D² − (τ² + 1) annihilates e^{τ²/2}.
        let l = op(&["-τ^2 - 1", "0"]);
        let tau = ExactRatFunc::var(Var::Tau);
        assert!(l.riccati_remainder(&tau).is_zero());
        assert!(!l.riccati_remainder(&-tau).is_zero());
    }

    #[test]
    fn cleared_form_has_polynomial_coefficients() {
        let a = ExactRatFunc::new(ExactPoly::from_i64(&[1], Var::Tau), ExactPoly::from_i64(&[0, 2], Var::Tau)).unwrap();
        let l = DiffOperator::new(vec![a, ExactRatFunc::zero(Var::Tau)]).unwrap();
        assert_eq!(l.cleared(), vec![
            ExactPoly::from_i64(&[1], Var::Tau).scale(&crate::exactalg::ExactScalar::from_ratio(1, 2)),
            ExactPoly::zero(Var::Tau),
            ExactPoly::from_i64(&[0, 1], Var::Tau),
        ]);
    }
}
