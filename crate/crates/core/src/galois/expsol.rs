//! Exponential solutions `y = e^{s(τ)} ∏ P_g(τ)^{e_g} q(τ)` of scalar
//! operators, i.e. first-order right factors `D − r` with `r` rational.
//!
//! The polynomial part `s'` is built term by term from the Newton polygon at
//! infinity: if `s' = cτ^m + …` then the largest of `deg b_k + km` must be
//! attained twice and `c` is a nonzero root of the characteristic
//! polynomial of that edge. The finite part comes from the local exponents
//! at the singular points, one representative per class modulo ℤ. The
//! remaining factor `q` is a polynomial whose degree is a nonnegative
//! integer root of the algebraic-growth indicial polynomial at infinity,
//! which bounds the final linear solve. Every returned `r` is certified by
//! the exact remainder of `L` on the right division by `D − r`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::singular::{infinity_data, singularity_analysis, Indicial};
use super::{DiffOperator, GaloisError};
use crate::exactalg::{gaussian_rational_roots, ExactMatrix, ExactPoly, ExactRatFunc, ExactScalar, Var};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpSolution {
    /// `r = y'/y`.
    pub log_derivative: ExactRatFunc,
    /// `s'`, the polynomial part of `r`.
    pub exponent: ExactPoly,
    /// `(P_g, e_g)` for the finite singular factors with `e_g ≠ 0`.
    pub factors: Vec<(ExactPoly, ExactScalar)>,
    /// Monic `q`.
    pub polynomial: ExactPoly,
    /// Basis of all admissible `q` for this `s` and these `e_g`.
    pub family: Vec<ExactPoly>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpSearch {
    pub solutions: Vec<ExpSolution>,
    /// Whether every step of the search was decided exactly, so that an
    /// empty list proves there is no right factor `D − r`, `r ∈ ℂ(τ)`.
    pub complete: bool,
    pub notes: Vec<String>,
}

struct FiniteClass {
    poly: ExactPoly,
    /// Minimal exact exponent in each class modulo ℤ.
    choices: Vec<ExactScalar>,
}

/// Class of `e` modulo ℤ, as the fractional part of the real part plus the
/// imaginary part.
fn class_key(e: &ExactScalar) -> (BigRational, BigRational) {
    let re = e.re();
    (re - re.floor(), e.im().clone())
}

fn finite_classes(l: &DiffOperator, notes: &mut Vec<String>) -> Result<Vec<FiniteClass>, GaloisError> {
    let sing = singularity_analysis(l)?;
    let mut out = Vec::new();
    for g in sing.finite {
        let exps = match &g.indicial {
            None => {
                notes.push(format!("irregular singular points at the roots of {} are not searched", g.polynomial));
                continue;
            }
            Some(Indicial::RootDependent { .. }) => {
                notes.push(format!("local exponents differ between the roots of {}", g.polynomial));
                continue;
            }
            Some(Indicial::Exact { exponents, other, .. }) => {
                if *other > 0 {
                    notes.push(format!("{other} exponents at the roots of {} lie outside ℚ(i)", g.polynomial));
                }
                exponents
            }
        };
        let mut best: BTreeMap<(BigRational, BigRational), ExactScalar> = BTreeMap::new();
        for (e, _) in exps {
            let key = class_key(e);
            if best.get(&key).map_or(true, |m| e.re() < m.re()) {
                best.insert(key, e.clone());
            }
        }
        if best.len() > 1 && g.polynomial.degree().unwrap_or(0) > 1 {
            notes.push(format!(
                "only uniform exponent classes over the roots of {} are searched",
                g.polynomial
            ));
        }
        out.push(FiniteClass { poly: g.polynomial, choices: best.into_values().collect() });
    }
    Ok(out)
}

/// Nonzero roots of the characteristic polynomial of the edge of slope `m`,
/// or `None` when the maximum of `deg b_k + km` is attained only once.
fn edge_roots(b: &[ExactPoly], m: usize) -> Option<(ExactPoly, Vec<ExactScalar>, usize)> {
    let w = |k: usize| b[k].degree().map(|d| d + k * m);
    let top = (0..b.len()).filter_map(w).max()?;
    let tie: Vec<usize> = (0..b.len()).filter(|&k| w(k) == Some(top)).collect();
    if tie.len() < 2 {
        return None;
    }
    let lo = tie[0];
    let chi = tie.iter().fold(ExactPoly::zero(Var::Lambda), |acc, &k| {
        &acc + &ExactPoly::monomial(b[k].leading_coeff(), k - lo, Var::Lambda)
    });
    let roots = gaussian_rational_roots(&chi).ok()?;
    Some((chi, roots.roots.into_iter().map(|(c, _)| c).collect(), roots.other))
}

/// Largest slope for which an edge can exist.
fn max_slope(b: &[ExactPoly]) -> Option<usize> {
    let n = b.len() - 1;
    let dn = b[n].degree()? as i64;
    (0..n)
        .filter_map(|j| b[j].degree().map(|d| (d as i64 - dn).div_euclid((n - j) as i64)))
        .max()
        .filter(|&m| m >= 0)
        .map(|m| m as usize)
}

/// Candidate polynomial parts `s'`, each with the operator `L` conjugated by `e^{s}`.
fn polynomial_parts(
    l: &DiffOperator,
    s: &ExactPoly,
    below: Option<usize>,
    out: &mut Vec<ExactPoly>,
    notes: &mut Vec<String>,
) {
    out.push(s.clone());
    if below == Some(0) {
        return;
    }
    let b = l.cleared();
    let Some(hi) = max_slope(&b) else { return };
    let hi = below.map_or(hi, |m| hi.min(m - 1));
    for m in (0..=hi).rev() {
        let Some((chi, roots, other)) = edge_roots(&b, m) else { continue };
        if other > 0 {
            notes.push(format!("edge of slope {m} has {other} characteristic roots outside ℚ(i): {chi}"));
        }
        for c in roots {
            let term = ExactPoly::monomial(c, m, l.variable());
            let next = l.log_substitution(&ExactRatFunc::from_poly(term.clone()));
            polynomial_parts(&next, &(s + &term), Some(m), out, notes);
        }
    }
}

/// Basis of the polynomial solutions of `op`, each returned monic in its
/// leading free coordinate.
fn polynomial_solutions(op: &DiffOperator) -> Result<Vec<ExactPoly>, GaloisError> {
    let v = op.variable();
    let degrees: Vec<usize> = infinity_data(op)?
        .exponents
        .iter()
        .filter_map(|(a, _)| (-a).as_integer())
        .filter_map(|d| usize::try_from(d).ok())
        .collect();
    let Some(&n_max) = degrees.iter().max() else { return Ok(Vec::new()) };
    let b = op.cleared();
    let images: Vec<ExactPoly> = (0..=n_max)
        .map(|j| {
            let mut d = ExactPoly::monomial(ExactScalar::one(), j, v);
            let mut acc = ExactPoly::zero(v);
            for bk in &b {
                if d.is_zero() {
                    break;
                }
                acc = &acc + &(bk * &d);
                d = d.derivative();
            }
            acc
        })
        .collect();
    let rows = images.iter().filter_map(ExactPoly::degree).max().map_or(0, |d| d + 1);
    if rows == 0 {
        return Ok((0..=n_max).map(|j| ExactPoly::monomial(ExactScalar::one(), j, v)).collect());
    }
    let m = ExactMatrix::from_fn(rows, n_max + 1, |i, j| ExactRatFunc::constant(images[j].coeff(i), v));
    let mut kernel: Vec<ExactPoly> = m
        .nullspace()
        .into_iter()
        .map(|col| {
            let coeffs = col.iter().map(|c| c.as_constant().expect("constant system")).collect();
            ExactPoly::new(coeffs, v).monic()
        })
        .collect();
    kernel.reverse();
    Ok(kernel)
}

fn cartesian(classes: &[FiniteClass]) -> Vec<Vec<ExactScalar>> {
    classes.iter().fold(vec![Vec::new()], |acc, c| {
        acc.into_iter()
            .flat_map(|prefix| {
                c.choices.iter().map(move |e| {
                    let mut p = prefix.clone();
                    p.push(e.clone());
                    p
                })
            })
            .collect()
    })
}

/// All exponential solutions of `l` with `r = y'/y ∈ ℚ(i)(τ)`.
pub fn exp_solutions(l: &DiffOperator) -> Result<ExpSearch, GaloisError> {
    let v = l.variable();
    let mut notes = Vec::new();
    let classes = finite_classes(l, &mut notes)?;
    let mut parts = Vec::new();
    polynomial_parts(l, &ExactPoly::zero(v), None, &mut parts, &mut notes);
    let mut solutions: Vec<ExpSolution> = Vec::new();
    for s in &parts {
        for exps in cartesian(&classes) {
            let mut u = ExactRatFunc::from_poly(s.clone());
            let mut factors = Vec::new();
            for (c, e) in classes.iter().zip(&exps) {
                if e.is_zero() {
                    continue;
                }
                let term = ExactRatFunc::new(c.poly.derivative(), c.poly.clone())?.scale(e);
                u = &u + &term;
                factors.push((c.poly.clone(), e.clone()));
            }
            let family = polynomial_solutions(&l.log_substitution(&u))?;
            for q in &family {
                let r = &u + &ExactRatFunc::new(q.derivative(), q.clone())?;
                if !l.riccati_remainder(&r).is_zero() {
                    notes.push(format!("candidate {r} failed certification"));
                    continue;
                }
                if solutions.iter().any(|x| x.log_derivative == r) {
                    continue;
                }
                solutions.push(ExpSolution {
                    log_derivative: r,
                    exponent: s.clone(),
                    factors: factors.clone(),
                    polynomial: q.clone(),
                    family: family.clone(),
                });
            }
        }
    }
    let complete = notes.is_empty();
    Ok(ExpSearch { solutions, complete, notes })
}

impl ExpSearch {
    pub fn log_derivatives(&self) -> Vec<&ExactRatFunc> {
        self.solutions.iter().map(|s| &s.log_derivative).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_bound() {
        // D³ − (4/3)τ²D + 16/27τ³ − 28/3τ has a single edge of slope 1.
        let l = DiffOperator::parse(&["16/27*τ^3 - 28/3*τ", "-4/3*τ^2", "0"], Var::Tau).unwrap();
        let b = l.cleared();
        assert_eq!(max_slope(&b), Some(1));
        let (_, roots, other) = edge_roots(&b, 1).unwrap();
        assert_eq!(other, 0);
        assert_eq!(roots, vec![ExactScalar::from_ratio(-4, 3), ExactScalar::from_ratio(2, 3)]);
        assert!(edge_roots(&b, 0).is_none());
    }

    #[test]
    fn polynomial_kernel_of_d2() {
        let l = DiffOperator::parse(&["0", "0"], Var::Tau).unwrap();
        let k = polynomial_solutions(&l).unwrap();
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn residue_classes() {
        let a = class_key(&ExactScalar::from_ratio(-1, 2));
        let b = class_key(&ExactScalar::from_ratio(5, 2));
        assert_eq!(a, b);
        assert_ne!(a, class_key(&ExactScalar::from_i64(3)));
    }
}
