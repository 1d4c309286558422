//! Exterior squares of linear systems and the factorization of a
//! four-dimensional system from decomposable exponential solutions of its
//! exterior square.

use serde::{Deserialize, Serialize};

use super::{exp_solutions, DiffOperator, GaloisError};
use crate::exactalg::{ExactMatrix, ExactPoly, ExactRatFunc, ExactScalar, ExactVector};
use crate::variational::{cyclic_reduction, GaugeMatrix, LinearSystem, VariationalError};

/// Index pairs `(i, j)`, `i < j`, in lexicographic order.
fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// The system `Ẇ = AW + WAᵀ` on antisymmetric `W`, in the coordinates
/// `z_{ij} = W_{ij}`, `i < j`, ordered lexicographically. For `n = 4` this is
/// `(z₀₁, z₀₂, z₀₃, z₁₂, z₁₃, z₂₃)`.
pub fn exterior_square(a: &ExactMatrix) -> Result<ExactMatrix, GaloisError> {
    if !a.is_square() {
        return Err(GaloisError::Shape(format!("{}×{} matrix", a.rows(), a.cols())));
    }
    let n = a.rows();
    let v = a.variable();
    let ps = pairs(n);
    let index = |i: usize, j: usize| ps.iter().position(|&p| p == (i, j)).unwrap();
    let mut out = ExactMatrix::zeros(ps.len(), ps.len(), v);
    let mut add = |r: usize, i: usize, j: usize, c: &ExactRatFunc| {
        // c·W_{ij} with W antisymmetric.
        if i == j || c.is_zero() {
            return;
        }
        let (col, c) = if i < j { (index(i, j), c.clone()) } else { (index(j, i), -c.clone()) };
        let e = out.get(r, col) + &c;
        out.set(r, col, e);
    };
    for (r, &(i, j)) in ps.iter().enumerate() {
        for k in 0..n {
            // Ẇ_{ij} = Σ_k A_{ik} W_{kj} + Σ_k A_{jk} W_{ik}.
            add(r, k, j, a.get(i, k));
            add(r, i, k, a.get(j, k));
        }
    }
    Ok(out)
}

/// `z₀₃z₁₂ − z₀₂z₁₃ + z₂₃z₀₁` for `Y = (z₀₁, z₀₂, z₀₃, z₁₂, z₁₃, z₂₃)`.
pub fn plucker_value(y: &[ExactRatFunc]) -> Result<ExactRatFunc, GaloisError> {
    if y.len() != 6 {
        return Err(GaloisError::Shape(format!("2-vector of length {}", y.len())));
    }
    Ok(&(&(&y[2] * &y[3]) - &(&y[1] * &y[4])) + &(&y[5] * &y[0]))
}

/// Whether `Y` is decomposable, i.e. satisfies the Plücker relation.
pub fn plucker_check(y: &[ExactRatFunc]) -> bool {
    plucker_value(y).is_ok_and(|v| v.is_zero())
}

/// A solution `e^{s(t)}·v(t)` of a linear system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemExpSolution {
    /// `s` with `s(0) = 0`.
    pub exponent: ExactPoly,
    /// `v`, scaled so that its last nonzero entry has leading coefficient 1.
    pub direction: ExactVector,
}

fn antiderivative(p: &ExactPoly) -> ExactPoly {
    let mut c = vec![ExactScalar::zero()];
    c.extend(p.coeffs().iter().enumerate().map(|(k, a)| a * &ExactScalar::from_ratio(1, k as i64 + 1)));
    ExactPoly::new(c, p.variable())
}

fn cyclic_vectors(n: usize, v: crate::exactalg::Var) -> Vec<Vec<ExactRatFunc>> {
    let unit = |k: usize| (0..n).map(|j| if j == k { ExactRatFunc::one(v) } else { ExactRatFunc::zero(v) }).collect();
    let mut out: Vec<Vec<ExactRatFunc>> = (0..n).map(unit).collect();
    out.push(vec![ExactRatFunc::one(v); n]);
    out.push((1..=n).map(|k| ExactRatFunc::constant(ExactScalar::from_i64(k as i64), v)).collect());
    out
}

/// Solutions `e^{s}v` with `s` polynomial and `v` rational, via a cyclic
/// vector and the exponential solutions of the resulting scalar equation.
/// Each returned solution is checked exactly against `v' + s'v = Bv`.
pub fn system_exp_solutions(sys: &LinearSystem) -> Result<Vec<SystemExpSolution>, GaloisError> {
    let n = sys.dim();
    let v = sys.variable();
    let (ode, m) = cyclic_vectors(n, v)
        .into_iter()
        .find_map(|u| cyclic_reduction(sys, &u).ok())
        .ok_or(GaloisError::Variational(VariationalError::NotCyclic { component: usize::MAX }))?;
    let m_inv = m.inverse()?;
    let search = exp_solutions(&DiffOperator::from(ode))?;
    let mut out: Vec<SystemExpSolution> = Vec::new();
    for sol in &search.solutions {
        if !sol.factors.iter().all(|(_, e)| e.as_integer().is_some()) {
            continue;
        }
        let ds = ExactRatFunc::from_poly(sol.exponent.clone());
        let mut e = sol.factors.iter().try_fold(ExactRatFunc::from_poly(sol.polynomial.clone()), |acc, (p, k)| {
            let k = i32::try_from(k.as_integer().unwrap()).map_err(|_| GaloisError::Shape("exponent too large".into()))?;
            let base = ExactRatFunc::from_poly(p.clone());
            let f = if k >= 0 { base.pow(k as u32) } else { base.inv().unwrap().pow(k.unsigned_abs()) };
            Ok::<_, GaloisError>(&acc * &f)
        })?;
        let mut jets = Vec::with_capacity(n);
        for _ in 0..n {
            jets.push(e.clone());
            e = &e.derivative() + &(&ds * &e);
        }
        let mut dir = m_inv.mul_vec(&jets);
        let Some(last) = dir.iter().rev().find(|x| !x.is_zero()) else { continue };
        let scale = last.leading_coeff().inv().expect("nonzero");
        dir = dir.iter().map(|x| x.scale(&scale)).collect();
        let lhs: Vec<ExactRatFunc> = dir.iter().map(|x| &x.derivative() + &(&ds * x)).collect();
        if lhs != sys.matrix().mul_vec(&dir) {
            return Err(GaloisError::Shape("exponential solution failed the system check".into()));
        }
        let s = SystemExpSolution { exponent: antiderivative(&sol.exponent), direction: dir };
        if !out.contains(&s) {
            out.push(s);
        }
    }
    Ok(out)
}

/// `M_Ψ` of a decomposable 2-vector; its kernel is the plane it represents.
fn m_psi(y: &[ExactRatFunc]) -> ExactMatrix {
    let z = |k: usize| y[k].clone();
    let o = || ExactRatFunc::zero(y[0].variable());
    ExactMatrix::new(4, 4, vec![
        z(3), -z(1), z(0), o(),
        z(4), -z(2), o(), z(0),
        z(5), o(), -z(2), z(1),
        o(), z(5), -z(4), z(3),
    ])
    .expect("4×4")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    pub q: GaugeMatrix,
    /// Leading columns of `Q` taken from the kernels; the rest complete the basis.
    pub kernel_columns: usize,
    /// The kernels did not span: `Q` only block-triangularizes.
    pub partial: bool,
}

/// Columns of `Q` from the kernels of `M_Ψ` for the given decomposable
/// solutions of the exterior square, completed by unit vectors if needed.
///
/// Kernel bases are listed with the free coordinate descending.
pub fn factorization_basis(ys: &[ExactVector]) -> Result<Factorization, GaloisError> {
    let Some(first) = ys.first() else {
        return Err(GaloisError::Shape("no solutions".into()));
    };
    let v = first.first().map(ExactRatFunc::variable).unwrap_or(crate::exactalg::Var::T);
    let mut cols: Vec<ExactVector> = Vec::new();
    for (index, y) in ys.iter().enumerate() {
        if !plucker_check(y) {
            return Err(GaloisError::Plucker { index });
        }
        let mut kernel = m_psi(y).nullspace();
        kernel.reverse();
        for k in kernel {
            if cols.len() == 4 {
                break;
            }
            cols.push(k);
            if ExactMatrix::from_columns(&cols)?.rank() < cols.len() {
                cols.pop();
            }
        }
    }
    let kernel_columns = cols.len();
    for j in 0..4 {
        if cols.len() == 4 {
            break;
        }
        cols.push((0..4).map(|i| if i == j { ExactRatFunc::one(v) } else { ExactRatFunc::zero(v) }).collect());
        if ExactMatrix::from_columns(&cols)?.rank() < cols.len() {
            cols.pop();
        }
    }
    let q = GaugeMatrix::new(ExactMatrix::from_columns(&cols)?)?;
    Ok(Factorization { q, kernel_columns, partial: kernel_columns < 4 })
}
