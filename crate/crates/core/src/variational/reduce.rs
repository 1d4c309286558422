//! Gauge transformations and reduction of linear systems to scalar equations.

use super::{GaugeMatrix, LinearSystem, ScalarODE, VariationalError};
use crate::exactalg::{ExactMatrix, ExactPoly, ExactRatFunc, ExactScalar};

/// `Q⁻¹(AQ − Q̇)`: the system satisfied by `ζ` when `y = Qζ`.
pub fn gauge_transform(sys: &LinearSystem, q: &GaugeMatrix) -> Result<LinearSystem, VariationalError> {
    if q.matrix().rows() != sys.dim() {
        return Err(VariationalError::Shape(format!(
            "gauge matrix of size {} for a system of dimension {}",
            q.matrix().rows(),
            sys.dim()
        )));
    }
    let aq = sys.matrix().try_mul(q.matrix())?;
    LinearSystem::new(q.inverse().try_mul(&(&aq - &q.matrix().derivative()))?)
}

/// The system for the components `keep`, after setting the components
/// `zero` to zero. Fails unless `zero` spans an invariant choice and the
/// remaining components do not feed into `keep`.
pub fn subsystem(sys: &LinearSystem, keep: &[usize], zero: &[usize]) -> Result<LinearSystem, VariationalError> {
    let n = sys.dim();
    let m = sys.matrix();
    if keep.iter().chain(zero).any(|&k| k >= n) || keep.iter().any(|k| zero.contains(k)) {
        return Err(VariationalError::Shape("component index out of range or repeated".into()));
    }
    for &j in zero {
        if let Some(i) = (0..n).find(|i| !zero.contains(i) && !m.get(j, *i).is_zero()) {
            return Err(VariationalError::Shape(format!("component {j} cannot stay zero: it is driven by {i}")));
        }
    }
    for &i in keep {
        if let Some(j) = (0..n).find(|j| !keep.contains(j) && !zero.contains(j) && !m.get(i, *j).is_zero()) {
            return Err(VariationalError::Shape(format!("component {i} depends on dropped component {j}")));
        }
    }
    LinearSystem::new(ExactMatrix::from_fn(keep.len(), keep.len(), |i, j| m.get(keep[i], keep[j]).clone()))
}

/// The first-order system of a scalar equation in `(y, y', …, y⁽ⁿ⁻¹⁾)`.
pub fn companion_system(ode: &ScalarODE) -> LinearSystem {
    let n = ode.order();
    let v = ode.variable();
    let m = ExactMatrix::from_fn(n, n, |i, j| {
        if i + 1 < n {
            if j == i + 1 { ExactRatFunc::one(v) } else { ExactRatFunc::zero(v) }
        } else {
            -ode.coeff(j).clone()
        }
    });
    LinearSystem::new(m).expect("square")
}

/// The scalar equation satisfied by component `k` of all solutions.
pub fn cyclic_to_scalar(sys: &LinearSystem, k: usize) -> Result<ScalarODE, VariationalError> {
    let n = sys.dim();
    if k >= n {
        return Err(VariationalError::Shape(format!("component {k} of a {n}-dimensional system")));
    }
    let v = sys.variable();
    let u: Vec<ExactRatFunc> = (0..n).map(|j| if j == k { ExactRatFunc::one(v) } else { ExactRatFunc::zero(v) }).collect();
    cyclic_reduction(sys, &u).map(|(ode, _)| ode).map_err(|e| match e {
        VariationalError::NotCyclic { .. } => VariationalError::NotCyclic { component: k },
        e => e,
    })
}

/// The scalar equation for `z = u·y` together with the matrix `M` whose rows
/// give `z⁽ʲ⁾ = (M y)_j`, `j < n`.
///
/// Row vectors `r_j` with `z⁽ʲ⁾ = r_j·y` obey `r_{j+1} = r_j' + r_j A`; the
/// relation expressing `r_n` through `r_0..r_{n−1}` is the equation.
pub fn cyclic_reduction(sys: &LinearSystem, u: &[ExactRatFunc]) -> Result<(ScalarODE, ExactMatrix), VariationalError> {
    let n = sys.dim();
    if u.len() != n {
        return Err(VariationalError::Shape(format!("vector of length {} for a {n}-dimensional system", u.len())));
    }
    let v = sys.variable();
    let a = sys.matrix();
    let mut rows: Vec<Vec<ExactRatFunc>> = Vec::with_capacity(n + 1);
    rows.push(u.iter().map(|x| x.clone().with_var(v)).collect());
    for _ in 0..n {
        let r = rows.last().unwrap();
        let next: Vec<ExactRatFunc> = (0..n)
            .map(|j| {
                (0..n).fold(r[j].derivative(), |acc, l| {
                    let (x, y) = (&r[l], a.get(l, j));
                    if x.is_zero() || y.is_zero() { acc } else { &acc + &(x * y) }
                })
            })
            .collect();
        rows.push(next);
    }
    // Solve Σ c_j r_j = r_n, i.e. Mᵀc = r_nᵀ with M the first n rows.
    let m = ExactMatrix::from_fn(n, n, |i, j| rows[i][j].clone());
    let inv = m.transpose().inverse().map_err(|_| VariationalError::NotCyclic { component: usize::MAX })?;
    let c = inv.mul_vec(&rows[n]);
    Ok((ScalarODE::new(c.into_iter().map(|x| -x).collect())?, m))
}

pub(crate) fn binomial(n: usize, k: usize) -> ExactScalar {
    let mut b = ExactScalar::one();
    for i in 0..k {
        b = &(&b * &ExactScalar::from_i64((n - i) as i64)) * &ExactScalar::from_ratio(1, (i + 1) as i64);
    }
    b
}

/// The equation for `w` when `y = w·e^{s}` solves `ode`.
pub fn exp_substitution(ode: &ScalarODE, s: &ExactPoly) -> Result<ScalarODE, VariationalError> {
    log_derivative_substitution(ode, &ExactRatFunc::from_poly(s.derivative().with_var(ode.variable())))
}

/// The equation for `w` when `y = w·E` solves `ode` and `E'/E = u`.
///
/// With `E⁽ᵐ⁾ = B_m E`, `B₀ = 1`, `B_{m+1} = B_m' + uB_m`, the new
/// coefficient of `w⁽ʲ⁾` is `Σ_{k≥j} a_k C(k, j) B_{k−j}` with `a_n = 1`.
/// The new `w⁽⁰⁾` coefficient `Σ a_k B_k` is the remainder of the right
/// division of the operator by `D − u`.
pub fn log_derivative_substitution(ode: &ScalarODE, u: &ExactRatFunc) -> Result<ScalarODE, VariationalError> {
    let n = ode.order();
    let v = ode.variable();
    let u = u.clone().with_var(v);
    let mut b = vec![ExactRatFunc::one(v)];
    for m in 0..n {
        let next = &b[m].derivative() + &(&u * &b[m]);
        b.push(next);
    }
    let a = |k: usize| if k == n { ExactRatFunc::one(v) } else { ode.coeff(k).clone() };
    let coeffs = (0..n)
        .map(|j| {
            (j..=n).fold(ExactRatFunc::zero(v), |acc, k| {
                let ak = a(k);
                if ak.is_zero() { acc } else { &acc + &(&ak * &b[k - j]).scale(&binomial(k, j)) }
            })
        })
        .collect();
    ScalarODE::new(coeffs)
}
