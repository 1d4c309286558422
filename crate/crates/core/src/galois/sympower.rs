//! Symmetric powers of linear differential operators.

use std::collections::BTreeMap;

use super::{DiffOperator, GaloisError};
use crate::exactalg::{fraction_free_rref, ExactPoly, ExactRatFunc, ExactScalar};

/// A form of degree `k` in `y, y', …, y⁽ⁿ⁻¹⁾`, keyed by exponent vectors.
type Form = BTreeMap<Vec<u32>, ExactRatFunc>;

fn add_term(f: &mut Form, mono: Vec<u32>, c: ExactRatFunc) {
    if c.is_zero() {
        return;
    }
    match f.get_mut(&mono) {
        Some(v) => {
            *v = &*v + &c;
            if v.is_zero() {
                f.remove(&mono);
            }
        }
        None => {
            f.insert(mono, c);
        }
    }
}

/// `d/dτ` of a form, eliminating `y⁽ⁿ⁾ = −Σ a_j y⁽ʲ⁾`.
fn derive(f: &Form, l: &DiffOperator) -> Form {
    let n = l.order();
    let mut out = Form::new();
    for (mono, c) in f {
        add_term(&mut out, mono.clone(), c.derivative());
        for i in 0..n {
            if mono[i] == 0 {
                continue;
            }
            let c_i = c.scale(&ExactScalar::from_i64(mono[i] as i64));
            let mut base = mono.clone();
            base[i] -= 1;
            if i + 1 < n {
                let mut m = base;
                m[i + 1] += 1;
                add_term(&mut out, m, c_i);
            } else {
                for j in 0..n {
                    let a = l.coeff(j);
                    if a.is_zero() {
                        continue;
                    }
                    let mut m = base.clone();
                    m[j] += 1;
                    add_term(&mut out, m, -(&c_i * a));
                }
            }
        }
    }
    out
}

fn monomials(n: usize, k: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![k]];
    }
    (0..=k)
        .rev()
        .flat_map(|e| {
            monomials(n - 1, k - e).into_iter().map(move |mut rest| {
                rest.insert(0, e);
                rest
            })
        })
        .collect()
}

/// The monic operator of least order annihilating all `k`-fold products of
/// solutions of `l`.
///
/// The derivatives of `y^k` are reduced to forms in `y, …, y⁽ⁿ⁻¹⁾`; the first
/// one that depends linearly on its predecessors over ℚ(i)(τ) gives the
/// operator. The elimination runs fraction-free on cleared columns.
pub fn sym_power(l: &DiffOperator, k: usize) -> Result<DiffOperator, GaloisError> {
    if k == 0 {
        return Err(GaloisError::InvalidParameter("power must be positive".into()));
    }
    let n = l.order();
    let v = l.variable();
    let basis = monomials(n, k as u32);
    let dim = basis.len();
    let mut tower: Vec<Form> = Vec::with_capacity(dim + 1);
    let mut y_k = vec![0u32; n];
    y_k[0] = k as u32;
    tower.push(Form::from([(y_k, ExactRatFunc::one(v))]));
    for j in 0..dim {
        let next = derive(&tower[j], l);
        tower.push(next);
    }
    // Column j is d_j times the coordinates of tower[j].
    let mut col_dens = Vec::with_capacity(dim + 1);
    let mut rows = vec![Vec::with_capacity(dim + 1); dim];
    for f in &tower {
        let d = f.values().fold(ExactPoly::one(v), |acc, c| {
            if c.den().is_one() || c.den() == &acc { acc } else { ExactPoly::lcm(&acc, c.den()) }
        });
        for (r, mono) in basis.iter().enumerate() {
            rows[r].push(f.get(mono).map_or(ExactPoly::zero(v), |c| c.num() * &d.exact_div(c.den())));
        }
        col_dens.push(d);
    }
    let ech = fraction_free_rref(&mut rows, dim + 1);
    let m = (0..=dim).find(|c| !ech.pivots.contains(c)).expect("dim + 1 vectors in a space of dimension dim");
    debug_assert!(m > 0, "y^k is a nonzero form");
    // Pivot row j holds p·x_j with w_m = Σ x_j w_j for the cleared columns,
    // so v_m = Σ (x_j d_j / d_m) v_j and a_j = −x_j d_j / d_m.
    let coeffs = (0..m)
        .map(|j| {
            let num = -(&rows[j][m] * &col_dens[j]);
            ExactRatFunc::new(num, &ech.pivot * &col_dens[m]).map_err(GaloisError::from)
        })
        .collect::<Result<Vec<_>, _>>()?;
    DiffOperator::new(coeffs)
}
