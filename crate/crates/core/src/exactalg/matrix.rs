//! Dense matrices over ℚ(i)(x).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ExactError, ExactPoly, ExactRatFunc, ExactScalar, Var};

pub type ExactVector = Vec<ExactRatFunc>;

/// Row-major matrix of rational functions. Both dimensions are at least 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ExactRatFunc>,
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<ExactRatFunc>) -> Result<Self, ExactError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(ExactError::Dimension(format!(
                "{} entries cannot fill a {rows}×{cols} matrix",
                data.len()
            )));
        }
        Ok(ExactMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ExactRatFunc) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        ExactMatrix { rows, cols, data }
    }

    pub fn from_polys(rows: Vec<Vec<ExactPoly>>) -> Result<Self, ExactError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ExactError::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().map(ExactRatFunc::from_poly).collect())
    }

    /// Polynomial matrix from rows of [`ExactPoly::parse`] strings.
    pub fn parse(rows: &[&[&str]], var: Var) -> Result<Self, ExactError> {
        let polys = rows
            .iter()
            .map(|r| r.iter().map(|e| ExactPoly::parse(e, var)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_polys(polys)
    }

    pub fn with_var(self, var: Var) -> Self {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.into_iter().map(|e| e.with_var(var)).collect() }
    }

    pub fn zeros(rows: usize, cols: usize, var: Var) -> Self {
        Self::from_fn(rows, cols, |_, _| ExactRatFunc::zero(var))
    }

    pub fn identity(n: usize, var: Var) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ExactRatFunc::one(var) } else { ExactRatFunc::zero(var) })
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(entries: &[ExactRatFunc]) -> Self {
        let var = entries[0].variable();
        Self::from_fn(entries.len(), entries.len(), |i, j| {
            if i == j { entries[i].clone() } else { ExactRatFunc::zero(var) }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn variable(&self) -> Var {
        self.data[0].variable()
    }

    pub fn get(&self, r: usize, c: usize) -> &ExactRatFunc {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: ExactRatFunc) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[ExactRatFunc] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> ExactVector {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn entries(&self) -> &[ExactRatFunc] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(ExactRatFunc::is_zero)
    }

    /// All entries are polynomials.
    pub fn is_polynomial(&self) -> bool {
        self.data.iter().all(ExactRatFunc::is_polynomial)
    }

    pub fn from_columns(cols: &[ExactVector]) -> Result<Self, ExactError> {
        let n = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != n) {
            return Err(ExactError::Dimension("columns of unequal length".into()));
        }
        Ok(Self::from_fn(n, cols.len(), |i, j| cols[j][i].clone()))
    }

    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn derivative(&self) -> Self {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(ExactRatFunc::derivative).collect() }
    }

    pub fn conj(&self) -> Self {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(ExactRatFunc::conj).collect() }
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|e| e.scale(c)).collect() }
    }

    pub fn mul_vec(&self, v: &[ExactRatFunc]) -> ExactVector {
        assert_eq!(v.len(), self.cols, "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(ExactRatFunc::zero(self.variable()), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    pub fn try_mul(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, ExactError> {
        if self.cols != rhs.rows {
            return Err(ExactError::Dimension(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        // Clear denominators per row on the left and per column on the right,
        // so each entry is a polynomial sum normalized once.
        let var = self.variable();
        let row_dens: Vec<ExactPoly> = (0..self.rows).map(|i| lcm_of_dens(self.row(i), var)).collect();
        let col_dens: Vec<ExactPoly> = (0..rhs.cols).map(|j| lcm_of_dens(&rhs.column(j), var)).collect();
        let left: Vec<ExactPoly> = (0..self.rows * self.cols)
            .map(|k| cleared(&self.data[k], &row_dens[k / self.cols]))
            .collect();
        let right: Vec<ExactPoly> = (0..rhs.rows * rhs.cols)
            .map(|k| cleared(&rhs.data[k], &col_dens[k % rhs.cols]))
            .collect();
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            let num = (0..self.cols).fold(ExactPoly::zero(var), |acc, k| {
                let (a, b) = (&left[i * self.cols + k], &right[k * rhs.cols + j]);
                if a.is_zero() || b.is_zero() { acc } else { &acc + &(a * b) }
            });
            ExactRatFunc::new(num, &row_dens[i] * &col_dens[j]).expect("nonzero denominator")
        }))
    }

    /// `(P, d)` with `self = P/d` row by row: `d[i]` is the lcm of the denominators in row `i`.
    fn cleared_rows(&self) -> (Vec<Vec<ExactPoly>>, Vec<ExactPoly>) {
        let var = self.variable();
        (0..self.rows)
            .map(|i| {
                let d = lcm_of_dens(self.row(i), var);
                (self.row(i).iter().map(|e| cleared(e, &d)).collect(), d)
            })
            .unzip()
    }

    fn zip_with(&self, rhs: &ExactMatrix, f: impl Fn(&ExactRatFunc, &ExactRatFunc) -> ExactRatFunc) -> ExactMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "dimension mismatch");
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        let (mut rows, _) = self.cleared_rows();
        fraction_free_rref(&mut rows, self.cols).pivots.len()
    }

    /// Basis of the right kernel over the rational-function field. Each basis
    /// vector has a 1 in its own free coordinate and 0 in the other free ones.
    pub fn nullspace(&self) -> Vec<ExactVector> {
        let var = self.variable();
        let (mut rows, _) = self.cleared_rows();
        let ech = fraction_free_rref(&mut rows, self.cols);
        (0..self.cols)
            .filter(|c| !ech.pivots.contains(c))
            .map(|f| {
                let mut v = vec![ExactRatFunc::zero(var); self.cols];
                v[f] = ExactRatFunc::one(var);
                for (r, &pc) in ech.pivots.iter().enumerate() {
                    v[pc] = ExactRatFunc::new(-&rows[r][f], ech.pivot.clone()).expect("nonzero pivot");
                }
                v
            })
            .collect()
    }

    pub fn determinant(&self) -> Result<ExactRatFunc, ExactError> {
        if !self.is_square() {
            return Err(ExactError::Dimension("determinant of a non-square matrix".into()));
        }
        let var = self.variable();
        let (mut rows, dens) = self.cleared_rows();
        let ech = fraction_free_rref(&mut rows, self.rows);
        if ech.pivots.len() < self.rows {
            return Ok(ExactRatFunc::zero(var));
        }
        let det = if ech.sign == 1 { ech.pivot } else { -ech.pivot };
        let den = dens.iter().fold(ExactPoly::one(var), |acc, d| &acc * d);
        ExactRatFunc::new(det, den)
    }

    /// Fraction-free Gauss–Jordan elimination on `[DA | D]`, `D` clearing the row denominators.
    pub fn inverse(&self) -> Result<ExactMatrix, ExactError> {
        if !self.is_square() {
            return Err(ExactError::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let var = self.variable();
        let (mut rows, dens) = self.cleared_rows();
        for (i, row) in rows.iter_mut().enumerate() {
            row.extend((0..n).map(|j| if i == j { dens[i].clone() } else { ExactPoly::zero(var) }));
        }
        let ech = fraction_free_rref(&mut rows, n);
        if ech.pivots.len() < n {
            return Err(ExactError::Singular);
        }
        let pivot = ech.pivot;
        // Row i now reads (p·e_i | p·A⁻¹ row i) with p the last pivot.
        Ok(Self::from_fn(n, n, |i, j| ExactRatFunc::new(rows[i][n + j].clone(), pivot.clone()).expect("nonzero pivot")))
    }

    pub fn eval_complex(&self, x: Complex64) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|e| e.eval_complex(x)).collect()).collect()
    }
}

fn lcm_of_dens(entries: &[ExactRatFunc], var: Var) -> ExactPoly {
    entries.iter().fold(ExactPoly::one(var), |acc, e| {
        if e.den().is_one() || e.den() == &acc { acc } else { ExactPoly::lcm(&acc, e.den()) }
    })
}

/// `e·d` for a multiple `d` of the denominator of `e`.
fn cleared(e: &ExactRatFunc, d: &ExactPoly) -> ExactPoly {
    if e.den().is_one() {
        e.num() * d
    } else {
        e.num() * &d.exact_div(e.den())
    }
}

/// Result of [`fraction_free_rref`].
#[derive(Clone, Debug, PartialEq)]
pub struct FractionFreeEchelon {
    /// Pivot columns; the pivot of column `pivots[r]` sits in row `r`.
    pub pivots: Vec<usize>,
    /// The last pivot `p`: every pivot row carries `p` in its pivot column.
    pub pivot: ExactPoly,
    /// `±1` from the row swaps.
    pub sign: i32,
}

/// Bareiss fraction-free Gauss–Jordan elimination over ℚ(i)[x], pivoting on
/// the first `ncols` columns in order. Afterwards the pivot columns are `p`
/// times unit vectors, rows past the rank vanish on the first `ncols`
/// columns, and for a square leading block its determinant is `sign·p`.
pub fn fraction_free_rref(rows: &mut [Vec<ExactPoly>], ncols: usize) -> FractionFreeEchelon {
    let var = rows.first().and_then(|r| r.first()).map_or(Var::default(), ExactPoly::variable);
    let mut prev = ExactPoly::one(var);
    let mut sign = 1;
    let mut pivots = Vec::new();
    for c in 0..ncols {
        let r = pivots.len();
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).filter(|&i| !rows[i][c].is_zero()).min_by_key(|&i| rows[i][c].degree()) else {
            continue;
        };
        if p != r {
            rows.swap(p, r);
            sign = -sign;
        }
        let (before, rest) = rows.split_at_mut(r);
        let (pivot_row, after) = rest.split_first_mut().unwrap();
        let piv = pivot_row[c].clone();
        for row in before.iter_mut().chain(after.iter_mut()) {
            let f = row[c].clone();
            for (x, pv) in row.iter_mut().zip(pivot_row.iter()) {
                if f.is_zero() && x.is_zero() {
                    continue;
                }
                let mut v = &*x * &piv;
                if !f.is_zero() && !pv.is_zero() {
                    v = &v - &(&f * pv);
                }
                *x = if prev.is_one() { v } else { v.exact_div(&prev) };
            }
        }
        pivots.push(c);
        prev = piv;
    }
    FractionFreeEchelon { pivots, pivot: prev, sign }
}

impl Add for &ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.try_mul(rhs).expect("dimension mismatch in matrix product")
    }
}

impl Neg for &ExactMatrix {
    type Output = ExactMatrix;
    fn neg(self) -> ExactMatrix {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|e| -e).collect() }
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for ExactMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<&[ExactRatFunc]> = (0..self.rows).map(|i| self.row(i)).collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<ExactRatFunc>>::deserialize(deserializer)?;
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        ExactMatrix::new(r, c, rows.into_iter().flatten().collect()).map_err(serde::de::Error::custom)
    }
}

/// Kernel basis of `m`; empty iff `m` is injective.
pub fn nullspace(m: &ExactMatrix) -> Vec<ExactVector> {
    m.nullspace()
}

pub fn matrix_inverse(m: &ExactMatrix) -> Result<ExactMatrix, ExactError> {
    m.inverse()
}
