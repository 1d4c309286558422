//! Exact arithmetic over ℚ(i): scalars, polynomials, rational functions and
//! matrices. All values are canonical at construction, so equality is
//! structural.

mod matrix;
mod poly;
mod ratfunc;
mod roots;
mod scalar;

pub use matrix::{fraction_free_rref, matrix_inverse, nullspace, ExactMatrix, ExactVector, FractionFreeEchelon};
pub use poly::{ExactPoly, Var};
pub use ratfunc::{ratfunc_normalize, ExactRatFunc};
pub use roots::{gaussian_rational_roots, integral_multiple, poly_roots_numeric, GaussianRoots};
pub use scalar::ExactScalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExactError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("root finder did not converge (scaled residual {residual:e})")]
    RootsNotConverged { residual: f64 },
}
