//! Variational equations along the vertical particular solutions, their
//! changes of variables, gauge transformations and scalar reductions.

mod bessel;
mod flow;
mod reduce;
mod ve;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{ExactError, ExactMatrix, ExactRatFunc, Var};
use crate::heisenmodel::ModelError;

pub use bessel::{bessel_closed_form, bessel_closed_form_jet, BESSEL_ARGUMENT_SCALE};
pub use flow::fundamental_matrix;
pub(crate) use reduce::binomial as binomial_coefficient;
pub use reduce::{
    companion_system, cyclic_reduction, cyclic_to_scalar, exp_substitution, gauge_transform, log_derivative_substitution, subsystem,
};
pub use ve::{
    q1h1_linearization, q_twobody_mu_minus_one, q_twobody_tau0_zero, transform_vars_q1h1, transform_vars_q1h1_inverse,
    twobody_uvw_matrix, ve_along, ve_along_path, ve_blocks_derived, ve_blocks_transformed, ve_particular,
    ve_particular_interleaved, ve_twobody_blocks, ve_twobody_derived, ExactParticular, SampledSystem, Transformed1B,
    ONE_BODY_INTERLEAVED, PATH_RESIDUAL_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VariationalError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("the path is not a solution: residual {residual:e} at t = {t}")]
    NotASolution { t: f64, residual: f64 },
    /// `component` is `usize::MAX` for a vector that is not a coordinate.
    #[error("component {component} is not a cyclic vector")]
    NotCyclic { component: usize },
    #[error("gauge matrix is singular")]
    SingularGauge,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape: {0}")]
    Shape(String),
    #[error("special function evaluation failed: {0}")]
    Bessel(String),
    #[error("integration failed: {0}")]
    Integration(String),
}

/// `ẏ = A(t) y` with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    matrix: ExactMatrix,
}

impl LinearSystem {
    pub fn new(matrix: ExactMatrix) -> Result<Self, VariationalError> {
        if !matrix.is_square() {
            return Err(VariationalError::Shape(format!("{}×{} coefficient matrix", matrix.rows(), matrix.cols())));
        }
        Ok(LinearSystem { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    pub fn variable(&self) -> Var {
        self.matrix.variable()
    }

    /// The diagonal block starting at `start`.
    pub fn block(&self, start: usize, size: usize) -> ExactMatrix {
        self.matrix.submatrix(start, start, size, size)
    }

    /// Whether all entries outside the consecutive diagonal blocks of the given sizes vanish.
    pub fn is_block_diagonal(&self, sizes: &[usize]) -> bool {
        let mut owner = Vec::with_capacity(self.dim());
        for (b, &s) in sizes.iter().enumerate() {
            owner.extend(std::iter::repeat(b).take(s));
        }
        if owner.len() != self.dim() {
            return false;
        }
        (0..self.dim())
            .all(|i| (0..self.dim()).all(|j| owner[i] == owner[j] || self.matrix.get(i, j).is_zero()))
    }

    /// `P A Pᵀ` with `new[i] = old[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, VariationalError> {
        let n = self.dim();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(VariationalError::Shape("not a permutation".into()));
        }
        Self::new(ExactMatrix::from_fn(n, n, |i, j| self.matrix.get(perm[i], perm[j]).clone()))
    }

    pub fn eval(&self, t: num_complex::Complex64) -> Vec<Vec<num_complex::Complex64>> {
        self.matrix.eval_complex(t)
    }
}

#[derive(Serialize, Deserialize)]
struct LinearSystemRepr {
    dimension: usize,
    variable: Var,
    matrix: ExactMatrix,
}

impl Serialize for LinearSystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        LinearSystemRepr { dimension: self.dim(), variable: self.variable(), matrix: self.matrix.clone() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LinearSystem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = LinearSystemRepr::deserialize(deserializer)?;
        let sys = LinearSystem::new(r.matrix.with_var(r.variable)).map_err(serde::de::Error::custom)?;
        if sys.dim() != r.dimension {
            return Err(serde::de::Error::custom("dimension does not match the matrix"));
        }
        Ok(sys)
    }
}

/// `y⁽ⁿ⁾ + a_{n−1}y⁽ⁿ⁻¹⁾ + … + a₀y = 0`; `coeffs[k]` is `a_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarODE {
    coeffs: Vec<ExactRatFunc>,
}

impl ScalarODE {
    pub fn new(coeffs: Vec<ExactRatFunc>) -> Result<Self, VariationalError> {
        if coeffs.is_empty() {
            return Err(VariationalError::Shape("order must be at least 1".into()));
        }
        Ok(ScalarODE { coeffs })
    }

    /// From `b_n y⁽ⁿ⁾ + … + b₀ y = 0`, dividing by `b_n`.
    pub fn from_unnormalized(b: &[ExactRatFunc]) -> Result<Self, VariationalError> {
        let (lead, rest) = b.split_last().ok_or_else(|| VariationalError::Shape("empty coefficient list".into()))?;
        let inv = lead.inv().ok_or_else(|| VariationalError::Shape("zero leading coefficient".into()))?;
        Self::new(rest.iter().map(|c| c * &inv).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[ExactRatFunc] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &ExactRatFunc {
        &self.coeffs[k]
    }

    pub fn variable(&self) -> Var {
        self.coeffs[0].variable()
    }
}

impl std::fmt::Display for ScalarODE {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "y^({})", self.order())?;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if !c.is_zero() {
                write!(f, " + ({c})*y^({k})")?;
            }
        }
        write!(f, " = 0")
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarOdeRepr {
    order: usize,
    variable: Var,
    coefficients: Vec<ExactRatFunc>,
}

impl Serialize for ScalarODE {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ScalarOdeRepr { order: self.order(), variable: self.variable(), coefficients: self.coeffs.clone() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ScalarODE {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = ScalarOdeRepr::deserialize(deserializer)?;
        if r.order != r.coefficients.len() {
            return Err(serde::de::Error::custom("order does not match the coefficient count"));
        }
        let v = r.variable;
        ScalarODE::new(r.coefficients.into_iter().map(|c| c.with_var(v)).collect()).map_err(serde::de::Error::custom)
    }
}

/// An invertible `Q(t)` with its exact inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeMatrix {
    q: ExactMatrix,
    inv: ExactMatrix,
}

impl GaugeMatrix {
    pub fn new(q: ExactMatrix) -> Result<Self, VariationalError> {
        if !q.is_square() {
            return Err(VariationalError::Shape("gauge matrix must be square".into()));
        }
        let inv = q.inverse().map_err(|e| match e {
            ExactError::Singular => VariationalError::SingularGauge,
            e => e.into(),
        })?;
        Ok(GaugeMatrix { q, inv })
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.q
    }

    pub fn inverse(&self) -> &ExactMatrix {
        &self.inv
    }

    pub fn determinant(&self) -> ExactRatFunc {
        self.q.determinant().expect("square")
    }

    /// `Q₁Q₂`.
    pub fn compose(&self, other: &GaugeMatrix) -> Result<GaugeMatrix, VariationalError> {
        Ok(GaugeMatrix { q: self.q.try_mul(&other.q)?, inv: other.inv.try_mul(&self.inv)? })
    }
}

impl Serialize for GaugeMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.q.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GaugeMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        GaugeMatrix::new(ExactMatrix::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}
