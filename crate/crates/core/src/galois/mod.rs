//! Differential Galois obstructions: Rehm's criterion for parabolic
//! cylinder equations, exponential solutions, symmetric powers with local
//! exponent bookkeeping, and the exterior-square factorization of linear
//! systems.

mod expsol;
mod exterior;
mod liouville;
mod operator;
mod rehm;
mod singular;
mod sympower;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::ExactError;
use crate::variational::VariationalError;

pub use expsol::{exp_solutions, ExpSearch, ExpSolution};
pub use exterior::{
    exterior_square, factorization_basis, plucker_check, plucker_value, system_exp_solutions, Factorization,
    SystemExpSolution,
};
pub use liouville::{liouvillian_verdict, liouvillian_verdict_o3r, mu_minus_one_operator};
pub use operator::DiffOperator;
pub use rehm::{parabolic_from_ode, rehm_classify, ParabolicParams};
pub use singular::{
    case2_obstruction, fuchsian_check, singularity_analysis, Case2Outcome, FuchsianClassification, Indicial,
    InfinityData, SingularGroup, SingularityData,
};
pub use sympower::sym_power;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaloisError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Variational(#[from] VariationalError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape: {0}")]
    Shape(String),
    #[error("solution {index} violates the Plücker relation")]
    Plucker { index: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictTag {
    /// The identity component of the Galois group is not solvable.
    NotSolvableIdentityComponent,
    /// The criterion that was run does not decide.
    Inconclusive,
}

/// One step of a verdict trace. Exact quantities are rendered as strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "criterion", rename_all = "snake_case")]
pub enum Evidence {
    Rehm {
        alpha_sq: String,
        beta_sq: String,
        gamma: String,
        ratio_sq: String,
        odd_integer: bool,
    },
    ExponentialSolutions {
        operator: String,
        found: Vec<String>,
        complete: bool,
        notes: Vec<String>,
    },
    Fuchsian {
        fuchsian: bool,
        irregular: Vec<String>,
    },
    SymmetricPower {
        power: usize,
        order: usize,
    },
    Singularities {
        leading: String,
        finite_points: usize,
        finite_exponents: Vec<Vec<String>>,
        infinity_exponents: Vec<String>,
    },
    Case2 {
        excluded: bool,
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaloisVerdict {
    pub tag: VerdictTag,
    pub evidence: Vec<Evidence>,
}

impl GaloisVerdict {
    pub fn is_not_solvable(&self) -> bool {
        self.tag == VerdictTag::NotSolvableIdentityComponent
    }
}
