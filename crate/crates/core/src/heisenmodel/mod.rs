//! The Heisenberg group and its Kepler-type Hamiltonian systems.

mod condition;
mod group;
mod hamiltonian;
mod integrals;
mod potential;
mod system;

pub use condition::{condition_coefficient_a, condition_coefficient_a_exact, particular_solution, ParticularParams};
pub use group::{group_inv, group_mul, rho, GroupElement};
pub use hamiltonian::{
    hamiltonian, hamiltonian_flat, kinetic_energy, kinetic_jacobian, kinetic_rhs, potential_argument,
    potential_derivatives, PotentialDerivatives, Ring,
};
pub use integrals::{
    dilation_j, first_integrals, first_integrals_flat, numeric_gradient, p_theta, poisson_bracket, two_body_integrals,
    FirstIntegrals,
};
pub use potential::{BiPoly, PotentialSpec, TermRow, WJet};
pub use system::{PhaseState, PhaseState1B, PhaseState2B, SystemKind, SystemSpec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("collision: ρ = {rho:e}")]
    Collision { rho: f64 },
    #[error("potential is singular at the evaluation point")]
    SingularPotential,
    #[error("invalid system specification: {0}")]
    InvalidSpec(String),
    #[error("state has dimension {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("the axis parameter must be nonzero (the solution would be constant)")]
    ZeroParameter,
}
