//! Kepler and two-body problems on the Heisenberg group: dynamics, variational
//! equations and the differential Galois obstructions to integrability.

pub mod exactalg;
pub mod galois;
pub mod heisenmodel;
pub mod dynamics;
pub mod variational;
