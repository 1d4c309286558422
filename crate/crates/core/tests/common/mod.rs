//! Seeded initial data shared by the integration tests.
#![allow(dead_code)]

use heisenkep::heisenmodel::{dilation_j, hamiltonian_flat, kinetic_energy, potential_argument, rho, SystemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 20_240_611;

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

pub fn random_state(spec: &SystemSpec, r: &mut ChaCha8Rng, scale: f64) -> Vec<f64> {
    (0..spec.kind.dim()).map(|_| r.gen_range(-scale..scale)).collect()
}

/// Rescales the momenta of `y` so that `H = target`; `None` if impossible.
pub fn with_energy(spec: &SystemSpec, y: &[f64], target: f64) -> Option<Vec<f64>> {
    let n = y.len() / 2;
    let t = kinetic_energy(y, &spec.masses());
    let v = hamiltonian_flat(spec, y).ok()? - t;
    let lam2 = (target - v) / t;
    if !(lam2 > 0.0) {
        return None;
    }
    let lam = lam2.sqrt();
    let mut out = y.to_vec();
    for p in &mut out[n..] {
        *p *= lam;
    }
    Some(out)
}

/// A state with energy `h` whose dilation integral satisfies `J·sgn ≥ j_min`
/// and whose separation is at least `rho_min`.
pub fn state_with(spec: &SystemSpec, stream: u64, h: f64, j_min: f64, rho_min: f64) -> Vec<f64> {
    let mut r = rng(stream);
    loop {
        let y = random_state(spec, &mut r, 1.0);
        let n = y.len() / 2;
        if rho(&potential_argument(spec.kind, &y[..n])) < rho_min {
            continue;
        }
        if let Some(y) = with_energy(spec, &y, h) {
            if dilation_j(&y) >= j_min {
                return y;
            }
        }
    }
}
