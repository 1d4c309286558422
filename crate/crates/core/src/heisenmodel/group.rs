//! The Heisenberg group in exponential coordinates.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        GroupElement { x, y, z }
    }

    /// Rotation by `theta` about the z-axis, an automorphism of the group.
    pub fn rotate(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        GroupElement { x: c * self.x - s * self.y, y: s * self.x + c * self.y, z: self.z }
    }
}

/// `(x₁,y₁,z₁)·(x₂,y₂,z₂) = (x₁+x₂, y₁+y₂, z₁+z₂+½(x₁y₂−x₂y₁))`.
pub fn group_mul(g: &GroupElement, h: &GroupElement) -> GroupElement {
    GroupElement { x: g.x + h.x, y: g.y + h.y, z: g.z + h.z + 0.5 * (g.x * h.y - h.x * g.y) }
}

pub fn group_inv(g: &GroupElement) -> GroupElement {
    GroupElement { x: -g.x, y: -g.y, z: -g.z }
}

/// `ρ = √((x²+y²)² + 16z²)`.
pub fn rho(g: &GroupElement) -> f64 {
    let s = g.x * g.x + g.y * g.y;
    (s * s + 16.0 * g.z * g.z).sqrt()
}

/// First and second partial derivatives of ρ with respect to (x, y, z).
pub(crate) fn rho_derivatives(g: &GroupElement) -> (f64, [f64; 3], [[f64; 3]; 3]) {
    let GroupElement { x, y, z } = *g;
    let s = x * x + y * y;
    let r = (s * s + 16.0 * z * z).sqrt();
    // f = ρ²; ρᵢ = fᵢ/(2ρ); ρᵢⱼ = fᵢⱼ/(2ρ) − fᵢfⱼ/(4ρ³)
    let f1 = [4.0 * s * x, 4.0 * s * y, 32.0 * z];
    let f2 = [
        [4.0 * s + 8.0 * x * x, 8.0 * x * y, 0.0],
        [8.0 * x * y, 4.0 * s + 8.0 * y * y, 0.0],
        [0.0, 0.0, 32.0],
    ];
    let grad = f1.map(|fi| fi / (2.0 * r));
    let mut hess = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            hess[i][j] = f2[i][j] / (2.0 * r) - f1[i] * f1[j] / (4.0 * r * r * r);
        }
    }
    (r, grad, hess)
}
