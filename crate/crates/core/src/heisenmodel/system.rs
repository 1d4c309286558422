//! System specifications and phase-space states.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::group::GroupElement;
use super::potential::{BiPoly, PotentialRepr, PotentialSpec};
use super::ModelError;
use crate::exactalg::ExactScalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SystemKind {
    #[serde(rename = "one-body")]
    OneBody,
    #[serde(rename = "two-body")]
    TwoBody,
}

impl SystemKind {
    pub fn bodies(self) -> usize {
        match self {
            SystemKind::OneBody => 1,
            SystemKind::TwoBody => 2,
        }
    }

    /// Phase-space dimension.
    pub fn dim(self) -> usize {
        6 * self.bodies()
    }
}

/// A one- or two-body system with potential `V = W(z, ρ)`; for two bodies
/// `(z, ρ)` are taken from the relative element `g₁⁻¹·g₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub kind: SystemKind,
    pub kappa: f64,
    pub m1: f64,
    pub m2: f64,
    pub potential: PotentialSpec,
    kepler: bool,
}

impl SystemSpec {
    pub fn new(kind: SystemKind, kappa: f64, m1: f64, m2: f64, potential: PotentialSpec) -> Result<Self, ModelError> {
        Self::validate(kappa, m1, m2)?;
        Ok(SystemSpec { kind, kappa, m1, m2, potential, kepler: false })
    }

    fn validate(kappa: f64, m1: f64, m2: f64) -> Result<(), ModelError> {
        if kappa == 0.0 || !kappa.is_finite() {
            return Err(ModelError::InvalidSpec("kappa must be finite and nonzero".into()));
        }
        if !(m1 > 0.0 && m2 > 0.0 && m1.is_finite() && m2.is_finite()) {
            return Err(ModelError::InvalidSpec("masses must be positive".into()));
        }
        Ok(())
    }

    /// One-body Kepler–Heisenberg system, `W = −κ/ρ`.
    pub fn kepler(kappa: f64) -> Result<Self, ModelError> {
        Self::kepler_like(SystemKind::OneBody, kappa, 1.0, 1.0)
    }

    /// Two-body system with `W = −κ m₁ m₂/ρ`.
    pub fn kepler_two_body(kappa: f64, m1: f64, m2: f64) -> Result<Self, ModelError> {
        Self::kepler_like(SystemKind::TwoBody, kappa, m1, m2)
    }

    fn kepler_like(kind: SystemKind, kappa: f64, m1: f64, m2: f64) -> Result<Self, ModelError> {
        Self::validate(kappa, m1, m2)?;
        let mut k = exact(kappa)?;
        if kind == SystemKind::TwoBody {
            k = &(&k * &exact(m1)?) * &exact(m2)?;
        }
        let potential = PotentialSpec::inverse_rho(-k);
        Ok(SystemSpec { kind, kappa, m1, m2, potential, kepler: true })
    }

    pub fn is_kepler(&self) -> bool {
        self.kepler
    }

    pub fn masses(&self) -> Vec<f64> {
        match self.kind {
            SystemKind::OneBody => vec![1.0],
            SystemKind::TwoBody => vec![self.m1, self.m2],
        }
    }

    /// `μ = m₁/m₂`.
    pub fn mass_ratio(&self) -> f64 {
        self.m1 / self.m2
    }

    pub fn from_json(s: &str) -> Result<Self, ModelError> {
        serde_json::from_str(s).map_err(|e| ModelError::InvalidSpec(e.to_string()))
    }
}

pub(crate) fn exact(x: f64) -> Result<ExactScalar, ModelError> {
    ExactScalar::from_f64(x).ok_or_else(|| ModelError::InvalidSpec(format!("non-finite value {x}")))
}

#[derive(Serialize, Deserialize)]
struct SystemRepr {
    kind: SystemKind,
    kappa: f64,
    #[serde(default = "one")]
    m1: f64,
    #[serde(default = "one")]
    m2: f64,
    potential: PotentialRepr,
}

fn one() -> f64 {
    1.0
}

impl Serialize for SystemSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let potential = if self.kepler { PotentialRepr::Named("kepler".into()) } else { self.potential.to_repr() };
        SystemRepr { kind: self.kind, kappa: self.kappa, m1: self.m1, m2: self.m2, potential }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SystemSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = SystemRepr::deserialize(deserializer)?;
        match r.potential {
            PotentialRepr::Named(name) if name == "kepler" => SystemSpec::kepler_like(r.kind, r.kappa, r.m1, r.m2),
            PotentialRepr::Named(name) => return Err(D::Error::custom(format!("unknown potential preset {name:?}"))),
            PotentialRepr::Table { numerator, denominator } => PotentialSpec::new(
                BiPoly::from_terms(numerator),
                BiPoly::from_terms(denominator),
            )
            .and_then(|w| SystemSpec::new(r.kind, r.kappa, r.m1, r.m2, w)),
        }
        .map_err(D::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseState1B {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseState2B {
    pub g1: GroupElement,
    pub g2: GroupElement,
    /// `(p_{x₁}, p_{y₁}, p_{z₁})`
    pub p1: [f64; 3],
    /// `(p_{x₂}, p_{y₂}, p_{z₂})`
    pub p2: [f64; 3],
}

/// Canonical phase point. The flat layout used by the integrators is all
/// positions followed by all momenta.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseState {
    OneBody(PhaseState1B),
    TwoBody(PhaseState2B),
}

impl PhaseState {
    pub fn kind(&self) -> SystemKind {
        match self {
            PhaseState::OneBody(_) => SystemKind::OneBody,
            PhaseState::TwoBody(_) => SystemKind::TwoBody,
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            PhaseState::OneBody(s) => vec![s.x, s.y, s.z, s.px, s.py, s.pz],
            PhaseState::TwoBody(s) => vec![
                s.g1.x, s.g1.y, s.g1.z, s.g2.x, s.g2.y, s.g2.z, s.p1[0], s.p1[1], s.p1[2], s.p2[0], s.p2[1], s.p2[2],
            ],
        }
    }

    pub fn from_slice(kind: SystemKind, v: &[f64]) -> Result<Self, ModelError> {
        if v.len() != kind.dim() {
            return Err(ModelError::Dimension { expected: kind.dim(), found: v.len() });
        }
        Ok(match kind {
            SystemKind::OneBody => {
                PhaseState::OneBody(PhaseState1B { x: v[0], y: v[1], z: v[2], px: v[3], py: v[4], pz: v[5] })
            }
            SystemKind::TwoBody => PhaseState::TwoBody(PhaseState2B {
                g1: GroupElement::new(v[0], v[1], v[2]),
                g2: GroupElement::new(v[3], v[4], v[5]),
                p1: [v[6], v[7], v[8]],
                p2: [v[9], v[10], v[11]],
            }),
        })
    }

    pub fn is_finite(&self) -> bool {
        self.to_vec().iter().all(|v| v.is_finite())
    }
}

impl From<PhaseState1B> for PhaseState {
    fn from(s: PhaseState1B) -> Self {
        PhaseState::OneBody(s)
    }
}

impl From<PhaseState2B> for PhaseState {
    fn from(s: PhaseState2B) -> Self {
        PhaseState::TwoBody(s)
    }
}
