//! Potentials `W(z, ρ)` stored as exact bivariate rational expressions.

use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::exactalg::ExactScalar;

/// Polynomial in `z` and `ρ`; keys are `(deg_z, deg_ρ)`, zero terms are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), ExactScalar>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, ExactScalar)>) -> Self {
        let mut p = BiPoly::zero();
        for (i, j, c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    fn add_term(&mut self, i: u32, j: u32, c: ExactScalar) {
        let e = self.terms.entry((i, j)).or_insert_with(ExactScalar::zero);
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &ExactScalar)> {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(ExactScalar::is_real)
    }

    pub fn partial_z(&self) -> Self {
        BiPoly::from_terms(
            self.terms().filter(|t| t.0 > 0).map(|(i, j, c)| (i - 1, j, c * &ExactScalar::from_i64(i as i64))),
        )
    }

    pub fn partial_rho(&self) -> Self {
        BiPoly::from_terms(
            self.terms().filter(|t| t.1 > 0).map(|(i, j, c)| (i, j - 1, c * &ExactScalar::from_i64(j as i64))),
        )
    }

    /// Evaluates in any field, mapping coefficients through `lift`.
    pub fn eval_with<T>(&self, z: &T, rho: &T, lift: impl Fn(&ExactScalar) -> T) -> T
    where
        T: Clone + Zero + One + Mul<Output = T>,
    {
        let pow = |b: &T, e: u32| (0..e).fold(T::one(), |acc, _| acc * b.clone());
        self.terms().fold(T::zero(), |acc, (i, j, c)| acc + lift(c) * pow(z, i) * pow(rho, j))
    }

    pub fn eval_exact(&self, z: &ExactScalar, rho: &ExactScalar) -> ExactScalar {
        self.eval_with(z, rho, Clone::clone)
    }

    /// Real-valued evaluation; imaginary parts of coefficients are ignored.
    pub fn eval_f64(&self, z: f64, rho: f64) -> f64 {
        self.eval_with(&z, &rho, |c| c.to_complex().re)
    }
}

/// A table row `[deg_z, deg_ρ, "coefficient"]` in the JSON format.
pub type TermRow = (u32, u32, ExactScalar);

/// `W(z, ρ) = numerator / denominator` together with the derived partials.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec {
    num: BiPoly,
    den: BiPoly,
    // Partials in the order ∂zz, ∂zρ, ∂ρρ, ∂z, ∂ρ.
    num_d: [BiPoly; 5],
    den_d: [BiPoly; 5],
}

/// Values of `W` and its partial derivatives up to order two.
#[derive(Clone, Debug, PartialEq)]
pub struct WJet<T> {
    pub w: T,
    pub wz: T,
    pub wr: T,
    pub wzz: T,
    pub wzr: T,
    pub wrr: T,
}

fn derivs(p: &BiPoly) -> [BiPoly; 5] {
    let z = p.partial_z();
    let r = p.partial_rho();
    [z.partial_z(), z.partial_rho(), r.partial_rho(), z, r]
}

impl PotentialSpec {
    /// Real rational potential; complex coefficients and a zero denominator are rejected.
    pub fn new(num: BiPoly, den: BiPoly) -> Result<Self, ModelError> {
        if den.is_zero() {
            return Err(ModelError::InvalidSpec("potential denominator is identically zero".into()));
        }
        if !num.is_real() || !den.is_real() {
            return Err(ModelError::InvalidSpec("potential coefficients must be real".into()));
        }
        let num_d = derivs(&num);
        let den_d = derivs(&den);
        Ok(PotentialSpec { num, den, num_d, den_d })
    }

    /// `W = k/ρ`.
    pub fn inverse_rho(k: ExactScalar) -> Self {
        Self::new(BiPoly::from_terms([(0, 0, k)]), BiPoly::from_terms([(0, 1, ExactScalar::one())])).unwrap()
    }

    pub fn numerator(&self) -> &BiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &BiPoly {
        &self.den
    }

    /// Jet of `W` at `(z, ρ)` in any field; `None` where the denominator vanishes.
    pub fn jet_with<T>(&self, z: &T, rho: &T, lift: impl Fn(&ExactScalar) -> T + Copy) -> Option<WJet<T>>
    where
        T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T>,
    {
        let n = self.num.eval_with(z, rho, lift);
        let d = self.den.eval_with(z, rho, lift);
        if d.is_zero() {
            return None;
        }
        let [nzz, nzr, nrr, nz, nr] = self.num_d.clone().map(|p| p.eval_with(z, rho, lift));
        let [dzz, dzr, drr, dz, dr] = self.den_d.clone().map(|p| p.eval_with(z, rho, lift));
        let two = T::one() + T::one();
        // Quotient rule, solved recursively from N = W·D.
        let w = n / d.clone();
        let wz = (nz - w.clone() * dz.clone()) / d.clone();
        let wr = (nr - w.clone() * dr.clone()) / d.clone();
        let wzz = (nzz - two.clone() * wz.clone() * dz.clone() - w.clone() * dzz) / d.clone();
        let wzr = (nzr - wz.clone() * dr.clone() - wr.clone() * dz - w.clone() * dzr) / d.clone();
        let wrr = (nrr - two * wr.clone() * dr - w.clone() * drr) / d;
        Some(WJet { w, wz, wr, wzz, wzr, wrr })
    }

    pub fn jet(&self, z: f64, rho: f64) -> Option<WJet<f64>> {
        self.jet_with(&z, &rho, |c| c.to_complex().re)
    }

    pub fn jet_exact(&self, z: &ExactScalar, rho: &ExactScalar) -> Option<WJet<ExactScalar>> {
        self.jet_with(z, rho, |c| c.clone())
    }

    pub fn eval(&self, z: f64, rho: f64) -> f64 {
        self.num.eval_f64(z, rho) / self.den.eval_f64(z, rho)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum PotentialRepr {
    Named(String),
    Table { numerator: Vec<TermRow>, denominator: Vec<TermRow> },
}

impl PotentialSpec {
    pub(crate) fn to_repr(&self) -> PotentialRepr {
        let rows = |p: &BiPoly| p.terms().map(|(i, j, c)| (i, j, c.clone())).collect();
        PotentialRepr::Table { numerator: rows(&self.num), denominator: rows(&self.den) }
    }
}
