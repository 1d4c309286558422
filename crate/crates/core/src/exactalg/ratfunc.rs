//! Rational functions over ℚ(i) in canonical form.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ExactError, ExactPoly, ExactScalar, Var};

/// `num/den` with `gcd(num, den) = 1` and `den` monic. Zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactRatFunc {
    num: ExactPoly,
    den: ExactPoly,
}

impl ExactRatFunc {
    /// Builds the canonical form of `num/den`.
    pub fn new(num: ExactPoly, den: ExactPoly) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: ExactPoly, den: ExactPoly) -> Self {
        let var = den.variable();
        if num.is_zero() {
            return Self::zero(var);
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = ExactPoly::gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (num.exact_div(&g), den.exact_div(&g))
            }
        };
        let lc = den.leading_coeff();
        if lc.is_one() {
            return ExactRatFunc { num, den };
        }
        let inv = lc.inv().unwrap();
        ExactRatFunc { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn zero(var: Var) -> Self {
        ExactRatFunc { num: ExactPoly::zero(var), den: ExactPoly::one(var) }
    }

    pub fn one(var: Var) -> Self {
        Self::constant(ExactScalar::one(), var)
    }

    pub fn constant(c: ExactScalar, var: Var) -> Self {
        Self::from_poly(ExactPoly::constant(c, var))
    }

    pub fn var(var: Var) -> Self {
        Self::from_poly(ExactPoly::var(var))
    }

    pub fn from_poly(p: ExactPoly) -> Self {
        let var = p.variable();
        ExactRatFunc { num: p, den: ExactPoly::one(var) }
    }

    pub fn with_var(self, var: Var) -> Self {
        ExactRatFunc { num: self.num.with_var(var), den: self.den.with_var(var) }
    }

    pub fn num(&self) -> &ExactPoly {
        &self.num
    }

    pub fn den(&self) -> &ExactPoly {
        &self.den
    }

    pub fn variable(&self) -> Var {
        self.num.variable()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    /// The value if constant.
    pub fn as_constant(&self) -> Option<ExactScalar> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    /// The polynomial if the denominator is 1.
    pub fn as_poly(&self) -> Option<&ExactPoly> {
        self.is_polynomial().then_some(&self.num)
    }

    /// `deg num − deg den`; `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        Some(self.num.degree()? as i64 - self.den.degree().unwrap() as i64)
    }

    /// Leading coefficient of the expansion at infinity.
    pub fn leading_coeff(&self) -> ExactScalar {
        self.num.leading_coeff()
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.variable());
        }
        ExactRatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &ExactPoly) -> Self {
        if self.den.is_one() {
            return Self::from_poly(&self.num * p);
        }
        Self::normalized(&self.num * p, self.den.clone())
    }

    pub fn derivative(&self) -> Self {
        if self.den.is_one() {
            return Self::from_poly(self.num.derivative());
        }
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::normalized(num, &self.den * &self.den)
    }

    pub fn conj(&self) -> Self {
        ExactRatFunc { num: self.num.conj(), den: self.den.conj() }
    }

    pub fn pow(&self, e: u32) -> Self {
        ExactRatFunc { num: self.num.pow(e), den: self.den.pow(e) }
    }

    /// Value at `x`; `None` at a pole.
    pub fn eval(&self, x: &ExactScalar) -> Option<ExactScalar> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| &self.num.eval(x) / &d)
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        self.num.eval_complex(x) / self.den.eval_complex(x)
    }
}

impl Add for &ExactRatFunc {
    type Output = ExactRatFunc;
    fn add(self, rhs: &ExactRatFunc) -> ExactRatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return ExactRatFunc::normalized(&self.num + &rhs.num, self.den.clone());
        }
        if self.den.is_one() {
            // gcd(a·d + n, d) = gcd(n, d) = 1
            let num = &(&self.num * &rhs.den) + &rhs.num;
            return ExactRatFunc { num, den: rhs.den.clone() };
        }
        if rhs.den.is_one() {
            let num = &self.num + &(&rhs.num * &self.den);
            return ExactRatFunc { num, den: self.den.clone() };
        }
        let g = ExactPoly::gcd(&self.den, &rhs.den);
        let d1 = self.den.exact_div(&g);
        let d2 = rhs.den.exact_div(&g);
        let num = &(&self.num * &d2) + &(&rhs.num * &d1);
        ExactRatFunc::normalized(num, &(&d1 * &d2) * &g)
    }
}

impl Sub for &ExactRatFunc {
    type Output = ExactRatFunc;
    fn sub(self, rhs: &ExactRatFunc) -> ExactRatFunc {
        self + &(-rhs)
    }
}

impl Neg for &ExactRatFunc {
    type Output = ExactRatFunc;
    fn neg(self) -> ExactRatFunc {
        ExactRatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &ExactRatFunc {
    type Output = ExactRatFunc;
    fn mul(self, rhs: &ExactRatFunc) -> ExactRatFunc {
        if self.is_zero() || rhs.is_zero() {
            return ExactRatFunc::zero(self.variable());
        }
        if self.den.is_one() && rhs.den.is_one() {
            return ExactRatFunc::from_poly(&self.num * &rhs.num);
        }
        // Cross-cancel so the result needs no further gcd.
        let g1 = ExactPoly::gcd(&self.num, &rhs.den);
        let g2 = ExactPoly::gcd(&rhs.num, &self.den);
        let n1 = self.num.exact_div(&g1);
        let d2 = rhs.den.exact_div(&g1);
        let n2 = rhs.num.exact_div(&g2);
        let d1 = self.den.exact_div(&g2);
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let lc = den.leading_coeff();
        if lc.is_one() {
            ExactRatFunc { num, den }
        } else {
            let inv = lc.inv().unwrap();
            ExactRatFunc { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }
}

impl Div for &ExactRatFunc {
    type Output = ExactRatFunc;
    fn div(self, rhs: &ExactRatFunc) -> ExactRatFunc {
        self * &rhs.inv().expect("division by the zero rational function")
    }
}

macro_rules! owned_ops {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait for ExactRatFunc {
            type Output = ExactRatFunc;
            fn $method(self, rhs: ExactRatFunc) -> ExactRatFunc {
                (&self).$method(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for ExactRatFunc {
    type Output = ExactRatFunc;
    fn neg(self) -> ExactRatFunc {
        -&self
    }
}

impl From<ExactPoly> for ExactRatFunc {
    fn from(p: ExactPoly) -> Self {
        Self::from_poly(p)
    }
}

impl fmt::Display for ExactRatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for ExactRatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Serialize, Deserialize)]
struct RatFuncRepr {
    num: ExactPoly,
    den: ExactPoly,
}

impl Serialize for ExactRatFunc {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RatFuncRepr { num: self.num.clone(), den: self.den.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactRatFunc {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = RatFuncRepr::deserialize(deserializer)?;
        ExactRatFunc::new(r.num, r.den).map_err(serde::de::Error::custom)
    }
}

/// Canonical form of `f`, re-derived from its parts.
pub fn ratfunc_normalize(f: &ExactRatFunc) -> Result<ExactRatFunc, ExactError> {
    ExactRatFunc::new(f.num.clone(), f.den.clone())
}
