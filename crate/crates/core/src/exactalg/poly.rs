//! Dense univariate polynomials over ℚ(i).

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use num_traits::Zero;

use super::scalar::{mulmod, powmod};
use super::{ExactError, ExactScalar};

/// Name tag of the independent variable. Only used for printing; arithmetic
/// between polynomials carrying different tags keeps the left operand's tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Var {
    #[default]
    #[serde(rename = "t")]
    T,
    #[serde(rename = "tau")]
    Tau,
    #[serde(rename = "x")]
    X,
    #[serde(rename = "lambda")]
    Lambda,
}

impl Var {
    pub fn symbol(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::Tau => "τ",
            Var::X => "x",
            Var::Lambda => "λ",
        }
    }
}

/// Coefficients in ascending degree order. The coefficient vector never has a
/// trailing zero, so the zero polynomial is the empty vector.
#[derive(Clone, Default)]
pub struct ExactPoly {
    coeffs: Vec<ExactScalar>,
    var: Var,
}

impl PartialEq for ExactPoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for ExactPoly {}

impl Hash for ExactPoly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl ExactPoly {
    pub fn new(coeffs: Vec<ExactScalar>, var: Var) -> Self {
        let mut p = ExactPoly { coeffs, var };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(ExactScalar::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn zero(var: Var) -> Self {
        ExactPoly { coeffs: Vec::new(), var }
    }

    pub fn one(var: Var) -> Self {
        Self::constant(ExactScalar::one(), var)
    }

    pub fn constant(c: ExactScalar, var: Var) -> Self {
        Self::new(vec![c], var)
    }

    /// The indeterminate itself.
    pub fn var(var: Var) -> Self {
        Self::monomial(ExactScalar::one(), 1, var)
    }

    pub fn monomial(c: ExactScalar, deg: usize, var: Var) -> Self {
        if c.is_zero() {
            return Self::zero(var);
        }
        let mut coeffs = vec![ExactScalar::zero(); deg + 1];
        coeffs[deg] = c;
        ExactPoly { coeffs, var }
    }

    pub fn from_i64(coeffs: &[i64], var: Var) -> Self {
        Self::new(coeffs.iter().map(|&c| ExactScalar::from_i64(c)).collect(), var)
    }

    pub fn variable(&self) -> Var {
        self.var
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    /// Parses the [`Display`](fmt::Display) form, e.g. `-4*t^2 + (1/2-i)*t + 3`.
    /// Any variable symbol is accepted and the result is tagged with `var`.
    pub fn parse(s: &str, var: Var) -> Result<Self, ExactError> {
        let bad = || ExactError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut terms = Vec::new();
        let (mut depth, mut start) = (0i32, 0usize);
        let mut prev = None;
        for (k, c) in t.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                '+' | '-' if depth == 0 && k > 0 && !matches!(prev, Some('*' | '^' | '/' | '(')) => {
                    terms.push(&t[start..k]);
                    start = k;
                }
                _ => {}
            }
            prev = Some(c);
        }
        terms.push(&t[start..]);
        let mut out = ExactPoly::zero(var);
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, term.strip_prefix('+').unwrap_or(term)),
            };
            if body.is_empty() {
                return Err(bad());
            }
            let mut coef = ExactScalar::one();
            let mut deg = 0usize;
            for f in split_factors(body) {
                if let Some(inner) = f.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
                    coef = &coef * &inner.parse::<ExactScalar>()?;
                } else if f == "i" {
                    coef = &coef * &ExactScalar::i();
                } else if let Some(k) = var_power(f) {
                    deg += k.ok_or_else(bad)?;
                } else {
                    coef = &coef * &f.parse::<ExactScalar>()?;
                }
            }
            if neg {
                coef = -coef;
            }
            out = &out + &ExactPoly::monomial(coef, deg, var);
        }
        Ok(out)
    }

    pub fn coeffs(&self) -> &[ExactScalar] {
        &self.coeffs
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> ExactScalar {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn leading_coeff(&self) -> ExactScalar {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.var);
        }
        ExactPoly { coeffs: self.coeffs.iter().map(|a| a * c).collect(), var: self.var }
    }

    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => self.scale(&lc.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Multiplication by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![ExactScalar::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        ExactPoly { coeffs, var: self.var }
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * &ExactScalar::from_i64(k as i64))
            .collect();
        Self::new(coeffs, self.var)
    }

    /// Coefficient-wise complex conjugate.
    pub fn conj(&self) -> Self {
        ExactPoly { coeffs: self.coeffs.iter().map(ExactScalar::conj).collect(), var: self.var }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.var);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &ExactScalar) -> ExactScalar {
        let mut acc = ExactScalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c.to_complex())
    }

    pub fn to_complex_coeffs(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(ExactScalar::to_complex).collect()
    }

    /// Euclidean division: `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &ExactPoly) -> (ExactPoly, ExactPoly) {
        let dd = d.degree().expect("polynomial division by zero");
        let Some(n) = self.degree() else {
            return (Self::zero(self.var), Self::zero(self.var));
        };
        if n < dd {
            return (Self::zero(self.var), self.clone());
        }
        let inv_lc = d.leading_coeff().inv().expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![ExactScalar::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let c = &rem[k + dd] * &inv_lc;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &(&c * dc);
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot, self.var), Self::new(rem, self.var))
    }

    pub fn rem(&self, d: &ExactPoly) -> ExactPoly {
        self.div_rem(d).1
    }

    /// Exact quotient; panics in debug builds when the division leaves a remainder.
    pub fn exact_div(&self, d: &ExactPoly) -> ExactPoly {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, other: &ExactPoly) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(a: &ExactPoly, b: &ExactPoly) -> ExactPoly {
        if a.is_constant() && !a.is_zero() || b.is_constant() && !b.is_zero() {
            return Self::one(a.var);
        }
        if !a.is_zero() && !b.is_zero() && coprime_mod_p(a, b) {
            return Self::one(a.var);
        }
        let (mut x, mut y) = (a.monic(), b.monic());
        while !y.is_zero() {
            let r = x.rem(&y).monic();
            x = y;
            y = r;
        }
        x
    }

    /// Monic least common multiple; `lcm(a, 0) = 0`.
    pub fn lcm(a: &ExactPoly, b: &ExactPoly) -> ExactPoly {
        if a.is_zero() || b.is_zero() {
            return Self::zero(a.var);
        }
        (&a.exact_div(&Self::gcd(a, b)) * b).monic()
    }

    /// Returns `(g, s, t)` with `s·a + t·b = g = gcd(a, b)` and `g` monic.
    pub fn ext_gcd(a: &ExactPoly, b: &ExactPoly) -> (ExactPoly, ExactPoly, ExactPoly) {
        let var = a.var;
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Self::one(var), Self::zero(var));
        let (mut t0, mut t1) = (Self::zero(var), Self::one(var));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.leading_coeff().inv().unwrap();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Inverse of `self` modulo `m`, when `gcd(self, m) = 1`.
    pub fn inv_mod(&self, m: &ExactPoly) -> Option<ExactPoly> {
        let (g, s, _) = Self::ext_gcd(&self.rem(m), m);
        g.is_one().then(|| s.rem(m))
    }

    /// Yun's square-free decomposition: `monic(self) = Π fₖᵏ` with each `fₖ`
    /// square-free and pairwise coprime. Factors equal to 1 are omitted.
    pub fn squarefree_decomposition(&self) -> Vec<(ExactPoly, usize)> {
        let mut out = Vec::new();
        if self.is_constant() {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = Self::gcd(&f, &df);
        let mut b = f.exact_div(&a0);
        let mut c = df.exact_div(&a0);
        let mut d = &c - &b.derivative();
        let mut k = 1;
        while !b.is_constant() {
            let a = Self::gcd(&b, &d);
            if !a.is_constant() {
                out.push((a.clone(), k));
            }
            b = b.exact_div(&a);
            c = d.exact_div(&a);
            d = &c - &b.derivative();
            k += 1;
        }
        out
    }

    /// Product of the distinct monic irreducible factors.
    pub fn squarefree_part(&self) -> ExactPoly {
        if self.is_constant() {
            return Self::one(self.var);
        }
        let f = self.monic();
        f.exact_div(&Self::gcd(&f, &f.derivative()))
    }

    /// Substitute `x ↦ x + shift`.
    pub fn taylor_shift(&self, shift: &ExactScalar) -> ExactPoly {
        let mut acc = Self::zero(self.var);
        let lin = Self::new(vec![shift.clone(), ExactScalar::one()], self.var);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Self::constant(c.clone(), self.var);
        }
        acc
    }
}

impl Add for &ExactPoly {
    type Output = ExactPoly;
    fn add(self, rhs: &ExactPoly) -> ExactPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| match (self.coeffs.get(k), rhs.coeffs.get(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        ExactPoly::new(coeffs, self.var)
    }
}

impl Sub for &ExactPoly {
    type Output = ExactPoly;
    fn sub(self, rhs: &ExactPoly) -> ExactPoly {
        self + &(-rhs)
    }
}

impl Neg for &ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        ExactPoly { coeffs: self.coeffs.iter().map(|c| -c).collect(), var: self.var }
    }
}

impl Mul for &ExactPoly {
    type Output = ExactPoly;
    fn mul(self, rhs: &ExactPoly) -> ExactPoly {
        if self.is_zero() || rhs.is_zero() {
            return ExactPoly::zero(self.var);
        }
        let mut coeffs = vec![ExactScalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += &(a * b);
                }
            }
        }
        ExactPoly::new(coeffs, self.var)
    }
}

macro_rules! owned_ops {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait for ExactPoly {
            type Output = ExactPoly;
            fn $method(self, rhs: ExactPoly) -> ExactPoly {
                (&self).$method(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        -&self
    }
}

/// Human-readable form, highest degree first, e.g. `3456*τ^15 - 271680*τ^13`.
impl fmt::Display for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let v = self.var.symbol();
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let s = c.to_string();
            let compound = !c.is_real() && !c.im().is_zero() && !c.re().is_zero();
            let (sign, body) = match s.strip_prefix('-') {
                Some(rest) if !compound => ("-", rest.to_string()),
                _ => ("+", if compound { format!("({s})") } else { s }),
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let unit = body == "1";
            match k {
                0 => write!(f, "{body}")?,
                1 if unit => write!(f, "{v}")?,
                1 => write!(f, "{body}*{v}")?,
                _ if unit => write!(f, "{v}^{k}")?,
                _ => write!(f, "{body}*{v}^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Serialized as a degree-ascending JSON array of scalar strings.
impl Serialize for ExactPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactPoly {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let coeffs = Vec::<ExactScalar>::deserialize(deserializer)?;
        Ok(ExactPoly::new(coeffs, Var::default()))
    }
}

fn split_factors(body: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (k, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                out.push(&body[start..k]);
                start = k + 1;
            }
            _ => {}
        }
    }
    out.push(&body[start..]);
    out
}

/// `Some(Some(k))` for `v` or `v^k` with a variable symbol, `Some(None)` for a
/// malformed exponent, `None` if `f` is not a variable factor.
fn var_power(f: &str) -> Option<Option<usize>> {
    let (base, exp) = match f.split_once('^') {
        Some((b, e)) => (b, Some(e)),
        None => (f, None),
    };
    if !matches!(base, "t" | "τ" | "tau" | "x" | "λ" | "lambda") {
        return None;
    }
    Some(match exp {
        None => Some(1),
        Some(e) => e.parse().ok(),
    })
}

/// Primes `p ≡ 1 (mod 4)`, so that ℚ(i) maps into 𝔽_p.
const MOD_PRIMES: [u64; 2] = [998_244_353, 1_004_535_809];

/// Coefficient images with the leading coefficient kept nonzero, so that
/// the degree of a gcd mod `p` bounds the true degree from above.
fn mod_image(f: &ExactPoly, p: u64, r: u64) -> Option<Vec<u64>> {
    let img = f.coeffs.iter().map(|c| c.mod_image(p, r)).collect::<Option<Vec<_>>>()?;
    (*img.last()? != 0).then_some(img)
}

fn trim_mod(f: &mut Vec<u64>) {
    while f.last() == Some(&0) {
        f.pop();
    }
}

/// `true` only when `gcd(a, b) = 1` is certain.
fn coprime_mod_p(a: &ExactPoly, b: &ExactPoly) -> bool {
    MOD_PRIMES.iter().any(|&p| {
        // A generator of 𝔽_p^× to the (p−1)/4 is a square root of −1.
        let r = powmod(3, (p - 1) / 4, p);
        let (Some(mut x), Some(mut y)) = (mod_image(a, p, r), mod_image(b, p, r)) else {
            return false;
        };
        while !y.is_empty() {
            let inv = powmod(*y.last().unwrap(), p - 2, p);
            while x.len() >= y.len() {
                let c = mulmod(*x.last().unwrap(), inv, p);
                let shift = x.len() - y.len();
                for (j, &yc) in y.iter().enumerate() {
                    x[shift + j] = (x[shift + j] + p - mulmod(c, yc, p)) % p;
                }
                trim_mod(&mut x);
            }
            std::mem::swap(&mut x, &mut y);
        }
        x.len() == 1
    })
}
