//! Gaussian rationals `a/b + (c/d)i`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ExactError;

/// An element of ℚ(i).
///
/// Both parts are kept as reduced `BigRational`s, so structural equality is
/// mathematical equality and the type can be hashed.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    re: BigRational,
    im: BigRational,
}

impl ExactScalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        ExactScalar { re, im }
    }

    pub fn zero() -> Self {
        ExactScalar::default()
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn i() -> Self {
        ExactScalar { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_i64(n: i64) -> Self {
        ExactScalar { re: BigRational::from_integer(n.into()), im: BigRational::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        ExactScalar { re: BigRational::new(num.into(), den.into()), im: BigRational::zero() }
    }

    /// `(re_num/re_den) + (im_num/im_den) i`
    pub fn gaussian(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        ExactScalar {
            re: BigRational::new(re_num.into(), re_den.into()),
            im: BigRational::new(im_num.into(), im_den.into()),
        }
    }

    /// The image in 𝔽_p under `i ↦ r`, where `r² ≡ −1 (mod p)`; `None` when a
    /// denominator vanishes mod `p`.
    pub(crate) fn mod_image(&self, p: u64, r: u64) -> Option<u64> {
        let part = |q: &BigRational| -> Option<u64> {
            let m = BigInt::from(p);
            let d = q.denom().mod_floor(&m).to_u64()?;
            if d == 0 {
                return None;
            }
            let n = q.numer().mod_floor(&m).to_u64()?;
            Some(mulmod(n, powmod(d, p - 2, p), p))
        };
        Some((part(&self.re)? + mulmod(part(&self.im)?, r, p)) % p)
    }

    pub fn from_rational(re: BigRational) -> Self {
        ExactScalar { re, im: BigRational::zero() }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(n))
    }

    /// Exact conversion of a finite double (every finite `f64` is a dyadic rational).
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Self::from_rational)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// The value as an integer, if it is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        (self.im.is_zero() && self.re.is_integer()).then(|| self.re.to_integer())
    }

    pub fn conj(&self) -> Self {
        ExactScalar { re: self.re.clone(), im: -self.im.clone() }
    }

    /// |z|² as an exact rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(ExactScalar { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    /// Exact square root in ℚ(i), when one exists.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.im.is_zero() {
            return if self.re.is_positive() {
                rational_sqrt(&self.re).map(Self::from_rational)
            } else {
                rational_sqrt(&-self.re.clone()).map(|r| ExactScalar { re: BigRational::zero(), im: r })
            };
        }
        // (x + iy)² = a + ib  ⇒  x² = (a + |z|)/2, y = b/(2x)
        let modulus = rational_sqrt(&self.norm_sqr())?;
        let two = BigRational::from_integer(2.into());
        let x2 = (&self.re + &modulus) / &two;
        let x = rational_sqrt(&x2)?;
        if x.is_zero() {
            return None;
        }
        let y = &self.im / (&two * &x);
        Some(ExactScalar { re: x, im: y })
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large numerators and denominators: scale down before dividing.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::from_i64(n)
    }
}

impl From<BigRational> for ExactScalar {
    fn from(r: BigRational) -> Self {
        Self::from_rational(r)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<'a> $trait<&'a ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &'a ExactScalar) -> ExactScalar {
                let f: fn(&ExactScalar, &ExactScalar) -> ExactScalar = $body;
                f(self, rhs)
            }
        }
        impl $trait<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &'a ExactScalar) -> ExactScalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| ExactScalar { re: &a.re + &b.re, im: &a.im + &b.im });
forward_binop!(Sub, sub, |a, b| ExactScalar { re: &a.re - &b.re, im: &a.im - &b.im });
forward_binop!(Mul, mul, |a, b| {
    if a.im.is_zero() && b.im.is_zero() {
        return ExactScalar { re: &a.re * &b.re, im: BigRational::zero() };
    }
    ExactScalar {
        re: &a.re * &b.re - &a.im * &b.im,
        im: &a.re * &b.im + &a.im * &b.re,
    }
});
forward_binop!(Div, div, |a, b| a * &b.inv().expect("division by zero in ℚ(i)"));

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar { re: -self.re, im: -self.im }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, rhs: &ExactScalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&ExactScalar> for ExactScalar {
    fn mul_assign(&mut self, rhs: &ExactScalar) {
        *self = &*self * rhs;
    }
}

impl Zero for ExactScalar {
    fn zero() -> Self {
        ExactScalar::zero()
    }
    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }
}

impl One for ExactScalar {
    fn one() -> Self {
        ExactScalar::one()
    }
}

/// Serialized as `a/b+c/d*i`, omitting zero parts; zero is `0`.
impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}*i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}{}*i", self.re, self.im)
                } else {
                    write!(f, "{}+{}*i", self.re, self.im)
                }
            }
        }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for ExactScalar {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExactError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(bad());
        }
        let parse_ratio = |p: &str| BigRational::from_str(p).map_err(|_| bad());
        let Some(body) = t.strip_suffix('i') else {
            return Ok(ExactScalar::from_rational(parse_ratio(&t)?));
        };
        let body = body.strip_suffix('*').unwrap_or(body);
        // Split at the last sign that is not a leading sign.
        let split = body
            .char_indices()
            .rev()
            .find(|&(k, c)| k > 0 && (c == '+' || c == '-') && !body[..k].ends_with(['/', '*']))
            .map(|(k, _)| k);
        let (re_part, im_part) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let im_part = im_part.strip_prefix('+').unwrap_or(im_part);
        let im = match im_part {
            "" => BigRational::one(),
            "-" => -BigRational::one(),
            p => parse_ratio(p)?,
        };
        let re = if re_part.is_empty() { BigRational::zero() } else { parse_ratio(re_part)? };
        Ok(ExactScalar { re, im })
    }
}

impl serde::Serialize for ExactScalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for ExactScalar {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> ExactScalar {
        s.parse().unwrap()
    }

    #[test]
    fn display_omits_zero_parts() {
        assert_eq!(ExactScalar::zero().to_string(), "0");
        assert_eq!(ExactScalar::from_ratio(3, 6).to_string(), "1/2");
        assert_eq!(ExactScalar::gaussian(0, 1, -2, 3).to_string(), "-2/3*i");
        assert_eq!(ExactScalar::gaussian(1, 2, 3, 4).to_string(), "1/2+3/4*i");
        assert_eq!(ExactScalar::gaussian(-1, 1, -1, 1).to_string(), "-1-1*i");
    }

    #[test]
    fn parse_accepts_emitted_and_short_forms() {
        assert_eq!(q("1/2+3/4*i"), ExactScalar::gaussian(1, 2, 3, 4));
        assert_eq!(q("-1-1*i"), ExactScalar::gaussian(-1, 1, -1, 1));
        assert_eq!(q("i"), ExactScalar::i());
        assert_eq!(q("-i"), -ExactScalar::i());
        assert_eq!(q("2-i"), ExactScalar::gaussian(2, 1, -1, 1));
        assert_eq!(q("-7/3"), ExactScalar::from_ratio(-7, 3));
        assert!("1/0".parse::<ExactScalar>().is_err());
        assert!("abc".parse::<ExactScalar>().is_err());
    }

    #[test]
    fn canonical_zero() {
        let z = q("3/4") - q("6/8");
        assert_eq!(z, ExactScalar::zero());
        assert_eq!(z.re().denom(), &BigInt::from(1));
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(q("-4").sqrt(), Some(q("2*i")));
        assert_eq!(q("9/4").sqrt(), Some(q("3/2")));
        assert_eq!(q("2*i").sqrt(), Some(q("1+1*i")));
        assert_eq!(q("2").sqrt(), None);
        let z = q("3-4*i");
        let r = z.sqrt().unwrap();
        assert_eq!(&r * &r, z);
    }

    #[test]
    fn inverse_of_i() {
        assert_eq!(ExactScalar::i().inv().unwrap(), -ExactScalar::i());
        assert!(ExactScalar::zero().inv().is_none());
    }
}

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}
