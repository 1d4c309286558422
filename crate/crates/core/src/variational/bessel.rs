//! Closed-form solutions of `η'' + 2iatη' + iaη = 0` through Bessel functions of order 1/4.

use complex_bessel::{besselj, bessely};
use num_complex::Complex64;

use super::VariationalError;

/// `σ(a, t) = BESSEL_ARGUMENT_SCALE · a t²`, fixed by the residual oracle in the tests.
pub const BESSEL_ARGUMENT_SCALE: f64 = 0.5;

const NU: f64 = 0.25;

fn bessel_pair(nu: f64, x: Complex64, c1: Complex64, c2: Complex64) -> Result<Complex64, VariationalError> {
    let err = |e| VariationalError::Bessel(format!("{e:?}"));
    Ok(c1 * besselj(nu, x).map_err(err)? + c2 * bessely(nu, x).map_err(err)?)
}

/// `(η, η', η'')` for `η = √t e^{−iat²/2}[C₁J_{1/4}(σ) + C₂Y_{1/4}(σ)]`, `σ = scale·a t²`.
pub fn bessel_closed_form_jet(
    a: Complex64,
    c1: Complex64,
    c2: Complex64,
    t: f64,
    scale: f64,
) -> Result<[Complex64; 3], VariationalError> {
    if !(t > 0.0) {
        return Err(VariationalError::InvalidParameter(format!("t = {t} must be positive")));
    }
    let beta = a * scale;
    let x = beta * t * t;
    if x.norm() == 0.0 {
        return Err(VariationalError::InvalidParameter("a must be nonzero".into()));
    }
    let z = bessel_pair(NU, x, c1, c2)?;
    // Z' = Z_{ν−1} − (ν/x)Z, and Z'' from Bessel's equation.
    let dz = bessel_pair(NU - 1.0, x, c1, c2)? - z * NU / x;
    let ddz = -dz / x - (1.0 - NU * NU / (x * x)) * z;
    let (g, dg, ddg) = (z, 2.0 * beta * t * dz, 2.0 * beta * dz + 4.0 * beta * beta * t * t * ddz);
    let r = t.sqrt();
    let w = r * g;
    let dw = g / (2.0 * r) + r * dg;
    let ddw = -g / (4.0 * t * r) + dg / r + r * ddg;
    let i = Complex64::i();
    let s = -i * a * t * t / 2.0;
    let (ds, dds) = (-i * a * t, -i * a);
    let e = s.exp();
    Ok([w * e, (dw + ds * w) * e, (ddw + 2.0 * ds * dw + (dds + ds * ds) * w) * e])
}

/// The closed-form solution at `t > 0` with the fixed argument convention.
pub fn bessel_closed_form(a: Complex64, c1: Complex64, c2: Complex64, t: f64) -> Result<Complex64, VariationalError> {
    Ok(bessel_closed_form_jet(a, c1, c2, t, BESSEL_ARGUMENT_SCALE)?[0])
}
