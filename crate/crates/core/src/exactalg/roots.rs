//! Numeric roots of exact polynomials, and exact recovery of roots in ℚ(i).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};

use super::{ExactError, ExactPoly, ExactScalar};

const MAX_ITER: usize = 500;

/// All roots of `p` with multiplicity.
///
/// Multiplicities come from an exact square-free decomposition; each
/// square-free factor is solved by Aberth iteration and polished by Newton
/// steps. Every returned root satisfies `|p(r)| ≤ tol · Σ|aₖ||r|ᵏ` for its
/// square-free factor.
pub fn poly_roots_numeric(p: &ExactPoly, tol: f64) -> Result<Vec<Complex64>, ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let mut roots = Vec::new();
    for (factor, mult) in p.squarefree_decomposition() {
        let coeffs = factor.to_complex_coeffs();
        let r = aberth(&coeffs)?;
        for z in &r {
            let resid = horner(&coeffs, *z).norm();
            let scale: f64 = coeffs.iter().enumerate().map(|(k, c)| c.norm() * z.norm().powi(k as i32)).sum();
            if resid > tol * scale.max(f64::MIN_POSITIVE) {
                return Err(ExactError::RootsNotConverged { residual: resid / scale });
            }
        }
        for z in r {
            roots.extend(std::iter::repeat(z).take(mult));
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::zero(), |acc, &a| acc * z + a)
}

fn horner_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Aberth–Ehrlich simultaneous iteration for a polynomial with simple roots.
fn aberth(c: &[Complex64]) -> Result<Vec<Complex64>, ExactError> {
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lc = c[n];
    let monic: Vec<Complex64> = c.iter().map(|a| a / lc).collect();
    if n == 1 {
        return Ok(vec![-monic[0]]);
    }
    // Cauchy bound for the initial circle.
    let radius = 1.0 + monic[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(0.5 * radius, theta)
        })
        .collect();
    for _ in 0..MAX_ITER {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = horner_with_derivative(&monic, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    // Newton polish against the original coefficients.
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner_with_derivative(c, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            *r -= step;
        }
    }
    if z.iter().any(|r| !r.is_finite()) {
        return Err(ExactError::RootsNotConverged { residual: f64::INFINITY });
    }
    Ok(z)
}

/// Roots of a polynomial that lie in ℚ(i), found exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianRoots {
    /// Distinct roots with multiplicity.
    pub roots: Vec<(ExactScalar, usize)>,
    /// Number of roots (with multiplicity) outside ℚ(i).
    pub other: usize,
}

/// Exact roots in ℚ(i): numeric candidates are snapped to the lattice
/// `ℤ[i]/aₙ` given by the rational root theorem and verified by exact
/// evaluation, so a reported root is always a true root.
pub fn gaussian_rational_roots(p: &ExactPoly) -> Result<GaussianRoots, ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let mut roots = Vec::new();
    let mut other = 0;
    for (factor, mult) in p.squarefree_decomposition() {
        let f = integral_multiple(&factor);
        let lc = f.leading_coeff();
        let approx = aberth(&f.to_complex_coeffs())?;
        let lcc = lc.to_complex();
        let mut found = 0;
        for z in approx {
            let w = lcc * z;
            let g = ExactScalar::new(round_big(w.re), round_big(w.im));
            let cand = &g / &lc;
            if f.eval(&cand).is_zero() && !roots.iter().any(|(r, _)| *r == cand) {
                roots.push((cand, mult));
                found += 1;
            }
        }
        other += (factor.degree().unwrap() - found) * mult;
    }
    roots.sort_by(|a, b| a.0.re().cmp(b.0.re()).then(a.0.im().cmp(b.0.im())));
    Ok(GaussianRoots { roots, other })
}

fn round_big(x: f64) -> BigRational {
    BigRational::from_integer(BigInt::from_f64(x.round()).unwrap_or_default())
}

/// Scales `p` by the lcm of its coefficient denominators so all coefficients
/// are Gaussian integers.
pub fn integral_multiple(p: &ExactPoly) -> ExactPoly {
    let mut l = BigInt::one();
    for c in p.coeffs() {
        l = l.lcm(c.re().denom());
        l = l.lcm(c.im().denom());
    }
    p.scale(&ExactScalar::from_bigint(l))
}
