//! Singular points, local exponents and the exponent bookkeeping that rules
//! out solutions of the form `P(τ)∏(τ − τᵢ)^{αᵢ}`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{DiffOperator, GaloisError};
use crate::exactalg::{gaussian_rational_roots, poly_roots_numeric, ExactPoly, ExactScalar, Var};

/// Local indicial data shared by all roots of a singular group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Indicial {
    /// The same indicial polynomial (in `λ`) at every root; exponents in
    /// ℚ(i) with multiplicity, plus a count of the others.
    Exact { polynomial: ExactPoly, exponents: Vec<(ExactScalar, usize)>, other: usize },
    /// Coefficients `p_k` of `Σ p_k [r]_k` as residues modulo the group
    /// polynomial; they differ between its roots.
    RootDependent { coefficients: Vec<ExactPoly> },
}

impl Indicial {
    pub fn exact_exponents(&self) -> Option<&[(ExactScalar, usize)]> {
        match self {
            Indicial::Exact { exponents, other: 0, .. } => Some(exponents),
            _ => None,
        }
    }
}

/// Finite singular points sharing a square-free factor of the leading coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularGroup {
    /// Monic and square-free; the points are its roots.
    pub polynomial: ExactPoly,
    /// Multiplicity of each root in the cleared leading coefficient.
    pub multiplicity: usize,
    /// Pole order of `a_k` at each root, `k = 0..n−1`.
    pub pole_orders: Vec<usize>,
    /// Numerical roots as `[re, im]`.
    pub points: Vec<[f64; 2]>,
    pub regular: bool,
    /// Present for regular groups.
    pub indicial: Option<Indicial>,
}

/// Behaviour at `τ = ∞` in the local coordinate `x = 1/τ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfinityData {
    pub regular: bool,
    /// Slope-zero indicial polynomial in `α`, where solutions behave like
    /// `x^α = τ^{−α}`. Of full degree exactly when `∞` is regular.
    pub indicial: ExactPoly,
    pub exponents: Vec<(ExactScalar, usize)>,
    /// Exponents outside ℚ(i).
    pub other: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityData {
    pub order: usize,
    /// The cleared leading coefficient `b_n`; its roots are the finite singular points.
    pub leading: ExactPoly,
    pub finite: Vec<SingularGroup>,
    pub infinity: InfinityData,
}

impl SingularityData {
    pub fn finite_point_count(&self) -> usize {
        self.finite.iter().map(|g| g.polynomial.degree().unwrap_or(0)).sum()
    }

    /// Union of the exact finite exponents, ignoring multiplicities.
    pub fn finite_exponent_set(&self) -> Vec<ExactScalar> {
        let mut out: Vec<ExactScalar> = Vec::new();
        for g in &self.finite {
            if let Some(Indicial::Exact { exponents, .. }) = &g.indicial {
                for (e, _) in exponents {
                    if !out.contains(e) {
                        out.push(e.clone());
                    }
                }
            }
        }
        out.sort_by(|a, b| a.re().cmp(b.re()).then(a.im().cmp(b.im())));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuchsianClassification {
    /// Group polynomial and whether its roots are regular singular points.
    pub finite: Vec<(ExactPoly, bool)>,
    pub infinity_regular: bool,
    pub fuchsian: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case2Outcome {
    pub excluded: bool,
    pub reason: String,
}

struct Group {
    poly: ExactPoly,
    multiplicity: usize,
    orders: Vec<usize>,
}

/// Square-free groups of the leading coefficient on which every coefficient
/// has a constant pole order.
fn groups(l: &DiffOperator) -> (ExactPoly, Vec<Group>) {
    let lead = l.cleared().pop().unwrap();
    let mut parts: Vec<(ExactPoly, usize)> = lead.squarefree_decomposition();
    let den_factors: Vec<Vec<(ExactPoly, usize)>> =
        l.coeffs().iter().map(|c| c.den().squarefree_decomposition()).collect();
    for factors in &den_factors {
        for (g, _) in factors {
            parts = parts
                .into_iter()
                .flat_map(|(p, m)| {
                    let h = ExactPoly::gcd(&p, g);
                    if h.is_constant() || h.degree() == p.degree() {
                        vec![(p, m)]
                    } else {
                        let rest = p.exact_div(&h).monic();
                        vec![(h, m), (rest, m)]
                    }
                })
                .collect();
        }
    }
    // Roots in ℚ(i) form groups of their own.
    let parts: Vec<(ExactPoly, usize)> = parts
        .into_iter()
        .flat_map(|(p, m)| {
            let roots = match p.degree() {
                Some(d) if d > 1 => gaussian_rational_roots(&p).map(|r| r.roots).unwrap_or_default(),
                _ => Vec::new(),
            };
            let v = p.variable();
            let mut rest = p;
            let mut out: Vec<(ExactPoly, usize)> = Vec::new();
            for (r, _) in roots {
                let lin = &ExactPoly::var(v) - &ExactPoly::constant(r, v);
                rest = rest.exact_div(&lin).monic();
                out.push((lin, m));
            }
            if !rest.is_constant() {
                out.push((rest, m));
            }
            out
        })
        .collect();
    let groups = parts
        .into_iter()
        .map(|(poly, multiplicity)| {
            let orders = den_factors
                .iter()
                .map(|fs| fs.iter().find(|(g, _)| !ExactPoly::gcd(&poly, g).is_constant()).map_or(0, |(_, e)| *e))
                .collect();
            Group { poly, multiplicity, orders }
        })
        .collect();
    (lead, groups)
}

fn is_regular(g: &Group, n: usize) -> bool {
    g.orders.iter().enumerate().all(|(k, &o)| o <= n - k)
}

/// `Π_{j<k} (x − j)` in the given variable.
fn falling(x: &ExactPoly, k: usize) -> ExactPoly {
    (0..k).fold(ExactPoly::one(x.variable()), |acc, j| &acc * &(x - &ExactPoly::constant(ExactScalar::from_i64(j as i64), x.variable())))
}

/// Indicial data at the roots of a regular group: `p_k = lim (τ−τᵢ)^{n−k} a_k`.
fn group_indicial(l: &DiffOperator, g: &Group) -> Result<Indicial, GaloisError> {
    let n = l.order();
    let p = &g.poly;
    let dp = p.derivative();
    let mut coeffs = Vec::with_capacity(n + 1);
    for k in 0..n {
        let a = l.coeff(k);
        if g.orders[k] < n - k || a.is_zero() {
            coeffs.push(ExactPoly::zero(p.variable()));
            continue;
        }
        let e = (n - k) as u32;
        let rest = a.den().exact_div(&p.pow(e));
        let denom = (&rest * &dp.pow(e)).rem(p);
        let inv = denom.inv_mod(p).ok_or_else(|| GaloisError::Shape("group is not square-free".into()))?;
        coeffs.push((a.num() * &inv).rem(p));
    }
    coeffs.push(ExactPoly::one(p.variable()));
    if coeffs.iter().any(|c| !c.is_constant()) {
        return Ok(Indicial::RootDependent { coefficients: coeffs });
    }
    let r = ExactPoly::var(Var::Lambda);
    let polynomial = coeffs
        .iter()
        .enumerate()
        .fold(ExactPoly::zero(Var::Lambda), |acc, (k, c)| &acc + &falling(&r, k).scale(&c.coeff(0)));
    let roots = gaussian_rational_roots(&polynomial)?;
    Ok(Indicial::Exact { polynomial, exponents: roots.roots, other: roots.other })
}

pub(crate) fn infinity_data(l: &DiffOperator) -> Result<InfinityData, GaloisError> {
    let b = l.cleared();
    let n = l.order();
    let weight = |k: usize| b[k].degree().map(|d| d as i64 - k as i64);
    let top = (0..=n).filter_map(weight).max().expect("b_n is nonzero");
    // L τ^λ = Σ b_k [λ]_k τ^{λ−k}; the top power of τ gives the indicial
    // polynomial, written here in α = −λ.
    let alpha = ExactPoly::var(Var::Lambda);
    let lambda = -alpha;
    let indicial = (0..=n).filter(|&k| weight(k) == Some(top)).fold(ExactPoly::zero(Var::Lambda), |acc, k| {
        &acc + &falling(&lambda, k).scale(&b[k].leading_coeff())
    });
    let roots = gaussian_rational_roots(&indicial)?;
    Ok(InfinityData { regular: weight(n) == Some(top), indicial, exponents: roots.roots, other: roots.other })
}

/// Finite singular points with their indicial data, and the algebraic-growth
/// exponents at infinity.
pub fn singularity_analysis(l: &DiffOperator) -> Result<SingularityData, GaloisError> {
    let n = l.order();
    let (leading, gs) = groups(l);
    let mut finite = Vec::with_capacity(gs.len());
    for g in gs {
        let regular = is_regular(&g, n);
        let indicial = if regular { Some(group_indicial(l, &g)?) } else { None };
        let points = poly_roots_numeric(&g.poly, 1e-10)?.into_iter().map(|z| [z.re, z.im]).collect();
        finite.push(SingularGroup {
            polynomial: g.poly,
            multiplicity: g.multiplicity,
            pole_orders: g.orders,
            points,
            regular,
            indicial,
        });
    }
    Ok(SingularityData { order: n, leading, finite, infinity: infinity_data(l)? })
}

/// Fuchs' criterion at every finite singular point and at infinity.
pub fn fuchsian_check(l: &DiffOperator) -> FuchsianClassification {
    let n = l.order();
    let (_, gs) = groups(l);
    let finite: Vec<(ExactPoly, bool)> = gs.iter().map(|g| (g.poly.clone(), is_regular(g, n))).collect();
    // Regular at ∞ iff deg a_k ≤ k − n for every k.
    let infinity_regular = l.coeffs().iter().enumerate().all(|(k, a)| {
        a.is_zero() || a.num().degree().unwrap() as i64 - a.den().degree().unwrap() as i64 <= k as i64 - n as i64
    });
    let fuchsian = infinity_regular && finite.iter().all(|(_, r)| *r);
    FuchsianClassification { finite, infinity_regular, fuchsian }
}

fn half_integer(e: &ExactScalar) -> Option<BigRational> {
    let two = BigRational::from_integer(2.into());
    (e.is_real() && (e.re() * &two).is_integer()).then(|| e.re().clone())
}

fn is_half_odd(x: &BigRational) -> bool {
    !x.is_integer()
}

/// Exponent bookkeeping for solutions `v = P(τ)∏(τ − τᵢ)^{αᵢ}` of `sym_l`.
///
/// Each finite point contributes an exponent from its local set restricted
/// to half-integers, so `v ~ τ^{deg P + Σαᵢ}` at infinity and `−deg P − Σαᵢ`
/// must be an exponent there. Case 2 is excluded when no exponent at
/// infinity is reachable from the minimal admissible sums.
pub fn case2_obstruction(
    l: &DiffOperator,
    sym_l: &DiffOperator,
    sing: &SingularityData,
) -> Result<Case2Outcome, GaloisError> {
    if sing.order != sym_l.order() || sym_l.order() < l.order() {
        return Err(GaloisError::Shape("singularity data does not belong to the symmetric power".into()));
    }
    let not_excluded = |reason: String| Ok(Case2Outcome { excluded: false, reason });
    // Minimal admissible sum for each class of Σαᵢ mod 1 (false: integer, true: half-odd).
    let mut best: BTreeMap<bool, BigRational> = BTreeMap::from([(false, BigRational::zero())]);
    for g in &sing.finite {
        let Some(exps) = g.indicial.as_ref().and_then(Indicial::exact_exponents) else {
            return not_excluded(format!("exponents at the roots of {} are not all exact", g.polynomial));
        };
        let admissible: Vec<BigRational> = exps.iter().filter_map(|(e, _)| half_integer(e)).collect();
        let mut per_point: BTreeMap<bool, BigRational> = BTreeMap::new();
        for e in admissible {
            let class = is_half_odd(&e);
            if per_point.get(&class).map_or(true, |m| e < *m) {
                per_point.insert(class, e);
            }
        }
        if per_point.is_empty() {
            return Ok(Case2Outcome {
                excluded: true,
                reason: format!("no half-integer exponent at the roots of {}", g.polynomial),
            });
        }
        for _ in 0..g.polynomial.degree().unwrap_or(0) {
            let mut next: BTreeMap<bool, BigRational> = BTreeMap::new();
            for (c1, s1) in &best {
                for (c2, s2) in &per_point {
                    let s = s1 + s2;
                    let c = c1 ^ c2;
                    if next.get(&c).map_or(true, |m| s < *m) {
                        next.insert(c, s);
                    }
                }
            }
            best = next;
        }
    }
    let inf: Vec<BigRational> = sing.infinity.exponents.iter().filter_map(|(e, _)| half_integer(e)).collect();
    for a in &inf {
        let d = -a.clone();
        if best.get(&is_half_odd(&d)).is_some_and(|m| *m <= d) {
            return not_excluded(format!("exponent {a} at infinity admits total degree {d}"));
        }
    }
    let fmt_best: Vec<String> = best.iter().map(|(c, m)| format!("{}{m}", if *c { "half-odd ≥ " } else { "integer ≥ " })).collect();
    let fmt_inf: Vec<String> = sing.infinity.exponents.iter().map(|(e, _)| e.to_string()).collect();
    Ok(Case2Outcome {
        excluded: true,
        reason: format!(
            "total degree deg P + Σαᵢ is {}, but the exponents at infinity are [{}]",
            fmt_best.join(" or "),
            fmt_inf.join(", ")
        ),
    })
}

