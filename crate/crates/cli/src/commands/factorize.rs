//! Exponential solutions of the exterior square and the induced block
//! decomposition of a 4×4 system.

use std::cmp::Ordering;

use anyhow::{ensure, Result};
use heisenkep::exactalg::{ExactMatrix, ExactPoly, ExactScalar, Var};
use heisenkep::galois::{exterior_square, factorization_basis, plucker_value, system_exp_solutions};
use heisenkep::heisenmodel::SystemSpec;
use heisenkep::variational::{gauge_transform, ve_particular_interleaved, LinearSystem};
use num_complex::Complex64;
use serde_json::json;

use super::Ctx;
use crate::output::{Check, Outcome};

fn input_matrix(ctx: &Ctx) -> Result<ExactMatrix> {
    let Some(rows) = &ctx.cfg.factorize.matrix else {
        let spec = SystemSpec::kepler(16.0)?;
        return Ok(ve_particular_interleaved(&spec, &ExactScalar::one())?.block(0, 4));
    };
    ensure!(rows.len() == 4, "dimension error: expected 4 rows, found {}", rows.len());
    for (k, r) in rows.iter().enumerate() {
        ensure!(r.len() == 4, "dimension error: row {k} has {} entries, expected 4", r.len());
    }
    let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
    let rows: Vec<&[&str]> = rows.iter().map(Vec::as_slice).collect();
    Ok(ExactMatrix::parse(&rows, Var::T)?)
}

pub fn run(ctx: &Ctx, plucker_only: bool) -> Result<Outcome> {
    let a = input_matrix(ctx)?;
    let wedge = exterior_square(&a)?;
    let mut sols = system_exp_solutions(&LinearSystem::new(wedge.clone())?)?;
    // Decreasing leading coefficient of the exponent, real part first.
    let key = |e: &ExactPoly| {
        let z = e.degree().map_or(Complex64::new(0.0, 0.0), |d| e.coeff(d).to_complex());
        (-z.re, -z.im)
    };
    sols.sort_by(|a, b| key(&a.exponent).partial_cmp(&key(&b.exponent)).unwrap_or(Ordering::Equal));
    let quadrics = sols.iter().map(|s| plucker_value(&s.direction)).collect::<Result<Vec<_>, _>>()?;
    let solutions: Vec<_> = sols
        .iter()
        .zip(&quadrics)
        .map(|(s, p)| json!({ "exponent": s.exponent, "direction": s.direction, "plucker": p, "decomposable": p.is_zero() }))
        .collect();

    // Only decomposable solutions span invariant planes; the others are reported
    // with their nonzero quadric.
    let decomposable: Vec<_> =
        sols.iter().zip(&quadrics).filter(|(_, p)| p.is_zero()).map(|(s, _)| s.direction.clone()).collect();
    let mut checks = vec![Check::flag("two_decomposable_solutions", decomposable.len() >= 2)
        .with_detail(format!("{} of {} exponential solutions", decomposable.len(), sols.len()))];
    if plucker_only {
        let data = json!({ "matrix": a, "solutions": solutions });
        return Ok(Outcome::new("factorize", ctx.seed, checks, data));
    }

    let f = factorization_basis(&decomposable)?;
    checks.push(Check::flag("complete_factorization", !f.partial));
    let blocks = gauge_transform(&LinearSystem::new(a.clone())?, &f.q)?;
    let m = blocks.matrix();
    let zero_block = |r0: usize, c0: usize| (0..2).all(|i| (0..2).all(|j| m.get(r0 + i, c0 + j).is_zero()));
    let (lower, upper) = (zero_block(2, 0), zero_block(0, 2));
    checks.push(Check::flag("block_triangular", lower || upper));
    let data = json!({
        "matrix": a,
        "exterior_square": wedge,
        "solutions": solutions,
        "q": f.q.matrix(),
        "kernel_columns": f.kernel_columns,
        "determinant": f.q.determinant(),
        "blocks": m,
        "block_diagonal": lower && upper,
    });
    Ok(Outcome::new("factorize", ctx.seed, checks, data))
}
