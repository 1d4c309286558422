//! The reduction chains shared by `ve` and `galois`.

use anyhow::{bail, ensure, Context, Result};
use heisenkep::exactalg::{ExactPoly, ExactScalar, Var};
use heisenkep::galois::{parabolic_from_ode, DiffOperator, ParabolicParams};
use heisenkep::heisenmodel::{condition_coefficient_a_exact, PotentialSpec, SystemKind, SystemSpec};
use heisenkep::variational::{
    cyclic_to_scalar, exp_substitution, gauge_transform, q_twobody_mu_minus_one, q_twobody_tau0_zero, subsystem,
    ve_blocks_derived, ve_blocks_transformed, ve_particular_interleaved, ve_twobody_blocks, ve_twobody_derived,
    LinearSystem, ScalarODE,
};
use serde::Serialize;

use super::exact;
use crate::config::{RunConfig, VeParams};
use crate::output::Check;

#[derive(Serialize)]
pub struct KeplerChain {
    pub a: ExactScalar,
    pub c: ExactScalar,
    pub kappa: f64,
    pub ve: LinearSystem,
    pub blocks: LinearSystem,
    pub scalar_ode: ScalarODE,
    /// `w'' + a²t²w = 0` after `y = e^{−iat²/2}w`.
    pub reduced_ode: ScalarODE,
    pub parabolic: ParabolicParams,
    #[serde(skip)]
    pub checks: Vec<Check>,
}

fn kepler_spec(cfg: &RunConfig, p: &VeParams, c: &ExactScalar) -> Result<SystemSpec> {
    let Some(a) = &p.a else {
        let spec = cfg.system().context("no --a given and no system in the config")?;
        ensure!(spec.kind == SystemKind::OneBody && spec.is_kepler(), "the kepler branch needs a one-body Kepler system");
        return Ok(spec);
    };
    let a = exact("a", a)?;
    ensure!(a.is_real() && !a.is_zero(), "a must be real and nonzero");
    // a = κ sgn(c)/(8c²)
    let sgn = if c.to_complex().re > 0.0 { 1 } else { -1 };
    let kappa = &(&a * &(c * c)) * &ExactScalar::from_i64(8 * sgn);
    let spec = SystemSpec::kepler(kappa.to_complex().re)?;
    ensure!(condition_coefficient_a_exact(&spec, c)? == a, "κ = 8ac² = {kappa} is not exactly representable");
    Ok(spec)
}

pub fn kepler(cfg: &RunConfig, p: &VeParams) -> Result<KeplerChain> {
    let c = exact("c", &p.c)?;
    ensure!(c.is_real() && !c.is_zero(), "c must be real and nonzero");
    let spec = kepler_spec(cfg, p, &c)?;
    let a = condition_coefficient_a_exact(&spec, &c)?;
    let ve = ve_particular_interleaved(&spec, &c)?;
    let blocks = ve_blocks_derived(&spec, &c)?;

    let mut checks = Vec::new();
    match blocks.matrix().get(5, 4).as_constant() {
        Some(entry) => {
            let reference = ve_blocks_transformed(&a, &entry)?;
            checks.push(Check::flag("blocks_match_reference_form", reference == blocks));
        }
        None => checks.push(Check::flag("blocks_match_reference_form", false).with_detail("C is not constant")),
    }

    let scalar_ode = cyclic_to_scalar(&subsystem(&blocks, &[0, 1], &[])?, 0)?;
    let s = ExactPoly::monomial(&(&ExactScalar::i() * &a) * &ExactScalar::from_ratio(-1, 2), 2, Var::T);
    let reduced_ode = exp_substitution(&scalar_ode, &s)?;
    let parabolic = parabolic_from_ode(&reduced_ode)?;
    let expected = ParabolicParams { alpha_sq: -(&a * &a), alpha_beta: ExactScalar::zero(), gamma: ExactScalar::zero() };
    checks.push(Check::flag("parabolic_parameters", parabolic == expected).with_detail("(α², αβ, γ) = (−a², 0, 0)"));
    Ok(KeplerChain { a, c, kappa: spec.kappa, ve, blocks, scalar_ode, reduced_ode, parabolic, checks })
}

#[derive(Serialize)]
#[serde(tag = "reduction", rename_all = "snake_case")]
pub enum TwoBodyReduction {
    /// `τ₀ = 0`: a parabolic cylinder equation.
    Parabolic { reduced_system: LinearSystem, scalar_ode: ScalarODE, reduced_ode: ScalarODE, parabolic: ParabolicParams },
    /// `μ = −1`, `τ₀ = 1`: a third-order equation.
    ThirdOrder { reduced_system: LinearSystem, scalar_ode: ScalarODE, operator: DiffOperator },
    None { note: String },
}

#[derive(Serialize)]
pub struct TwoBodyChain {
    pub mu: ExactScalar,
    pub tau0: ExactScalar,
    pub w2: ExactScalar,
    pub blocks: LinearSystem,
    pub reduction: TwoBodyReduction,
    #[serde(skip)]
    pub checks: Vec<Check>,
}

pub fn twobody(p: &VeParams) -> Result<TwoBodyChain> {
    let (mu, tau0, w2) = (exact("mu", &p.mu)?, exact("tau0", &p.tau0)?, exact("w2", &p.w2)?);
    ensure!(mu.is_real() && tau0.is_real() && w2.is_real(), "μ, τ₀ and w₂ must be real");
    let blocks = ve_twobody_blocks(&mu, &tau0, &w2)?;
    let derived = ve_twobody_derived(&PotentialSpec::inverse_rho(ExactScalar::from_i64(-1)), &mu, &ExactScalar::one(), &w2, &tau0)?;
    let mut checks = vec![Check::flag("derived_matches_reference_blocks", derived == blocks)];
    let a1 = LinearSystem::new(blocks.block(0, 4))?;
    let one = ExactScalar::one();

    let reduction = if tau0.is_zero() && mu != -one.clone() {
        let reduced_system = gauge_transform(&a1, &q_twobody_tau0_zero(&mu)?)?;
        let scalar_ode = cyclic_to_scalar(&subsystem(&reduced_system, &[1, 2], &[3])?, 0)?;
        let s = ExactPoly::monomial(&(&one - &mu) * &ExactScalar::from_ratio(1, 2), 2, Var::Tau);
        let reduced_ode = exp_substitution(&scalar_ode, &s)?;
        let parabolic = parabolic_from_ode(&reduced_ode)?;
        let p1 = &one + &mu;
        let expected = ParabolicParams { alpha_sq: &p1 * &p1, alpha_beta: ExactScalar::zero(), gamma: &p1 * &ExactScalar::from_i64(2) };
        checks.push(
            Check::flag("parabolic_parameters", parabolic == expected).with_detail("(α², αβ, γ) = ((1+μ)², 0, 2(1+μ))"),
        );
        TwoBodyReduction::Parabolic { reduced_system, scalar_ode, reduced_ode, parabolic }
    } else if mu == -one.clone() && tau0 == one {
        let reduced_system = gauge_transform(&a1, &q_twobody_mu_minus_one()?)?;
        let scalar_ode = cyclic_to_scalar(&subsystem(&reduced_system, &[0, 1, 2], &[3])?, 1)?;
        let s = ExactPoly::monomial(ExactScalar::from_ratio(2, 3), 2, Var::Tau);
        let operator: DiffOperator = exp_substitution(&scalar_ode, &s)?.into();
        let expected = DiffOperator::parse(&["16/27*τ^3 - 28/3*τ", "-4/3*τ^2", "0"], Var::Tau)?;
        checks.push(Check::flag("third_order_coefficients", operator == expected));
        TwoBodyReduction::ThirdOrder { reduced_system, scalar_ode, operator }
    } else {
        TwoBodyReduction::None { note: "a reduction is known for τ₀ = 0, μ ≠ −1 and for μ = −1, τ₀ = 1".into() }
    };
    Ok(TwoBodyChain { mu, tau0, w2, blocks, reduction, checks })
}

pub fn require_reduction(chain: &TwoBodyChain) -> Result<()> {
    if let TwoBodyReduction::None { note } = &chain.reduction {
        bail!("no reduction for μ = {}, τ₀ = {}: {note}", chain.mu, chain.tau0);
    }
    Ok(())
}
