//! Liouvillian-solution verdicts for third-order operators, following the
//! three cases of the Singer–Ulmer classification: a reducible operator has
//! an exponential solution, an imprimitive group gives a solution of the
//! third symmetric power of the form `P∏(τ − τᵢ)^{αᵢ}`, and a finite group
//! forces all singular points to be regular.

use super::{
    case2_obstruction, exp_solutions, fuchsian_check, singularity_analysis, sym_power, DiffOperator, Evidence,
    GaloisError, GaloisVerdict, Indicial, VerdictTag,
};
use crate::exactalg::{ExactPoly, ExactScalar, Var};
use crate::variational::{
    cyclic_to_scalar, exp_substitution, gauge_transform, q_twobody_mu_minus_one, subsystem, ve_twobody_blocks,
    LinearSystem,
};

fn verdict(tag: VerdictTag, evidence: Vec<Evidence>) -> Result<GaloisVerdict, GaloisError> {
    Ok(GaloisVerdict { tag, evidence })
}

/// Runs the three cases in turn; any case that cannot be excluded makes the
/// verdict inconclusive.
pub fn liouvillian_verdict(l: &DiffOperator) -> Result<GaloisVerdict, GaloisError> {
    if l.order() != 3 {
        return Err(GaloisError::Shape(format!("operator of order {}, expected 3", l.order())));
    }
    let mut evidence = Vec::new();

    let search = exp_solutions(l)?;
    let reducible = !search.solutions.is_empty() || !search.complete;
    evidence.push(Evidence::ExponentialSolutions {
        operator: l.to_string(),
        found: search.solutions.iter().map(|s| s.log_derivative.to_string()).collect(),
        complete: search.complete,
        notes: search.notes,
    });
    if reducible {
        return verdict(VerdictTag::Inconclusive, evidence);
    }

    let fuchs = fuchsian_check(l);
    let mut irregular: Vec<String> =
        fuchs.finite.iter().filter(|(_, r)| !r).map(|(p, _)| format!("roots of {p}")).collect();
    if !fuchs.infinity_regular {
        irregular.push("∞".into());
    }
    evidence.push(Evidence::Fuchsian { fuchsian: fuchs.fuchsian, irregular });
    if fuchs.fuchsian {
        return verdict(VerdictTag::Inconclusive, evidence);
    }

    let sym = sym_power(l, 3)?;
    evidence.push(Evidence::SymmetricPower { power: 3, order: sym.order() });
    let sing = singularity_analysis(&sym)?;
    evidence.push(Evidence::Singularities {
        leading: sing.leading.to_string(),
        finite_points: sing.finite_point_count(),
        finite_exponents: sing
            .finite
            .iter()
            .map(|g| match &g.indicial {
                Some(Indicial::Exact { exponents, .. }) => exponents.iter().map(|(e, _)| e.to_string()).collect(),
                Some(Indicial::RootDependent { .. }) => vec!["root dependent".into()],
                None => vec!["irregular".into()],
            })
            .collect(),
        infinity_exponents: sing.infinity.exponents.iter().map(|(e, _)| e.to_string()).collect(),
    });
    let case2 = case2_obstruction(l, &sym, &sing)?;
    let excluded = case2.excluded;
    evidence.push(Evidence::Case2 { excluded, reason: case2.reason });
    if !excluded {
        return verdict(VerdictTag::Inconclusive, evidence);
    }
    verdict(VerdictTag::NotSolvableIdentityComponent, evidence)
}

/// The third-order operator of the two-body problem for `μ = −1`, `τ₀ = 1`:
/// the `A₁` block reduced by its gauge matrix, restricted to the first three
/// components, reduced to a scalar equation for the second one, and
/// conjugated by `e^{2τ²/3}` to remove the second-order term.
pub fn mu_minus_one_operator() -> Result<DiffOperator, GaloisError> {
    let one = ExactScalar::one();
    let ve = ve_twobody_blocks(&-one.clone(), &one, &one)?;
    let a1 = LinearSystem::new(ve.block(0, 4))?;
    let reduced = gauge_transform(&a1, &q_twobody_mu_minus_one()?)?;
    let s3 = subsystem(&reduced, &[0, 1, 2], &[3])?;
    let third = cyclic_to_scalar(&s3, 1)?;
    let s = ExactPoly::monomial(ExactScalar::from_ratio(2, 3), 2, Var::Tau);
    Ok(exp_substitution(&third, &s)?.into())
}

pub fn liouvillian_verdict_o3r() -> Result<GaloisVerdict, GaloisError> {
    liouvillian_verdict(&mu_minus_one_operator()?)
}
