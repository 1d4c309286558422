//! End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
//! run with `--nocapture` to see them.

mod common;

use std::time::{Duration, Instant};

use heisenkep::dynamics::{
    extended_poisson_build, hamilton_rhs_flat, integrate, integrate_extended, monitor_conserved, ExtendedOptions,
    ExtendedState, IntegratorConfig, Trajectory,
};
use heisenkep::exactalg::{ExactMatrix, ExactPoly, ExactRatFunc, ExactScalar, Var};
use heisenkep::galois::*;
use heisenkep::heisenmodel::{
    condition_coefficient_a, condition_coefficient_a_exact, particular_solution, BiPoly, ParticularParams, PhaseState,
    PhaseState1B, PotentialSpec, SystemKind, SystemSpec,
};
use heisenkep::variational::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok { Ok(()) } else { Err(msg()) }
}

fn q(s: &str) -> ExactScalar {
    s.parse().unwrap()
}

fn mat(rows: &[&[&str]], v: Var) -> ExactMatrix {
    ExactMatrix::parse(rows, v).unwrap()
}

fn rf(s: &str, v: Var) -> ExactRatFunc {
    ExactRatFunc::from_poly(ExactPoly::parse(s, v).unwrap())
}

fn kepler_ve_a2() -> ExactMatrix {
    mat(
        &[&["0", "1", "2*t", "0"], &["-4*t^2", "0", "0", "2*t"], &["-2*t", "0", "0", "1"], &["0", "-2*t", "-4*t^2", "0"]],
        Var::T,
    )
}

fn criterion_1() -> Check {
    // κ = 16, c = 1 gives a = 2.
    let spec = SystemSpec::kepler(16.0).unwrap();
    let ve = ve_particular_interleaved(&spec, &q("1")).map_err(|e| e.to_string())?;
    ensure(ve.block(0, 4) == kepler_ve_a2(), || format!("VE block:\n{}", ve.block(0, 4)))?;
    ensure(ve.is_block_diagonal(&[4, 2]), || "VE couples the vertical variations".into())?;
    let tail = ve.block(4, 2);
    ensure(tail.get(0, 0).is_zero() && tail.get(0, 1).is_zero() && tail.get(1, 1).is_zero(), || {
        format!("VE tail:\n{tail}")
    })?;

    let derived = ve_blocks_derived(&spec, &q("1")).map_err(|e| e.to_string())?;
    let c_entry = derived.matrix().get(5, 4).clone();
    let mut reference = mat(
        &[
            &["0", "1", "0", "0", "0", "0"],
            &["-2*i", "-4*i*t", "0", "0", "0", "0"],
            &["0", "0", "0", "1", "0", "0"],
            &["0", "0", "2*i", "4*i*t", "0", "0"],
            &["0", "0", "0", "0", "0", "0"],
            &["0", "0", "0", "0", "0", "0"],
        ],
        Var::T,
    );
    reference.set(5, 4, c_entry);
    ensure(derived.matrix() == &reference, || format!("block form:\n{}", derived.matrix()))?;

    let w = PotentialSpec::inverse_rho(q("-1"));
    for (m1, m2, w2, tau0) in [("1", "2", "1/3", "0"), ("2", "1", "-1", "1"), ("1", "-1", "1/2", "1")] {
        let (m1, m2) = (q(m1), q(m2));
        let mu = &m1 / &m2;
        let d = ve_twobody_derived(&w, &m1, &m2, &q(w2), &q(tau0)).map_err(|e| e.to_string())?;
        let p = ve_twobody_blocks(&mu, &q(tau0), &q(w2)).map_err(|e| e.to_string())?;
        ensure(d == p, || format!("two-body blocks differ for μ = {mu}, τ₀ = {tau0}"))?;
    }

    for mu in ["-2", "-1/2", "1/2", "3"] {
        let m = q(mu);
        let t = a1_tilde(&m, &q("0"), &q_twobody_tau0_zero(&m).unwrap());
        let p1 = format!("({})*τ", &(&ExactScalar::one() - &m) * &q("2"));
        let p2 = format!("({}) + ({})*τ^2", &q("3") + &m, &m * &q("4"));
        let reference = mat(&[&["0", "1", "0", "0"], &["0", "0", "1", "0"], &["0", &p2, &p1, "1"], &["0", "0", "0", "0"]], Var::Tau);
        ensure(t.matrix() == &reference, || format!("Ã₁ for τ₀ = 0, μ = {mu}:\n{}", t.matrix()))?;
    }
    let t = a1_tilde(&q("-1"), &q("1"), &q_twobody_mu_minus_one().unwrap());
    let reference =
        mat(&[&["2*τ-2", "1", "0", "0"], &["0", "0", "1", "0"], &["4", "-2", "2*τ+2", "1"], &["0", "0", "0", "0"]], Var::Tau);
    ensure(t.matrix() == &reference, || format!("Ã₁ for μ = −1:\n{}", t.matrix()))
}

fn a1_tilde(mu: &ExactScalar, tau0: &ExactScalar, g: &GaugeMatrix) -> LinearSystem {
    let full = ve_twobody_blocks(mu, tau0, &q("1")).unwrap();
    gauge_transform(&LinearSystem::new(full.block(0, 4)).unwrap(), g).unwrap()
}

fn criterion_2() -> Check {
    for a in ["2", "-1/3", "5"] {
        let sys = ve_blocks_transformed(&q(a), &q("0")).map_err(|e| e.to_string())?;
        let o = cyclic_to_scalar(&subsystem(&sys, &[0, 1], &[]).unwrap(), 0).unwrap();
        let s = ExactPoly::monomial(&(&ExactScalar::i() * &q(a)) * &q("-1/2"), 2, Var::T);
        let w = exp_substitution(&o, &s).unwrap();
        let expected = [rf(&format!("({})*t^2", &q(a) * &q(a)), Var::T), ExactRatFunc::zero(Var::T)];
        ensure(w.coeffs() == expected, || format!("w'' + a²t²w for a = {a}: {:?}", w.coeffs()))?;
    }
    for mu in ["-2", "-1/2", "1/2", "1", "3"] {
        let m = q(mu);
        let t = a1_tilde(&m, &q("0"), &q_twobody_tau0_zero(&m).unwrap());
        let o = cyclic_to_scalar(&subsystem(&t, &[1, 2], &[3]).unwrap(), 0).unwrap();
        let s = ExactPoly::monomial(&(&ExactScalar::one() - &m) * &q("1/2"), 2, Var::Tau);
        let w = exp_substitution(&o, &s).unwrap();
        let p = &ExactScalar::one() + &m;
        let expected = [rf(&format!("({}) + ({})*τ^2", &p * &q("-2"), -(&p * &p)), Var::Tau), ExactRatFunc::zero(Var::Tau)];
        ensure(w.coeffs() == expected, || format!("parabolic form for μ = {mu}: {:?}", w.coeffs()))?;
    }
    let t = a1_tilde(&q("-1"), &q("1"), &q_twobody_mu_minus_one().unwrap());
    let third = cyclic_to_scalar(&subsystem(&t, &[0, 1, 2], &[3]).unwrap(), 1).unwrap();
    let expected3 = [rf("-4*τ", Var::Tau), rf("4*τ^2 - 4", Var::Tau), rf("-4*τ", Var::Tau)];
    ensure(third.coeffs() == expected3, || format!("third-order form: {:?}", third.coeffs()))?;
    let v = exp_substitution(&third, &ExactPoly::parse("2/3*τ^2", Var::Tau).unwrap()).unwrap();
    // (4/27)τ(4τ² − 63)
    let v_coeff = ExactPoly::parse("4*τ^2 - 63", Var::Tau).unwrap();
    let v_coeff = (&ExactPoly::var(Var::Tau) * &v_coeff).scale(&q("4/27"));
    let expected = [ExactRatFunc::from_poly(v_coeff), rf("-4/3*τ^2", Var::Tau), ExactRatFunc::zero(Var::Tau)];
    ensure(v.coeffs() == expected, || format!("reduced third-order form: {:?}", v.coeffs()))
}

fn criterion_3() -> Check {
    for a in ["2", "-1/3", "7/5"] {
        let a2 = &q(a) * &q(a);
        let p = ParabolicParams { alpha_sq: -a2, alpha_beta: q("0"), gamma: q("0") };
        ensure(rehm_classify(&p).unwrap().is_not_solvable(), || format!("(−a², 0, 0) for a = {a}"))?;
    }
    for mu in ["-2", "-1/2", "1/2", "1", "3"] {
        let p1 = &ExactScalar::one() + &q(mu);
        let p = ParabolicParams { alpha_sq: &p1 * &p1, alpha_beta: q("0"), gamma: &p1 * &q("2") };
        ensure(rehm_classify(&p).unwrap().is_not_solvable(), || format!("((1+μ)², 0, 2(1+μ)) for μ = {mu}"))?;
    }
    let p = ParabolicParams::new(&q("2"), &q("0"), &q("-2")).unwrap();
    ensure(rehm_classify(&p).unwrap().tag == VerdictTag::Inconclusive, || "odd-ratio fixture".into())
}

fn s_poly() -> ExactPoly {
    let inner = ExactPoly::parse(
        "3456*τ^14 - 271680*τ^12 + 8200960*τ^10 - 119918560*τ^8 + 854800080*τ^6 - 2391850656*τ^4 + 71751150*τ^2 - 229734225",
        Var::Tau,
    )
    .unwrap();
    &ExactPoly::var(Var::Tau) * &inner
}

fn criterion_4() -> Check {
    let l = mu_minus_one_operator().map_err(|e| e.to_string())?;
    let found = exp_solutions(&l).map_err(|e| e.to_string())?;
    ensure(found.solutions.is_empty() && found.complete, || format!("exponential solutions: {found:?}"))?;
    let sym = sym_power(&l, 3).map_err(|e| e.to_string())?;
    ensure(sym.order() == 10, || format!("sym³ has order {}", sym.order()))?;
    let sing = singularity_analysis(&sym).map_err(|e| e.to_string())?;
    ensure(sing.leading.squarefree_part().monic() == s_poly().monic(), || format!("singular polynomial {}", sing.leading))?;
    let allowed: Vec<ExactScalar> = [0, 1, 2, 3, 4, 5, 6, 7, 8, 10].iter().map(|&k| ExactScalar::from_i64(k)).collect();
    for g in &sing.finite {
        let exps = g.indicial.as_ref().and_then(Indicial::exact_exponents).ok_or("inexact finite exponents")?;
        ensure(g.regular && exps.iter().all(|(e, _)| allowed.contains(e)), || {
            format!("exponents {exps:?} at the roots of {}", g.polynomial)
        })?;
    }
    ensure(sing.infinity.exponents == vec![(q("2"), 1)] && sing.infinity.other == 0, || {
        format!("exponents at infinity {:?}", sing.infinity.exponents)
    })?;
    let c2 = case2_obstruction(&l, &sym, &sing).map_err(|e| e.to_string())?;
    ensure(c2.excluded, || c2.reason.clone())?;
    let v = liouvillian_verdict(&l).map_err(|e| e.to_string())?;
    ensure(v.is_not_solvable(), || format!("verdict {:?}", v.tag))
}

const REFERENCE_WEDGE: [[&str; 6]; 6] = [
    ["0", "0", "2*t", "-2*t", "0", "0"],
    ["0", "0", "1", "1", "0", "0"],
    ["-2*t", "-4*t^2", "0", "0", "1", "2*t"],
    ["2*t", "-4*t^2", "0", "0", "1", "2*t"],
    ["0", "0", "-4*t^2", "-4*t^2", "0", "0"],
    ["0", "0", "-2*t", "2*t", "0", "0"],
];

/// The reference 6×6 system has `2t` at row `z₁₂`, column `z₂₃`, where the
/// exterior square has `A₁₃W₃₂ = −2t z₂₃`.
const KNOWN_WEDGE_DISCREPANCY: (usize, usize) = (3, 5);

/// Mismatches between the exterior square and the reference matrix, then the
/// remaining sub-checks.
fn criterion_5() -> (Vec<(usize, usize)>, Check) {
    let wedge = exterior_square(&kepler_ve_a2()).unwrap();
    let mut mismatches = Vec::new();
    for (r, row) in REFERENCE_WEDGE.iter().enumerate() {
        for (c, e) in row.iter().enumerate() {
            if wedge.get(r, c) != &rf(e, Var::T) {
                mismatches.push((r, c));
            }
        }
    }
    let rest = (|| {
        let y1: Vec<ExactRatFunc> = ["-1", "0", "-i", "i", "0", "1"].iter().map(|s| rf(s, Var::T)).collect();
        let y2: Vec<ExactRatFunc> = ["-1", "0", "i", "-i", "0", "1"].iter().map(|s| rf(s, Var::T)).collect();
        let sols = system_exp_solutions(&LinearSystem::new(wedge.clone()).unwrap()).map_err(|e| e.to_string())?;
        for (s, y) in [("2*i*t^2", &y1), ("-2*i*t^2", &y2)] {
            let want = SystemExpSolution { exponent: ExactPoly::parse(s, Var::T).unwrap(), direction: y.clone() };
            ensure(sols.contains(&want), || format!("exp({s}) solution not found among {}", sols.len()))?;
            ensure(plucker_check(y), || "Plücker relation fails".into())?;
        }
        let f = factorization_basis(&[y1, y2]).map_err(|e| e.to_string())?;
        ensure(!f.partial && f.q.determinant() == rf("-4", Var::T), || format!("det Q = {}", f.q.determinant()))?;
        let blocks = gauge_transform(&LinearSystem::new(kepler_ve_a2()).unwrap(), &f.q).map_err(|e| e.to_string())?;
        let reference = mat(
            &[
                &["2*i*t", "-4*t^2", "0", "0"],
                &["1", "2*i*t", "0", "0"],
                &["0", "0", "-2*i*t", "-4*t^2"],
                &["0", "0", "1", "-2*i*t"],
            ],
            Var::T,
        );
        ensure(blocks.matrix() == &reference, || format!("block form:\n{}", blocks.matrix()))
    })();
    (mismatches, rest)
}

fn run(spec: &SystemSpec, y: &[f64], tol: f64, t_end: f64) -> Result<Trajectory, String> {
    let cfg = IntegratorConfig { dense: true, ..IntegratorConfig::with_tol(tol, t_end) };
    integrate(spec, &PhaseState::from_slice(spec.kind, y).unwrap(), &cfg).map_err(|e| e.to_string())
}

fn criterion_6() -> Check {
    let spec = SystemSpec::kepler(1.0).unwrap();
    let y = common::state_with(&spec, 1, -0.002, 0.5, 0.5);
    let rep = monitor_conserved(&spec, &run(&spec, &y, 1e-12, 100.0)?).map_err(|e| e.to_string())?;
    ensure(rep.max_h_drift < 1e-9, || format!("energy drift {:e}", rep.max_h_drift))?;
    let dj = rep.max_dj_residual.unwrap_or(f64::INFINITY);
    ensure(dj < 1e-7, || format!("dJ/dt − 2H residual {dj:e}"))?;

    let s = PhaseState1B { x: 1.0, y: 0.5, px: 2.0, py: 1.0, ..Default::default() };
    let tr = run(&spec, &PhaseState::from(s).to_vec(), 1e-12, 10.0)?;
    let norm = 1.25f64.sqrt();
    let dev = tr.states.iter().map(|y| (y[0] * 0.5 - y[1]).abs() / norm + y[2].abs()).fold(0.0, f64::max);
    ensure(tr.event.is_none() && dev < 1e-9, || format!("straight-line deviation {dev:e}"))?;

    let y = common::state_with(&spec, 2, 0.0, 0.2, 0.5);
    let rep = monitor_conserved(&spec, &run(&spec, &y, 1e-12, 50.0)?).map_err(|e| e.to_string())?;
    ensure(rep.zero_energy && rep.max_j_drift < 1e-8, || format!("J drift at H = 0: {:e}", rep.max_j_drift))?;

    let two = SystemSpec::kepler_two_body(1.0, 1.0, 0.5).unwrap();
    let y = common::state_with(&two, 3, 0.5, 0.5, 0.8);
    let rep = monitor_conserved(&two, &run(&two, &y, 1e-12, 20.0)?).map_err(|e| e.to_string())?;
    let drift = rep.max_i_drift.ok_or("no two-body integrals")?;
    ensure(drift.iter().all(|d| *d < 1e-8), || format!("I₁..I₄ drift {drift:?}"))
}

fn criterion_7() -> Check {
    let spec = SystemSpec::kepler(1.0).unwrap();
    let sys = extended_poisson_build(&spec).map_err(|e| e.to_string())?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(common::SEED);
    for _ in 0..100 {
        let y: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let x = ExtendedState::on_leaf(SystemKind::OneBody, &y).to_vec();
        let rank = sys.poisson_rank(&x, 1e-10).map_err(|e| e.to_string())?;
        ensure(rank == 6, || format!("rank {rank} at {x:?}"))?;
        let dp = sys.casimir_gradient(&x);
        for k in 0..7 {
            let ek: Vec<f64> = (0..7).map(|j| if j == k { 1.0 } else { 0.0 }).collect();
            let b = sys.bracket(&x, &dp, &ek).map_err(|e| e.to_string())?.abs();
            ensure(b < 1e-10, || format!("Casimir bracket {b:e}"))?;
        }
    }
    let y = common::state_with(&spec, 4, -0.01, 0.5, 0.5);
    let x0 = ExtendedState::on_leaf(SystemKind::OneBody, &y);
    let et = integrate_extended(&sys, &x0, &IntegratorConfig::with_tol(1e-12, 10.0), &ExtendedOptions::default())
        .map_err(|e| e.to_string())?;
    ensure(et.max_casimir_drift < 1e-8, || format!("P drift {:e}", et.max_casimir_drift))?;
    let direct = run(&spec, &y, 1e-12, 10.0)?;
    let err = et.states.last().unwrap().iter().zip(direct.last()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(err < 1e-6, || format!("projection error {err:e}"))
}

fn bessel_equation_residual(a: Complex64, jet: [Complex64; 3], t: f64) -> f64 {
    let i = Complex64::i();
    let terms = [jet[2], 2.0 * i * a * t * jet[1], i * a * jet[0]];
    (terms[0] + terms[1] + terms[2]).norm() / terms.iter().map(|z| z.norm()).sum::<f64>()
}

fn criterion_8() -> Check {
    let (c1, c2) = (Complex64::new(1.0, 0.5), Complex64::new(-0.3, 2.0));
    for a in [2.0, 0.7, -1.5] {
        let a = Complex64::new(a, 0.0);
        for k in 0..50 {
            let t = 0.1 + 4.9 * k as f64 / 49.0;
            let jet = bessel_closed_form_jet(a, c1, c2, t, BESSEL_ARGUMENT_SCALE).map_err(|e| e.to_string())?;
            let r = bessel_equation_residual(a, jet, t);
            ensure(r < 1e-6, || format!("closed-form residual {r:e} at a = {a}, t = {t}"))?;
        }
    }
    let one = SystemSpec::kepler(1.0).unwrap();
    let two = SystemSpec::kepler_two_body(1.0, 0.5, 2.0).unwrap();
    let cases = [
        (&one, ParticularParams::OneBody { c: 0.8 }),
        (&one, ParticularParams::OneBody { c: -0.3 }),
        (&two, ParticularParams::TwoBody { w1: 0.2, w2: 0.6, pw1: -0.4 }),
    ];
    for (spec, params) in cases {
        for k in 0..20 {
            let t = 0.25 * k as f64;
            let at = |s: f64| particular_solution(spec, params, s).map(|p| p.to_vec()).map_err(|e| e.to_string());
            let (y, yp, ym) = (at(t)?, at(t + 1e-4)?, at(t - 1e-4)?);
            let f = hamilton_rhs_flat(spec, &y).map_err(|e| e.to_string())?;
            for i in 0..y.len() {
                // Affine in t, so the central difference is exact up to rounding.
                let r = ((yp[i] - ym[i]) / 2e-4 - f[i]).abs();
                ensure(r < 1e-9, || format!("particular solution residual {r:e} for {params:?}"))?;
            }
        }
    }
    Ok(())
}

fn criterion_9() -> Check {
    for (kappa, c) in [(1.0, 0.5), (2.5, 0.125), (16.0, 1.0)] {
        let spec = SystemSpec::kepler(kappa).unwrap();
        let ce = ExactScalar::from_f64(c).unwrap();
        let a = condition_coefficient_a_exact(&spec, &ce).map_err(|e| e.to_string())?;
        let oracle = &ExactScalar::from_f64(kappa).unwrap() / &(&ExactScalar::from_i64(8) * &(&ce * &ce));
        ensure(a == oracle, || format!("a = {a} for κ = {kappa}, c = {c}"))?;
    }
    let w = PotentialSpec::new(
        BiPoly::from_terms([(2, 2, ExactScalar::one()), (4, 0, ExactScalar::from_i64(-16))]),
        BiPoly::from_terms([(0, 0, ExactScalar::one())]),
    )
    .map_err(|e| e.to_string())?;
    let spec = SystemSpec::new(SystemKind::OneBody, 1.0, 1.0, 1.0, w).map_err(|e| e.to_string())?;
    for c in [0.5, -1.25, 3.0] {
        let a = condition_coefficient_a(&spec, c).map_err(|e| e.to_string())?;
        ensure(a == 0.0, || format!("a = {a} for the quartic fixture at c = {c}"))?;
    }
    Ok(())
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn report(n: usize, check: Check, elapsed: Duration, budget: Option<Duration>) -> bool {
    let check = check.and_then(|()| match budget {
        Some(b) if elapsed > b => Err(format!("runtime {elapsed:?} over budget {b:?}")),
        _ => Ok(()),
    });
    match &check {
        Ok(()) => println!("criterion {n}: PASS ({elapsed:.2?})"),
        Err(msg) => println!("criterion {n}: FAIL ({elapsed:.2?}) {msg}"),
    }
    check.is_ok()
}

#[test]
fn acceptance_criteria() {
    let secs = Duration::from_secs;
    let mut failed = Vec::new();
    let plain: [(usize, fn() -> Check, Option<Duration>); 4] = [
        (1, criterion_1, Some(secs(1))),
        (2, criterion_2, Some(secs(1))),
        (3, criterion_3, Some(secs(1))),
        (4, criterion_4, Some(secs(60))),
    ];
    for (n, f, budget) in plain {
        let (check, t) = timed(f);
        if !report(n, check, t, budget) {
            failed.push(n);
        }
    }

    let ((mismatches, rest), t) = timed(criterion_5);
    let c5 = rest.and_then(|()| {
        ensure(mismatches.is_empty(), || {
            format!(
                "reference 6×6 system differs from the exterior square at (row, col) {mismatches:?}: \
                 reference 2t, exterior square −2t; every other check passes"
            )
        })
    });
    let c5_ok = report(5, c5.clone(), t, Some(secs(5)));

    let rest: [(usize, fn() -> Check, Option<Duration>); 4] = [
        (6, criterion_6, Some(secs(30))),
        (7, criterion_7, Some(secs(10))),
        (8, criterion_8, None),
        (9, criterion_9, None),
    ];
    for (n, f, budget) in rest {
        let (check, t) = timed(f);
        if !report(n, check, t, budget) {
            failed.push(n);
        }
    }

    assert!(failed.is_empty(), "failed criteria {failed:?}");
    // Criterion 5 may fail only through the known sign discrepancy in the reference
    // matrix, with everything downstream of it passing.
    if !c5_ok {
        assert_eq!(mismatches, vec![KNOWN_WEDGE_DISCREPANCY], "{c5:?}");
        assert!(t <= secs(5));
    }
}
