use heisenkep::exactalg::{ExactMatrix, ExactPoly, ExactRatFunc, ExactScalar, Var};
use heisenkep::heisenmodel::{PotentialSpec, SystemSpec};
use heisenkep::variational::*;
use num_complex::Complex64;

fn q(s: &str) -> ExactScalar {
    s.parse().unwrap()
}

fn mat(rows: &[&[&str]], v: Var) -> ExactMatrix {
    ExactMatrix::parse(rows, v).unwrap()
}

fn rf(s: &str, v: Var) -> ExactRatFunc {
    ExactRatFunc::from_poly(ExactPoly::parse(s, v).unwrap())
}

#[test]
fn kepler_ve_is_the_reference_matrix() {
    // κ = 32, c = 1 gives a = κ/(8c²) = 4; κ = 16 gives a = 2.
    let spec = SystemSpec::kepler(16.0).unwrap();
    let ve = ve_particular_interleaved(&spec, &q("1")).unwrap();
    let block = ve.block(0, 4);
    let reference = mat(
        &[&["0", "1", "2*t", "0"], &["-4*t^2", "0", "0", "2*t"], &["-2*t", "0", "0", "1"], &["0", "-2*t", "-4*t^2", "0"]],
        Var::T,
    );
    assert_eq!(block, reference);
    assert!(ve.is_block_diagonal(&[4, 2]));
    let tail = ve.block(4, 2);
    assert!(tail.get(0, 0).is_zero() && tail.get(0, 1).is_zero() && tail.get(1, 1).is_zero());
}

#[test]
fn transformed_blocks_match_derivation() {
    for (kappa, c) in [(16.0, "1"), (3.0, "-1/2"), (1.0, "2")] {
        let spec = SystemSpec::kepler(kappa).unwrap();
        let derived = ve_blocks_derived(&spec, &q(c)).unwrap();
        let a = heisenkep::heisenmodel::condition_coefficient_a_exact(&spec, &q(c)).unwrap();
        let c_entry = derived.matrix().get(5, 4).as_constant().unwrap();
        let reference = ve_blocks_transformed(&a, &c_entry).unwrap();
        assert_eq!(derived, reference, "κ={kappa} c={c}\n{}", derived.matrix());
        assert_eq!(reference.block(2, 2), reference.block(0, 2).conj());
    }
}

#[test]
fn twobody_blocks_match_derivation() {
    let w = PotentialSpec::inverse_rho(q("-1"));
    for (m1, m2, w2, tau0) in [("1", "2", "1/3", "0"), ("2", "1", "-1", "1"), ("1", "-1", "1/2", "1"), ("3", "1/2", "2", "-5/7")] {
        let (m1, m2) = (q(m1), q(m2));
        let mu = &m1 * &m2.inv().unwrap();
        let derived = ve_twobody_derived(&w, &m1, &m2, &q(w2), &q(tau0)).unwrap();
        let reference = ve_twobody_blocks(&mu, &q(tau0), &q(w2)).unwrap();
        assert_eq!(derived, reference, "\n{}\nvs\n{}", derived.matrix(), reference.matrix());
    }
}

fn ode(coeffs: &[&str], v: Var) -> ScalarODE {
    ScalarODE::new(coeffs.iter().map(|c| rf(c, v)).collect()).unwrap()
}

fn a1_tilde(mu: &str, tau0: &str, q_mat: &GaugeMatrix) -> LinearSystem {
    let full = ve_twobody_blocks(&q(mu), &q(tau0), &q("1")).unwrap();
    let a1 = LinearSystem::new(full.block(0, 4)).unwrap();
    gauge_transform(&a1, q_mat).unwrap()
}

#[test]
fn tau0_zero_gauge_gives_reference_form() {
    for mu in ["1/2", "-2", "3", "-1"] {
        let t = a1_tilde(mu, "0", &q_twobody_tau0_zero(&q(mu)).unwrap());
        let m = q(mu);
        let one_minus = &ExactScalar::from_i64(1) - &m;
        let p1 = format!("({})*τ", &one_minus * &ExactScalar::from_i64(2));
        let p2 = format!("({}) + ({})*τ^2", &ExactScalar::from_i64(3) + &m, &m * &ExactScalar::from_i64(4));
        let reference = mat(&[&["0", "1", "0", "0"], &["0", "0", "1", "0"], &["0", &p2, &p1, "1"], &["0", "0", "0", "0"]], Var::Tau);
        assert_eq!(t.matrix(), &reference, "μ = {mu}");
    }
}

#[test]
fn mu_minus_one_gauge_gives_reference_form() {
    let t = a1_tilde("-1", "1", &q_twobody_mu_minus_one().unwrap());
    let reference = mat(
        &[&["2*τ-2", "1", "0", "0"], &["0", "0", "1", "0"], &["4", "-2", "2*τ+2", "1"], &["0", "0", "0", "0"]],
        Var::Tau,
    );
    assert_eq!(t.matrix(), &reference);
}

#[test]
fn particular_vector_solves_first_block() {
    for (mu, tau0) in [("1/2", "0"), ("-1", "1"), ("2", "-3/4")] {
        let full = ve_twobody_blocks(&q(mu), &q(tau0), &q("1")).unwrap();
        let a1 = full.block(0, 4);
        let eta: Vec<ExactRatFunc> =
            [ "1", &format!("{}-τ", q(tau0)), "1", &format!("{}+τ", q(tau0))].iter().map(|s| rf(s, Var::Tau)).collect();
        let lhs: Vec<ExactRatFunc> = eta.iter().map(ExactRatFunc::derivative).collect();
        assert_eq!(lhs, a1.mul_vec(&eta));
    }
}

#[test]
fn bessel_equation_from_first_block() {
    for a in ["2", "-1/3", "5"] {
        let sys = ve_blocks_transformed(&q(a), &q("0")).unwrap();
        let sub = subsystem(&sys, &[0, 1], &[]).unwrap();
        let o = cyclic_to_scalar(&sub, 0).unwrap();
        let ia = &ExactScalar::i() * &q(a);
        assert_eq!(o, ode(&[&format!("({ia})"), &format!("({})*t", &ia * &ExactScalar::from_i64(2))], Var::T));
        // y = w e^{−iat²/2} turns it into w'' + a²t²w = 0.
        let s = ExactPoly::parse(&format!("({})*t^2", &ia * &q("-1/2")), Var::T).unwrap();
        let w = exp_substitution(&o, &s).unwrap();
        assert_eq!(w, ode(&[&format!("({})*t^2", &q(a) * &q(a)), "0"], Var::T));
    }
}

#[test]
fn parabolic_reduction_for_tau0_zero() {
    for mu in ["1/2", "-2", "3", "1"] {
        let t = a1_tilde(mu, "0", &q_twobody_tau0_zero(&q(mu)).unwrap());
        let sub = subsystem(&t, &[1, 2], &[3]).unwrap();
        let o = cyclic_to_scalar(&sub, 0).unwrap();
        let m = q(mu);
        let s = ExactPoly::parse(&format!("({})*τ^2", &(&ExactScalar::one() - &m) * &q("1/2")), Var::Tau).unwrap();
        let w = exp_substitution(&o, &s).unwrap();
        let p = &ExactScalar::one() + &m;
        // w'' − (1+μ)[2 + (1+μ)τ²]w = 0
        let expected = ode(&[&format!("({}) + ({})*τ^2", &p * &q("-2"), &-(&p * &p))], Var::Tau).coeffs()[0].clone();
        assert_eq!(w.coeffs(), &[expected, ExactRatFunc::zero(Var::Tau)]);
    }
}

#[test]
fn third_order_reduction_for_mu_minus_one() {
    let t = a1_tilde("-1", "1", &q_twobody_mu_minus_one().unwrap());
    let s3 = subsystem(&t, &[0, 1, 2], &[3]).unwrap();
    assert_eq!(s3.matrix(), &mat(&[&["2*τ-2", "1", "0"], &["0", "0", "1"], &["4", "-2", "2*τ+2"]], Var::Tau));
    let o = cyclic_to_scalar(&s3, 1).unwrap();
    assert_eq!(o, ode(&["-4*τ", "4*τ^2-4", "-4*τ"], Var::Tau));
    let v = exp_substitution(&o, &ExactPoly::parse("2/3*τ^2", Var::Tau).unwrap()).unwrap();
    assert_eq!(v, ode(&["16/27*τ^3 - 28/3*τ", "-4/3*τ^2", "0"], Var::Tau));
}

#[test]
fn subsystem_rejects_coupled_choice() {
    let t = a1_tilde("-1", "1", &q_twobody_mu_minus_one().unwrap());
    assert!(subsystem(&t, &[1, 2], &[3]).is_err());
}

fn bessel_equation_residual(a: Complex64, jet: [Complex64; 3], t: f64) -> f64 {
    let i = Complex64::i();
    let [y, dy, ddy] = jet;
    let terms = [ddy, 2.0 * i * a * t * dy, i * a * y];
    (terms[0] + terms[1] + terms[2]).norm() / terms.iter().map(|z| z.norm()).sum::<f64>()
}

#[test]
fn bessel_argument_fixed_by_residual_oracle() {
    let c = (Complex64::new(1.0, 0.5), Complex64::new(-0.3, 2.0));
    let grid: Vec<f64> = (0..50).map(|k| 0.1 + 4.9 * k as f64 / 49.0).collect();
    for a in [Complex64::new(2.0, 0.0), Complex64::new(0.7, 0.0), Complex64::new(-1.5, 0.0)] {
        let worst = |scale: f64| {
            grid.iter()
                .map(|&t| bessel_equation_residual(a, bessel_closed_form_jet(a, c.0, c.1, t, scale).unwrap(), t))
                .fold(0.0, f64::max)
        };
        assert!(worst(BESSEL_ARGUMENT_SCALE) < 1e-6, "a={a}: {}", worst(BESSEL_ARGUMENT_SCALE));
        // The argument a t² (scale 1) does not solve the equation.
        assert!(worst(1.0) > 1e-2, "a={a}");
    }
}

#[test]
fn bessel_closed_form_matches_integration() {
    use heisenkep::dynamics::{dopri5, IntegratorConfig};
    let a = Complex64::new(2.0, 0.0);
    let (c1, c2) = (Complex64::new(0.4, -1.0), Complex64::new(1.0, 0.0));
    let t0 = 0.1;
    let [y0, dy0, _] = bessel_closed_form_jet(a, c1, c2, t0, BESSEL_ARGUMENT_SCALE).unwrap();
    let i = Complex64::i();
    for t1 in [1.0, 2.5, 5.0] {
        let cfg = IntegratorConfig { abs_tol: 1e-12, rel_tol: 1e-12, t_start: t0, t_end: t1, ..Default::default() };
        let sol = dopri5(
            |t, u| {
                let (y, dy) = (Complex64::new(u[0], u[1]), Complex64::new(u[2], u[3]));
                let ddy = -2.0 * i * a * t * dy - i * a * y;
                Ok(vec![dy.re, dy.im, ddy.re, ddy.im])
            },
            &[y0.re, y0.im, dy0.re, dy0.im],
            &cfg,
            |_, _| None,
        );
        let u = sol.states.last().unwrap();
        let closed = bessel_closed_form(a, c1, c2, t1).unwrap();
        let num = Complex64::new(u[0], u[1]);
        assert!((closed - num).norm() < 1e-6 * (1.0 + num.norm()), "t={t1}: {closed} vs {num}");
    }
}

#[test]
fn bessel_rejects_nonpositive_time() {
    let one = Complex64::new(1.0, 0.0);
    assert!(bessel_closed_form(one, one, one, 0.0).is_err());
    assert!(bessel_closed_form(one, one, one, -1.0).is_err());
}

#[test]
fn degenerate_a_gives_affine_solutions() {
    // a = 0: η'' = 0 after the (trivial) substitution.
    let o = ode(&["0", "0"], Var::T);
    assert_eq!(exp_substitution(&o, &ExactPoly::zero(Var::T)).unwrap(), o);
    assert!(ve_blocks_transformed(&q("0"), &q("0")).is_err());
}

fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

#[test]
fn block_flow_conjugates_to_original_flow() {
    let spec = SystemSpec::kepler(16.0).unwrap();
    let ve = ve_particular_interleaved(&spec, &q("1")).unwrap();
    let blocks = ve_blocks_derived(&spec, &q("1")).unwrap();
    let phi = fundamental_matrix(&ve, 0.0, 1.0, 1e-12).unwrap();
    let psi = fundamental_matrix(&blocks, 0.0, 1.0, 1e-12).unwrap();
    let pz = ExactPoly::parse("-4*t", Var::T).unwrap();
    let t = q1h1_linearization(&ExactPoly::zero(Var::T), &ExactPoly::zero(Var::T), &pz);
    let tinv = t.inverse().unwrap();
    let back = matmul(&matmul(&tinv.eval_complex(Complex64::new(1.0, 0.0)), &psi), &t.eval_complex(Complex64::new(0.0, 0.0)));
    for i in 0..6 {
        for j in 0..6 {
            assert!((back[i][j] - phi[i][j]).norm() < 1e-7, "({i},{j})");
        }
    }
}

#[test]
fn gauge_conjugates_fundamental_matrix() {
    let mu = q("1/2");
    let full = ve_twobody_blocks(&mu, &q("0"), &q("1")).unwrap();
    let a1 = LinearSystem::new(full.block(0, 4)).unwrap();
    let g = q_twobody_tau0_zero(&mu).unwrap();
    let at = gauge_transform(&a1, &g).unwrap();
    let (t0, t1) = (0.0, 0.8);
    let phi = fundamental_matrix(&a1, t0, t1, 1e-12).unwrap();
    let psi = fundamental_matrix(&at, t0, t1, 1e-12).unwrap();
    let c = |t: f64| Complex64::new(t, 0.0);
    let expect = matmul(&matmul(&g.inverse().eval_complex(c(t1)), &phi), &g.matrix().eval_complex(c(t0)));
    for i in 0..4 {
        for j in 0..4 {
            assert!((expect[i][j] - psi[i][j]).norm() < 1e-7);
        }
    }
}

#[test]
fn sampled_ve_matches_exact_ve() {
    use heisenkep::dynamics::{integrate, IntegratorConfig};
    use heisenkep::heisenmodel::{particular_solution, ParticularParams};
    for (spec, params) in [
        (SystemSpec::kepler(2.0).unwrap(), ParticularParams::OneBody { c: 0.75 }),
        (SystemSpec::kepler_two_body(1.0, 2.0, 0.5).unwrap(), ParticularParams::TwoBody { w1: 0.5, w2: -1.0, pw1: 0.25 }),
    ] {
        let exact = ve_particular(&spec, &ExactParticular::from_params(params).unwrap()).unwrap();
        let s0 = particular_solution(&spec, params, 0.0).unwrap();
        let cfg = IntegratorConfig { dense: true, ..IntegratorConfig::with_tol(1e-12, 2.0) };
        let tr = integrate(&spec, &s0, &cfg).unwrap();
        let sampled = ve_along(&spec, &tr).unwrap();
        for (t, m) in sampled.times.iter().zip(&sampled.matrices) {
            let e = exact.eval(Complex64::new(*t, 0.0));
            for i in 0..m.len() {
                for j in 0..m.len() {
                    assert!((e[i][j] - m[i][j]).norm() < 1e-8 * (1.0 + m[i][j].abs()), "t={t} ({i},{j})");
                }
            }
        }
        let path = ve_along_path(&spec, |t| particular_solution(&spec, params, t).unwrap().to_vec(), &[0.0, 1.0, 3.0]).unwrap();
        assert!(path.path_residual < 1e-9);
    }
}

#[test]
fn non_solution_path_rejected() {
    let spec = SystemSpec::kepler(1.0).unwrap();
    let r = ve_along_path(&spec, |t| vec![0.0, 0.0, 1.0, 0.0, 0.0, t], &[0.5]);
    assert!(matches!(r, Err(VariationalError::NotASolution { .. })));
}

#[test]
fn json_round_trips() {
    let sys = ve_twobody_blocks(&q("-1"), &q("1"), &q("1/2")).unwrap();
    let back: LinearSystem = serde_json::from_str(&serde_json::to_string(&sys).unwrap()).unwrap();
    assert_eq!(back, sys);
    let o = ode(&["16/27*τ^3 - 28/3*τ", "-4/3*τ^2", "0"], Var::Tau);
    let text = serde_json::to_string(&o).unwrap();
    assert!(text.contains("\"order\":3"));
    assert_eq!(serde_json::from_str::<ScalarODE>(&text).unwrap(), o);
}
