mod common;

use heisenkep::dynamics::{
    extended_poisson_build, hamilton_rhs_flat, integrate, integrate_extended, monitor_conserved, rhs_jacobian,
    write_trajectory_csv, DynamicsError, ExtendedOptions, ExtendedState, IntegratorConfig, StopReason, Trajectory,
};
use heisenkep::heisenmodel::{
    numeric_gradient, particular_solution, poisson_bracket, ParticularParams, PhaseState, PhaseState1B, SystemKind,
    SystemSpec,
};
use rand::{Rng, SeedableRng};

fn run(spec: &SystemSpec, y: &[f64], tol: f64, t_end: f64) -> Trajectory {
    let cfg = IntegratorConfig { dense: true, ..IntegratorConfig::with_tol(tol, t_end) };
    integrate(spec, &PhaseState::from_slice(spec.kind, y).unwrap(), &cfg).unwrap()
}

#[test]
fn bound_state_energy_and_dilation() {
    let spec = SystemSpec::kepler(1.0).unwrap();
    let y = common::state_with(&spec, 1, -0.002, 0.5, 0.5);
    let rep = monitor_conserved(&spec, &run(&spec, &y, 1e-12, 100.0)).unwrap();
    assert!(rep.max_h_drift < 1e-9, "{rep:?}");
    assert!(rep.max_p_theta_drift.unwrap() < 1e-9);
    assert!(rep.max_dj_residual.unwrap() < 1e-7);
    assert!(!rep.zero_energy);
}

#[test]
fn zero_energy_dilation_integral() {
    let spec = SystemSpec::kepler(1.0).unwrap();
    let y = common::state_with(&spec, 2, 0.0, 0.2, 0.5);
    let rep = monitor_conserved(&spec, &run(&spec, &y, 1e-12, 50.0)).unwrap();
    assert!(rep.zero_energy);
    assert!(rep.max_j_drift < 1e-8, "{rep:?}");
    assert_eq!(rep.j_constant, Some(true));
}

#[test]
fn invariant_plane_motion_is_straight() {
    let spec = SystemSpec::kepler(1.0).unwrap();
    let s = PhaseState1B { x: 1.0, y: 0.5, px: 2.0, py: 1.0, ..Default::default() };
    let tr = run(&spec, &PhaseState::from(s).to_vec(), 1e-12, 10.0);
    assert!(tr.event.is_none());
    let norm = (1.25f64).sqrt();
    for y in &tr.states {
        let dev = (y[0] * 0.5 - y[1] * 1.0).abs() / norm;
        assert!(dev < 1e-9 && y[2].abs() < 1e-12 && y[5].abs() < 1e-12);
    }
}

#[test]
fn two_body_integrals_conserved() {
    let spec = SystemSpec::kepler_two_body(1.0, 1.0, 0.5).unwrap();
    let y = common::state_with(&spec, 3, 0.5, 0.5, 0.8);
    let rep = monitor_conserved(&spec, &run(&spec, &y, 1e-12, 20.0)).unwrap();
    for d in rep.max_i_drift.unwrap() {
        assert!(d < 1e-8, "{rep:?}");
    }
    assert!(rep.max_dj_residual.unwrap() < 1e-7);
}

#[test]
fn two_body_particular_solution_reproduced() {
    let spec = SystemSpec::kepler_two_body(1.0, 2.0, 3.0).unwrap();
    let params = ParticularParams::TwoBody { w1: 0.3, w2: 0.5, pw1: 0.2 };
    let s0 = particular_solution(&spec, params, 0.0).unwrap();
    let tr = integrate(&spec, &s0, &IntegratorConfig::with_tol(1e-12, 5.0)).unwrap();
    let a = 6.0 / (8.0 * 0.25);
    for (t, y) in tr.times.iter().zip(&tr.states) {
        let pw2 = 0.5 * (y[8] - y[11]);
        assert!((pw2 + 2.0 * a * t).abs() < 1e-9);
    }
}

#[test]
fn time_reversal() {
    let spec = SystemSpec::kepler(1.0).unwrap();
    let y = common::state_with(&spec, 5, -0.05, 0.2, 0.5);
    let tol = 1e-11;
    let fwd = run(&spec, &y, tol, 3.0);
    let cfg = IntegratorConfig { t_start: 3.0, t_end: 0.0, ..IntegratorConfig::with_tol(tol, 0.0) };
    let back = integrate(&spec, &PhaseState::from_slice(SystemKind::OneBody, fwd.last()).unwrap(), &cfg).unwrap();
    for (a, b) in back.last().iter().zip(&y) {
        assert!((a - b).abs() < 10.0 * tol * (1.0 + b.abs()), "{a} vs {b}");
    }
}

#[test]
fn flow_is_bracket_with_hamiltonian() {
    let mut r = common::rng(6);
    for spec in [SystemSpec::kepler(1.0).unwrap(), SystemSpec::kepler_two_body(0.7, 1.0, 2.0).unwrap()] {
        for _ in 0..20 {
            let y = common::random_state(&spec, &mut r, 1.0);
            let c: Vec<f64> = (0..y.len()).map(|_| r.gen_range(-1.0..1.0)).collect();
            let f = |v: &[f64]| v.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>() + v[0] * v[v.len() - 1];
            let h = |v: &[f64]| heisenkep::heisenmodel::hamiltonian_flat(&spec, v).unwrap();
            let flow: f64 =
                numeric_gradient(f, &y).iter().zip(hamilton_rhs_flat(&spec, &y).unwrap()).map(|(a, b)| a * b).sum();
            let br = poisson_bracket(f, h, &y);
            assert!((flow - br).abs() < 1e-6 * (1.0 + flow.abs()), "{flow} vs {br}");
        }
    }
}

#[test]
fn jacobian_matches_finite_differences() {
    let mut r = common::rng(7);
    for spec in [SystemSpec::kepler(1.3).unwrap(), SystemSpec::kepler_two_body(1.0, 0.5, 1.5).unwrap()] {
        for _ in 0..50 {
            let y = common::random_state(&spec, &mut r, 1.0);
            let jac = rhs_jacobian(&spec, &y).unwrap();
            for i in 0..y.len() {
                let g = numeric_gradient(|v| hamilton_rhs_flat(&spec, v).unwrap()[i], &y);
                for j in 0..y.len() {
                    assert!((g[j] - jac[i][j]).abs() < 1e-6 * (1.0 + jac[i][j].abs()), "({i},{j})");
                }
            }
        }
    }
}

#[test]
fn collision_is_flagged() {
    let spec = SystemSpec::kepler(1.0).unwrap();
    // Radial fall from rest in the invariant plane reaches the origin.
    let s = PhaseState1B { x: 1.0, ..Default::default() };
    let cfg = IntegratorConfig { rho_min: 1e-6, ..IntegratorConfig::with_tol(1e-10, 10.0) };
    match integrate(&spec, &s.into(), &cfg) {
        Ok(tr) => match tr.event {
            Some(ev) => assert!(matches!(ev.reason, StopReason::Guard { .. })),
            None => panic!("fall did not stop"),
        },
        Err(DynamicsError::StepUnderflow { last_state, .. }) => assert_eq!(last_state.len(), 6),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn extended_flow_projects_to_original() {
    let spec = SystemSpec::kepler(1.0).unwrap();
    let sys = extended_poisson_build(&spec).unwrap();
    let y = common::state_with(&spec, 4, -0.01, 0.5, 0.5);
    let x0 = ExtendedState::on_leaf(SystemKind::OneBody, &y);
    let cfg = IntegratorConfig::with_tol(1e-12, 10.0);
    let et = integrate_extended(&sys, &x0, &cfg, &ExtendedOptions::default()).unwrap();
    assert!(et.max_casimir_drift < 1e-8);
    let direct = run(&spec, &y, 1e-12, 10.0);
    for (a, b) in et.states.last().unwrap().iter().zip(direct.last()) {
        assert!((a - b).abs() < 1e-6);
    }
    for x in &et.states {
        let u_rho = ExtendedState::on_leaf(SystemKind::OneBody, &x[..6]).u;
        assert!((x[6] - u_rho).abs() < 1e-7);
    }
}

#[test]
fn extended_start_must_be_on_leaf() {
    let spec = SystemSpec::kepler(1.0).unwrap();
    let sys = extended_poisson_build(&spec).unwrap();
    let mut x0 = ExtendedState::on_leaf(SystemKind::OneBody, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    x0.u += 1e-6;
    let cfg = IntegratorConfig::with_tol(1e-10, 1.0);
    assert!(matches!(
        integrate_extended(&sys, &x0, &cfg, &ExtendedOptions::default()),
        Err(DynamicsError::OffLeaf { .. })
    ));
}

#[test]
fn csv_has_header_and_rows() {
    let spec = SystemSpec::kepler(1.0).unwrap();
    let s = PhaseState1B { x: 1.0, y: 0.5, px: 2.0, py: 1.0, ..Default::default() };
    let tr = run(&spec, &PhaseState::from(s).to_vec(), 1e-8, 1.0);
    let mut buf = Vec::new();
    write_trajectory_csv(&spec, &tr, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,x,y,z,px,py,pz,H,p_theta,J");
    assert_eq!(lines.count(), tr.times.len());
}

#[test]
fn extended_structure_has_rank_2n_and_casimir() {
    let spec = SystemSpec::kepler(1.0).unwrap();
    let sys = extended_poisson_build(&spec).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let y: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let x = ExtendedState::on_leaf(SystemKind::OneBody, &y).to_vec();
        assert_eq!(sys.poisson_rank(&x, 1e-10).unwrap(), 6);
        let dp = sys.casimir_gradient(&x);
        for k in 0..7 {
            let ek: Vec<f64> = (0..7).map(|j| if j == k { 1.0 } else { 0.0 }).collect();
            assert!(sys.bracket(&x, &dp, &ek).unwrap().abs() < 1e-10);
        }
    }
}
