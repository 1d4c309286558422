//! Variational equations along the vertical particular solutions.
//!
//! Flat phase-space ordering is positions then momenta, as in
//! [`crate::heisenmodel`]. The one-body equations are also offered in the
//! interleaved order `(x, p_x, y, p_y, z, p_z)`.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::reduce::gauge_transform;
use super::{GaugeMatrix, LinearSystem, VariationalError};
use crate::dynamics::{hamilton_rhs_flat, rhs_jacobian, Trajectory};
use crate::exactalg::{ExactMatrix, ExactPoly, ExactRatFunc, ExactScalar, Var};
use crate::heisenmodel::{
    condition_coefficient_a_exact, kinetic_jacobian, kinetic_rhs, ModelError, ParticularParams, PhaseState1B,
    PotentialSpec, SystemKind, SystemSpec, WJet,
};

/// `perm[i]` is the flat index of the i-th interleaved one-body variable.
pub const ONE_BODY_INTERLEAVED: [usize; 6] = [0, 3, 1, 4, 2, 5];

/// Relative residual accepted when checking that a sampled path solves the equations.
pub const PATH_RESIDUAL_TOL: f64 = 1e-6;

/// Exact parameters of the vertical particular solutions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ExactParticular {
    #[serde(rename = "one-body")]
    OneBody { c: ExactScalar },
    #[serde(rename = "two-body")]
    TwoBody { w1: ExactScalar, w2: ExactScalar, pw1: ExactScalar },
}

impl ExactParticular {
    pub fn from_params(p: ParticularParams) -> Result<Self, VariationalError> {
        let ex = |x: f64| ExactScalar::from_f64(x).ok_or_else(|| VariationalError::InvalidParameter(format!("{x}")));
        Ok(match p {
            ParticularParams::OneBody { c } => ExactParticular::OneBody { c: ex(c)? },
            ParticularParams::TwoBody { w1, w2, pw1 } => {
                ExactParticular::TwoBody { w1: ex(w1)?, w2: ex(w2)?, pw1: ex(pw1)? }
            }
        })
    }

    fn kind(&self) -> SystemKind {
        match self {
            ExactParticular::OneBody { .. } => SystemKind::OneBody,
            ExactParticular::TwoBody { .. } => SystemKind::TwoBody,
        }
    }
}

fn sign(c: &ExactScalar) -> ExactScalar {
    if c.re() > &num_rational::BigRational::zero() {
        ExactScalar::one()
    } else {
        ExactScalar::from_i64(-1)
    }
}

/// `(V_Z, V_ZZ)` of `V = W(Z, ρ)` on the axis `X = Y = 0` at height `zr`,
/// where `ρ_Z = 4 sgn Z` and `ρ_ZZ = 0`.
fn axis_derivatives(w: &PotentialSpec, zr: &ExactScalar) -> Result<(ExactScalar, ExactScalar), VariationalError> {
    if zr.is_zero() || !zr.is_real() {
        return Err(VariationalError::InvalidParameter("the axis height must be real and nonzero".into()));
    }
    let s = sign(zr);
    let rho = &(&s * zr) * &ExactScalar::from_i64(4);
    let WJet { wz, wr, wzz, wzr, wrr, .. } = w.jet_exact(zr, &rho).ok_or(ModelError::SingularPotential)?;
    let four_s = &ExactScalar::from_i64(4) * &s;
    let vz = &wz + &(&four_s * &wr);
    let vzz = &(&wzz + &(&(&four_s + &four_s) * &wzr)) + &(&ExactScalar::from_i64(16) * &wrr);
    Ok((vz, vzz))
}

fn exact_inv_masses(spec: &SystemSpec) -> Result<Vec<ExactScalar>, VariationalError> {
    spec.masses()
        .iter()
        .map(|m| ExactScalar::from_f64(*m).and_then(|m| m.inv()))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| VariationalError::InvalidParameter("masses".into()))
}

/// `∇Z` and the Hessian of `Z` on the axis, over the flat positions.
fn relative_height_derivatives(kind: SystemKind) -> (Vec<ExactScalar>, Vec<Vec<ExactScalar>>) {
    let z = ExactScalar::zero;
    match kind {
        SystemKind::OneBody => (vec![z(), z(), ExactScalar::one()], vec![vec![z(); 3]; 3]),
        SystemKind::TwoBody => {
            let mut h = vec![vec![z(); 6]; 6];
            let half = ExactScalar::from_ratio(1, 2);
            // Z = z₂ − z₁ + ½(x₂y₁ − x₁y₂)
            h[3][1] = half.clone();
            h[1][3] = half.clone();
            h[0][4] = -half.clone();
            h[4][0] = -half;
            let mut g = vec![z(); 6];
            g[2] = ExactScalar::from_i64(-1);
            g[5] = ExactScalar::one();
            (g, h)
        }
    }
}

/// Exact VE along a vertical particular solution, flat ordering, variable `t`.
///
/// The path is checked to solve Hamilton's equations exactly before linearizing.
pub fn ve_particular(spec: &SystemSpec, params: &ExactParticular) -> Result<LinearSystem, VariationalError> {
    if params.kind() != spec.kind {
        return Err(VariationalError::InvalidParameter("particular solution of the wrong system kind".into()));
    }
    let v = Var::T;
    let t = ExactPoly::var(v);
    let k = |c: &ExactScalar| ExactPoly::constant(c.clone(), v);
    let (phi, zr) = match params {
        ExactParticular::OneBody { c } => {
            let a = condition_coefficient_a_exact(spec, c)?;
            let pz = t.scale(&(&a * &ExactScalar::from_i64(-2)));
            let z = ExactPoly::zero(v);
            (vec![z.clone(), z.clone(), k(c), z.clone(), z, pz], c.clone())
        }
        ExactParticular::TwoBody { w1, w2, pw1 } => {
            let a = condition_coefficient_a_exact(spec, w2)?;
            let half = ExactScalar::from_ratio(1, 2);
            let pw2 = t.scale(&(&a * &ExactScalar::from_i64(-2)));
            let z = ExactPoly::zero(v);
            let (z1, z2) = (&(w1 + w2) * &half, &(w1 - w2) * &half);
            let (pz1, pz2) = (&k(pw1) + &pw2, &k(pw1) - &pw2);
            (vec![z.clone(), z.clone(), k(&z1), z.clone(), z.clone(), k(&z2), z.clone(), z.clone(), pz1, z.clone(), z, pz2], -w2.clone())
        }
    };
    let n = phi.len() / 2;
    let inv_mass = exact_inv_masses(spec)?;
    let (vz, vzz) = axis_derivatives(&spec.potential, &zr)?;
    let (gz, hz) = relative_height_derivatives(spec.kind);

    let mut field = kinetic_rhs(&phi, &inv_mass);
    for j in 0..n {
        field[n + j] = &field[n + j] - &k(&(&vz * &gz[j]));
    }
    let worst = phi
        .iter()
        .zip(&field)
        .flat_map(|(p, f)| (&p.derivative() - f).coeffs().to_vec())
        .map(|c| c.to_complex().norm())
        .fold(0.0, f64::max);
    if worst != 0.0 {
        return Err(VariationalError::NotASolution { t: 0.0, residual: worst });
    }

    let mut jac = kinetic_jacobian(&phi, &inv_mass);
    for i in 0..n {
        for j in 0..n {
            let hess = &(&(&vzz * &gz[i]) * &gz[j]) + &(&vz * &hz[i][j]);
            jac[n + i][j] = &jac[n + i][j] - &k(&hess);
        }
    }
    LinearSystem::new(ExactMatrix::from_polys(jac)?)
}

/// One-body VE in the interleaved order `(x, p_x, y, p_y, z, p_z)`.
pub fn ve_particular_interleaved(spec: &SystemSpec, c: &ExactScalar) -> Result<LinearSystem, VariationalError> {
    ve_particular(spec, &ExactParticular::OneBody { c: c.clone() })?.permuted(&ONE_BODY_INTERLEAVED)
}

/// Jacobians of the flow sampled along a numerical path.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampledSystem {
    pub times: Vec<f64>,
    pub matrices: Vec<Vec<Vec<f64>>>,
    /// Largest relative residual of the path found by the solution check.
    pub path_residual: f64,
}

fn relative_residual(d: &[f64], f: &[f64]) -> f64 {
    d.iter().zip(f).map(|(a, b)| (a - b).abs() / (1.0 + b.abs())).fold(0.0, f64::max)
}

/// VE along an integrated trajectory. The trajectory must carry dense output;
/// the interpolant's derivative at step midpoints is compared with the field.
pub fn ve_along(spec: &SystemSpec, traj: &Trajectory) -> Result<SampledSystem, VariationalError> {
    if traj.dense.is_empty() && traj.states.len() > 1 {
        return Err(VariationalError::InvalidParameter("trajectory has no dense output".into()));
    }
    let mut path_residual: f64 = 0.0;
    for seg in &traj.dense {
        let t = seg.t0 + 0.5 * seg.h;
        let f = hamilton_rhs_flat(spec, &seg.eval(t))?;
        let r = relative_residual(&seg.eval_derivative(t), &f);
        if r > PATH_RESIDUAL_TOL {
            return Err(VariationalError::NotASolution { t, residual: r });
        }
        path_residual = path_residual.max(r);
    }
    let matrices = traj.states.iter().map(|y| rhs_jacobian(spec, y)).collect::<Result<Vec<_>, _>>()?;
    Ok(SampledSystem { times: traj.times.clone(), matrices, path_residual })
}

/// VE along a closed-form path `φ(t)` given as a function, sampled at `times`.
/// The path is checked by central differences.
pub fn ve_along_path(
    spec: &SystemSpec,
    phi: impl Fn(f64) -> Vec<f64>,
    times: &[f64],
) -> Result<SampledSystem, VariationalError> {
    let mut path_residual: f64 = 0.0;
    let mut matrices = Vec::with_capacity(times.len());
    for &t in times {
        let y = phi(t);
        let h = 1e-5 * t.abs().max(1.0);
        let (yp, ym) = (phi(t + h), phi(t - h));
        let d: Vec<f64> = yp.iter().zip(&ym).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let r = relative_residual(&d, &hamilton_rhs_flat(spec, &y)?);
        if r > PATH_RESIDUAL_TOL {
            return Err(VariationalError::NotASolution { t, residual: r });
        }
        path_residual = path_residual.max(r);
        matrices.push(rhs_jacobian(spec, &y)?);
    }
    Ok(SampledSystem { times: times.to_vec(), matrices, path_residual })
}

/// `(q₁, h₁, q₂, h₂, q₃, h₃)`.
pub type Transformed1B = [Complex64; 6];

/// The non-canonical complex variables `q₁ = x + iy`,
/// `h₁ = p_x + ip_y + (i/2)p_z(x + iy)`, their conjugate partners, `q₃ = z`, `h₃ = p_z`.
pub fn transform_vars_q1h1(s: &PhaseState1B) -> Transformed1B {
    let i = Complex64::i();
    let q1 = Complex64::new(s.x, s.y);
    let q2 = q1.conj();
    let h1 = Complex64::new(s.px, s.py) + 0.5 * i * s.pz * q1;
    let h2 = Complex64::new(s.px, -s.py) - 0.5 * i * s.pz * q2;
    [q1, h1, q2, h2, Complex64::new(s.z, 0.0), Complex64::new(s.pz, 0.0)]
}

/// Inverse of [`transform_vars_q1h1`] on complexified phase space, returning `(x, y, z, p_x, p_y, p_z)`.
pub fn transform_vars_q1h1_inverse(v: &Transformed1B) -> [Complex64; 6] {
    let i = Complex64::i();
    let [q1, h1, q2, h2, q3, h3] = *v;
    let x = 0.5 * (q1 + q2);
    let y = (q1 - q2) / (2.0 * i);
    let plus = h1 - 0.5 * i * h3 * q1;
    let minus = h2 + 0.5 * i * h3 * q2;
    [x, y, q3, 0.5 * (plus + minus), (plus - minus) / (2.0 * i), h3]
}

/// Jacobian of [`transform_vars_q1h1`] from `(x, p_x, y, p_y, z, p_z)` to
/// `(q₁, h₁, q₂, h₂, q₃, h₃)`, at a point with the given `x, y, p_z`.
pub fn q1h1_linearization(x: &ExactPoly, y: &ExactPoly, pz: &ExactPoly) -> ExactMatrix {
    let v = pz.variable();
    let c = |re: i64, im: i64| ExactPoly::constant(ExactScalar::gaussian(re, 1, im, 1), v);
    let i = ExactScalar::i();
    let half_i = ExactScalar::gaussian(0, 1, 1, 2);
    let half = ExactScalar::from_ratio(1, 2);
    let q1 = x + &y.scale(&i);
    let q2 = x - &y.scale(&i);
    let z = || ExactPoly::zero(v);
    let rows = vec![
        vec![c(1, 0), z(), c(0, 1), z(), z(), z()],
        vec![pz.scale(&half_i), c(1, 0), pz.scale(&-half.clone()), c(0, 1), z(), q1.scale(&half_i)],
        vec![c(1, 0), z(), c(0, -1), z(), z(), z()],
        vec![pz.scale(&-half_i.clone()), c(1, 0), pz.scale(&-half), c(0, -1), z(), q2.scale(&-half_i)],
        vec![z(), z(), z(), z(), c(1, 0), z()],
        vec![z(), z(), z(), z(), z(), c(1, 0)],
    ];
    ExactMatrix::from_polys(rows).expect("6×6")
}

/// The one-body VE carried to the variables `(q₁, h₁, …, h₃)` by the
/// linearized change of variables: `T A T⁻¹ + Ṫ T⁻¹`.
pub fn ve_blocks_derived(spec: &SystemSpec, c: &ExactScalar) -> Result<LinearSystem, VariationalError> {
    let ve = ve_particular_interleaved(spec, c)?;
    let a = condition_coefficient_a_exact(spec, c)?;
    let v = Var::T;
    let pz = ExactPoly::var(v).scale(&(&a * &ExactScalar::from_i64(-2)));
    let t = q1h1_linearization(&ExactPoly::zero(v), &ExactPoly::zero(v), &pz);
    gauge_transform(&ve, &GaugeMatrix::new(t.inverse()?)?)
}

/// The transformed one-body VE in block form: `diag(A₁, A₂, A₃)` with
/// `A₁ = [[0, 1], [−ia, −2iat]]`, `A₂` its image under `i ↦ −i`, and
/// `A₃ = [[0, 0], [C, 0]]` for the given entry `C`.
pub fn ve_blocks_transformed(a: &ExactScalar, c_entry: &ExactScalar) -> Result<LinearSystem, VariationalError> {
    if a.is_zero() {
        return Err(VariationalError::InvalidParameter("a must be nonzero".into()));
    }
    let v = Var::T;
    let i = ExactScalar::i();
    let k = |x: ExactScalar| ExactRatFunc::constant(x, v);
    let mut m = ExactMatrix::zeros(6, 6, v);
    for (off, s) in [(0, i.clone()), (2, -i.clone())] {
        m.set(off, off + 1, ExactRatFunc::one(v));
        m.set(off + 1, off, k(-(&s * a)));
        m.set(off + 1, off + 1, ExactRatFunc::var(v).scale(&(&(&s * a) * &ExactScalar::from_i64(-2))));
    }
    m.set(5, 4, k(c_entry.clone()));
    LinearSystem::new(m)
}

/// The two-body VE blocks in closed form, in `τ`, for `μ = m₁/m₂`, `p_{w₁} = 2iτ₀`.
/// Variables `(u₁, p_{v₁}, u₂, p_{v₂}, v₁, p_{u₁}, v₂, p_{u₂}, w₁, w₂, p_{w₁}, p_{w₂})`.
pub fn ve_twobody_blocks(mu: &ExactScalar, tau0: &ExactScalar, w2: &ExactScalar) -> Result<LinearSystem, VariationalError> {
    if mu.is_zero() || w2.is_zero() {
        return Err(VariationalError::InvalidParameter("μ and w₂ must be nonzero".into()));
    }
    let v = Var::Tau;
    let tau = ExactPoly::var(v);
    let k = |x: &ExactScalar| ExactPoly::constant(x.clone(), v);
    let zero = || ExactPoly::zero(v);
    let dm = &tau - &k(tau0);
    let sp = &tau + &k(tau0);
    let one = k(&ExactScalar::one());
    let mu_p = |p: &ExactPoly| p.scale(mu);
    let a1 = vec![
        vec![dm.clone(), one.clone(), zero(), zero()],
        vec![&dm * &dm, dm.clone(), -one.clone(), zero()],
        vec![zero(), zero(), -mu_p(&sp), k(mu)],
        vec![one.clone(), zero(), mu_p(&(&sp * &sp)), -mu_p(&sp)],
    ];
    let a2 = vec![
        vec![-dm.clone(), one.clone(), zero(), zero()],
        vec![&dm * &dm, -dm.clone(), one.clone(), zero()],
        vec![zero(), zero(), mu_p(&sp), k(mu)],
        vec![-one, zero(), mu_p(&(&sp * &sp)), mu_p(&sp)],
    ];
    let mut a3 = vec![vec![zero(); 4]; 4];
    a3[3][1] = k(&(&ExactScalar::gaussian(0, 1, 4, 1) * &w2.inv().expect("nonzero")));
    let mut rows = vec![vec![zero(); 12]; 12];
    for (b, blk) in [a1, a2, a3].into_iter().enumerate() {
        for (i, row) in blk.into_iter().enumerate() {
            for (j, e) in row.into_iter().enumerate() {
                rows[4 * b + i][4 * b + j] = e;
            }
        }
    }
    LinearSystem::new(ExactMatrix::from_polys(rows)?)
}

/// The constant part of the linear change to `(u, v, w)` variables with the
/// common factor `1/√2` of the horizontal rows removed; rows follow the
/// [`ve_twobody_blocks`] variable order, columns the flat two-body order.
pub fn twobody_uvw_matrix(var: Var) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(12, 12, var);
    let c = |re: i64, re_d: i64, im: i64| ExactRatFunc::constant(ExactScalar::gaussian(re, re_d, im, 1), var);
    // (row, y-or-py column, x-or-px column, sign of i)
    let horiz = [(0, 1, 0, -1), (1, 7, 6, -1), (2, 4, 3, -1), (3, 10, 9, -1), (4, 1, 0, 1), (5, 7, 6, 1), (6, 4, 3, 1), (7, 10, 9, 1)];
    for (r, yc, xc, s) in horiz {
        m.set(r, yc, c(1, 1, 0));
        m.set(r, xc, c(0, 1, s));
    }
    m.set(8, 2, c(1, 1, 0));
    m.set(8, 5, c(1, 1, 0));
    m.set(9, 2, c(1, 1, 0));
    m.set(9, 5, c(-1, 1, 0));
    m.set(10, 8, c(1, 2, 0));
    m.set(10, 11, c(1, 2, 0));
    m.set(11, 8, c(1, 2, 0));
    m.set(11, 11, c(-1, 2, 0));
    m
}

/// The two-body VE derived from the Hamiltonian: linearize along the
/// vertical solution, pass to `(u, v, w)` variables and rescale with
/// `t = m₁τ`, `a = i/m₁`, `p_{w₁} = 2iτ₀`. The potential is scaled so that its
/// condition coefficient equals `i/m₁`; masses may be any nonzero values.
pub fn ve_twobody_derived(
    potential: &PotentialSpec,
    m1: &ExactScalar,
    m2: &ExactScalar,
    w2: &ExactScalar,
    tau0: &ExactScalar,
) -> Result<LinearSystem, VariationalError> {
    let inv1 = m1.inv().ok_or_else(|| VariationalError::InvalidParameter("m₁ = 0".into()))?;
    let inv2 = m2.inv().ok_or_else(|| VariationalError::InvalidParameter("m₂ = 0".into()))?;
    let v = Var::Tau;
    let tau = ExactPoly::var(v);
    let k = |x: &ExactScalar| ExactPoly::constant(x.clone(), v);
    let two_i = ExactScalar::gaussian(0, 1, 2, 1);
    let half = ExactScalar::from_ratio(1, 2);
    let z = || ExactPoly::zero(v);
    let pz1 = (&k(tau0) - &tau).scale(&two_i);
    let pz2 = (&k(tau0) + &tau).scale(&two_i);
    let phi = vec![z(), z(), k(&(w2 * &half)), z(), z(), k(&(&-w2.clone() * &half)), z(), z(), pz1, z(), z(), pz2];

    let (vz_spec, vzz_spec) = axis_derivatives(potential, &-w2.clone())?;
    let a_spec = &vz_spec * &-half;
    if a_spec.is_zero() {
        return Err(VariationalError::InvalidParameter("the potential violates the condition a ≠ 0".into()));
    }
    let lambda = &(&ExactScalar::i() * &inv1) * &a_spec.inv().expect("nonzero");
    let (vz, vzz) = (&lambda * &vz_spec, &lambda * &vzz_spec);
    let (gz, hz) = relative_height_derivatives(SystemKind::TwoBody);

    let mut jac = kinetic_jacobian(&phi, &[inv1, inv2]);
    for i in 0..6 {
        for j in 0..6 {
            let hess = &(&(&vzz * &gz[i]) * &gz[j]) + &(&vz * &hz[i][j]);
            jac[6 + i][j] = &jac[6 + i][j] - &k(&hess);
        }
    }
    let a_tau = ExactMatrix::from_polys(jac)?.scale(m1);
    let t = twobody_uvw_matrix(v);
    let b = t.try_mul(&a_tau)?.try_mul(&t.inverse()?)?;
    let sys = LinearSystem::new(b)?;
    // The dropped 1/√2 scales only the horizontal rows, which is harmless
    // exactly when the horizontal and vertical parts are decoupled.
    if !sys.is_block_diagonal(&[8, 4]) {
        return Err(VariationalError::Shape("horizontal and vertical variations are coupled".into()));
    }
    Ok(sys)
}

/// Gauge matrix reducing the `A₁` block for `τ₀ = 0`.
pub fn q_twobody_tau0_zero(mu: &ExactScalar) -> Result<GaugeMatrix, VariationalError> {
    let inv = mu.inv().ok_or_else(|| VariationalError::InvalidParameter("μ = 0".into()))?;
    let m = ExactMatrix::parse(
        &[&["1", "0", "0", "0"], &["-τ", "1", "0", "0"], &["1", "2*τ", "-1", "0"], &["τ", "-1-2*τ^2", "τ", "0"]],
        Var::Tau,
    )?;
    let mut m = m;
    m.set(3, 3, ExactRatFunc::constant(-inv, Var::Tau));
    GaugeMatrix::new(m)
}

/// Gauge matrix reducing the `A₁` block for `μ = −1`, `τ₀ = 1`.
pub fn q_twobody_mu_minus_one() -> Result<GaugeMatrix, VariationalError> {
    GaugeMatrix::new(ExactMatrix::parse(
        &[&["1", "0", "0", "0"], &["τ-1", "1", "0", "0"], &["-1", "0", "-1", "0"], &["τ+1", "-1", "τ+1", "1"]],
        Var::Tau,
    )?)
}
