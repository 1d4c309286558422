//! Dormand–Prince 5(4) with PI step-size control and 4th-order dense output.

use serde::{Deserialize, Serialize};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// Keep the interpolant of every step.
    pub dense: bool,
    /// Collision guard for ρ.
    pub rho_min: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_step: f64::INFINITY,
            t_start: 0.0,
            t_end: 10.0,
            dense: false,
            rho_min: 1e-8,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tol(tol: f64, t_end: f64) -> Self {
        IntegratorConfig { abs_tol: tol, rel_tol: tol, t_end, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    /// Largest scaled local error estimate among accepted steps (≤ 1).
    pub max_error_estimate: f64,
}

/// Continuous extension of one accepted step.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    r: [Vec<f64>; 5],
}

impl DenseSegment {
    fn theta(&self, t: f64) -> f64 {
        (t - self.t0) / self.h
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let th = self.theta(t);
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.r;
        (0..r1.len()).map(|i| r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])))).collect()
    }

    /// Time derivative of the interpolant.
    pub fn eval_derivative(&self, t: f64) -> Vec<f64> {
        let th = self.theta(t);
        let th1 = 1.0 - th;
        let [_, r2, r3, r4, r5] = &self.r;
        let (c3, c4, c5) = (1.0 - 2.0 * th, 2.0 * th * th1 - th * th, 2.0 * th * th1 * th1 - 2.0 * th * th * th1);
        (0..r2.len()).map(|i| (r2[i] + c3 * r3[i] + c4 * r4[i] + c5 * r5[i]) / self.h).collect()
    }

    pub fn contains(&self, t: f64) -> bool {
        let (a, b) = if self.h > 0.0 { (self.t0, self.t0 + self.h) } else { (self.t0 + self.h, self.t0) };
        t >= a && t <= b
    }
}

/// Why an integration stopped before `t_end`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event")]
pub enum StopReason {
    /// A guard fired; the label and value describe it.
    Guard { label: String, value: f64 },
    /// The step size fell below the resolvable limit.
    StepUnderflow { h: f64 },
    /// The right-hand side could not be evaluated.
    RhsError { message: String },
    MaxSteps,
}

#[derive(Clone, Debug)]
pub struct OdeSolution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub stats: IntegratorStats,
    pub dense: Vec<DenseSegment>,
    /// `None` when `t_end` was reached.
    pub stop: Option<(f64, StopReason)>,
}

/// Scaled RMS norm.
fn error_norm(err: &[f64], y0: &[f64], y1: &[f64], cfg: &IntegratorConfig) -> f64 {
    let s: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sk = cfg.abs_tol + cfg.rel_tol * a.abs().max(b.abs());
            (e / sk).powi(2)
        })
        .sum();
    (s / err.len() as f64).sqrt()
}

fn axpy(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        if *c != 0.0 {
            for (o, v) in out.iter_mut().zip(k.iter()) {
                *o += h * c * v;
            }
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `cfg.t_start` to `cfg.t_end` (either direction).
///
/// `guard` is checked on every accepted state; returning `Some((label, value))`
/// stops the run with that state as the last sample.
pub fn dopri5<F, G>(f: F, y0: &[f64], cfg: &IntegratorConfig, guard: G) -> OdeSolution
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>, String>,
    G: FnMut(f64, &[f64]) -> Option<(String, f64)>,
{
    dopri5_projected(f, y0, cfg, guard, |_| false)
}

/// As [`dopri5`], with `project` applied to each accepted state before the
/// guard; it returns whether it changed the state.
pub fn dopri5_projected<F, G, P>(mut f: F, y0: &[f64], cfg: &IntegratorConfig, mut guard: G, mut project: P) -> OdeSolution
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>, String>,
    G: FnMut(f64, &[f64]) -> Option<(String, f64)>,
    P: FnMut(&mut [f64]) -> bool,
{
    let mut sol = OdeSolution {
        times: vec![cfg.t_start],
        states: vec![y0.to_vec()],
        stats: IntegratorStats::default(),
        dense: Vec::new(),
        stop: None,
    };
    let dir = if cfg.t_end >= cfg.t_start { 1.0 } else { -1.0 };
    let span = (cfg.t_end - cfg.t_start).abs();
    if span == 0.0 {
        return sol;
    }
    let mut t = cfg.t_start;
    let mut y = y0.to_vec();
    if let Some((label, value)) = guard(t, &y) {
        sol.stop = Some((t, StopReason::Guard { label, value }));
        return sol;
    }
    let mut eval = |t: f64, y: &[f64], stats: &mut IntegratorStats| {
        stats.rhs_evals += 1;
        f(t, y)
    };
    let mut k1 = match eval(t, &y, &mut sol.stats) {
        Ok(k) => k,
        Err(message) => {
            sol.stop = Some((t, StopReason::RhsError { message }));
            return sol;
        }
    };
    let hmax = cfg.max_step.min(span);
    let mut h = initial_step(&mut eval, t, &y, &k1, dir, hmax, cfg, &mut sol.stats);
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;
    let expo1 = 0.2 - BETA * 0.75;
    loop {
        if sol.stats.accepted + sol.stats.rejected >= cfg.max_steps {
            sol.stop = Some((t, StopReason::MaxSteps));
            return sol;
        }
        let remaining = (cfg.t_end - t) * dir;
        if remaining <= 0.0 {
            return sol;
        }
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            sol.stop = Some((t, StopReason::StepUnderflow { h }));
            return sol;
        }
        let hs = h * dir;
        let stages = (|| -> Result<_, String> {
            let k2 = eval(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]), &mut sol.stats)?;
            let k3 = eval(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]), &mut sol.stats)?;
            let k4 = eval(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]), &mut sol.stats)?;
            let y5 = axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            let k5 = eval(t + C5 * hs, &y5, &mut sol.stats)?;
            let y6 = axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
            let k6 = eval(t + hs, &y6, &mut sol.stats)?;
            let y1 = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = eval(t + hs, &y1, &mut sol.stats)?;
            Ok((k2, k3, k4, k5, k6, k7, y1))
        })();
        let (_k2, k3, k4, k5, k6, k7, y1) = match stages {
            Ok(s) => s,
            Err(_) => {
                // A failed evaluation inside the step is treated as a rejection.
                sol.stats.rejected += 1;
                h *= 0.25;
                last_rejected = true;
                continue;
            }
        };
        let err: Vec<f64> = (0..y.len())
            .map(|i| hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]))
            .collect();
        let err_norm = error_norm(&err, &y, &y1, cfg);
        let fac11 = err_norm.powf(expo1);
        if err_norm <= 1.0 {
            let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            facold = err_norm.max(1e-4);
            sol.stats.accepted += 1;
            sol.stats.max_error_estimate = sol.stats.max_error_estimate.max(err_norm);
            if cfg.dense {
                let ydiff: Vec<f64> = y1.iter().zip(&y).map(|(a, b)| a - b).collect();
                let bspl: Vec<f64> = (0..y.len()).map(|i| hs * k1[i] - ydiff[i]).collect();
                let r4: Vec<f64> = (0..y.len()).map(|i| ydiff[i] - hs * k7[i] - bspl[i]).collect();
                let r5: Vec<f64> = (0..y.len())
                    .map(|i| hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]))
                    .collect();
                sol.dense.push(DenseSegment { t0: t, h: hs, r: [y.clone(), ydiff, bspl, r4, r5] });
            }
            t = if last { cfg.t_end } else { t + hs };
            y = y1;
            k1 = k7;
            if project(&mut y) {
                match eval(t, &y, &mut sol.stats) {
                    Ok(k) => k1 = k,
                    Err(message) => {
                        sol.stop = Some((t, StopReason::RhsError { message }));
                        return sol;
                    }
                }
            }
            sol.times.push(t);
            sol.states.push(y.clone());
            if let Some((label, value)) = guard(t, &y) {
                sol.stop = Some((t, StopReason::Guard { label, value }));
                return sol;
            }
            if last {
                return sol;
            }
            let mut hnew = h / fac;
            if last_rejected {
                hnew = hnew.min(h);
            }
            last_rejected = false;
            h = hnew.min(hmax);
        } else {
            sol.stats.rejected += 1;
            last_rejected = true;
            h /= (fac11 / SAFE).min(1.0 / FAC_MIN);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    eval: &mut F,
    t: f64,
    y: &[f64],
    f0: &[f64],
    dir: f64,
    hmax: f64,
    cfg: &IntegratorConfig,
    stats: &mut IntegratorStats,
) -> f64
where
    F: FnMut(f64, &[f64], &mut IntegratorStats) -> Result<Vec<f64>, String>,
{
    let norm = |v: &[f64]| {
        let s: f64 =
            v.iter().zip(y).map(|(a, b)| (a / (cfg.abs_tol + cfg.rel_tol * b.abs())).powi(2)).sum();
        (s / v.len() as f64).sqrt()
    };
    let (d0, d1) = (norm(y), norm(f0));
    let mut h0 = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(hmax);
    let y1 = axpy(y, h0 * dir, &[(1.0, f0)]);
    let d2 = match eval(t + h0 * dir, &y1, stats) {
        Ok(f1) => {
            let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
            norm(&diff) / h0
        }
        Err(_) => return h0 * 1e-3,
    };
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / dm).powf(0.2) };
    (100.0 * h0).min(h1).min(hmax)
}
