//! Numerical fundamental matrices of exact linear systems.

use num_complex::Complex64;

use super::{LinearSystem, VariationalError};
use crate::dynamics::{dopri5, IntegratorConfig};

/// `Φ(t₁)` for `Φ' = A(t)Φ`, `Φ(t₀) = 𝟙`, integrated as a real system of
/// dimension `2n²` (real parts then imaginary parts, row-major).
pub fn fundamental_matrix(sys: &LinearSystem, t0: f64, t1: f64, tol: f64) -> Result<Vec<Vec<Complex64>>, VariationalError> {
    let n = sys.dim();
    let nn = n * n;
    let mut y0 = vec![0.0; 2 * nn];
    for i in 0..n {
        y0[i * n + i] = 1.0;
    }
    let cfg = IntegratorConfig { abs_tol: tol, rel_tol: tol, t_start: t0, t_end: t1, ..IntegratorConfig::default() };
    let sol = dopri5(
        |t, y| {
            let a = sys.eval(Complex64::new(t, 0.0));
            let mut out = vec![0.0; 2 * nn];
            for i in 0..n {
                for j in 0..n {
                    let mut s = Complex64::new(0.0, 0.0);
                    for k in 0..n {
                        s += a[i][k] * Complex64::new(y[k * n + j], y[nn + k * n + j]);
                    }
                    out[i * n + j] = s.re;
                    out[nn + i * n + j] = s.im;
                }
            }
            Ok(out)
        },
        &y0,
        &cfg,
        |_, _| None,
    );
    if let Some((t, reason)) = sol.stop {
        return Err(VariationalError::Integration(format!("stopped at t = {t}: {reason:?}")));
    }
    let y = sol.states.last().expect("nonempty");
    Ok((0..n).map(|i| (0..n).map(|j| Complex64::new(y[i * n + j], y[nn + i * n + j])).collect()).collect())
}
