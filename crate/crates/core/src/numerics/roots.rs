//! Newton refinement for zeros of a complex function of two real variables.

use crate::error::{LabError, Result};
use num_complex::Complex64;

/// Solves `f(k) = 0` for `k` in `R^2`, where `f` returns the value and the
/// two partial derivatives. Converges when `|f| < tol`.
pub fn newton_2d<F>(f: F, start: [f64; 2], tol: f64, max_iter: usize) -> Result<[f64; 2]>
where
    F: Fn([f64; 2]) -> (Complex64, [Complex64; 2]),
{
    let mut k = start;
    for _ in 0..max_iter {
        let (v, [d1, d2]) = f(k);
        if v.norm() < tol {
            return Ok(k);
        }
        // Real Jacobian of (Re f, Im f) with respect to (k1, k2).
        let (a, b, c, d) = (d1.re, d2.re, d1.im, d2.im);
        let det = a * d - b * c;
        if det.abs() < 1e-300 {
            return Err(LabError::NonConvergence("singular Jacobian in Newton step".into()));
        }
        let dk1 = (d * v.re - b * v.im) / det;
        let dk2 = (-c * v.re + a * v.im) / det;
        k = [k[0] - dk1, k[1] - dk2];
    }
    let (v, _) = f(k);
    if v.norm() < tol {
        Ok(k)
    } else {
        Err(LabError::NonConvergence(format!("Newton stalled at |f| = {:e} after {max_iter} iterations", v.norm())))
    }
}
