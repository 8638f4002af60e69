use std::f64::consts::PI;

use num_complex::Complex64;

use super::inverse::{crossings, laurent_parts};
use super::{EdgeWeights, MagneticField};
use crate::error::{LabError, Result};
use crate::numerics::integrate;

const QUAD_TOL: f64 = 1e-13;
/// Fields beyond this norm are treated as escaping to infinity.
const FIELD_CAP: f64 = 40.0;

/// `F(B) = (2 pi)^{-2} int log|mu_B(k)| dk`.
///
/// The `k2` integral is done with Jensen's formula, so only a
/// one-dimensional integral of `log max(|a|, |b|)` remains.
pub fn free_energy_density(b: MagneticField, w: &EdgeWeights) -> Result<f64> {
    let wb = w.with_field(b);
    let breaks = crossings(&wb);
    let f = |k1: f64| {
        let (a, c) = laurent_parts(k1, &wb);
        a.norm().max(c.norm()).ln()
    };
    Ok(integrate(f, -PI, PI, &breaks, QUAD_TOL)? / (2.0 * PI))
}

/// Analytic gradient of [`free_energy_density`] with respect to `B`.
pub fn free_energy_gradient(b: MagneticField, w: &EdgeWeights) -> Result<[f64; 2]> {
    let wb = w.with_field(b);
    let breaks = crossings(&wb);
    let i = Complex64::i();
    let d_b2 = |k1: f64| {
        let e1 = Complex64::from_polar(1.0, k1);
        let (a, c) = laurent_parts(k1, &wb);
        if a.norm_sqr() > c.norm_sqr() {
            let da = -i * wb.t2 * e1;
            (a.conj() * da).re / a.norm_sqr()
        } else {
            let dc = -wb.t3 * e1;
            (c.conj() * dc).re / c.norm_sqr()
        }
    };
    // d/dB1 log|a| = -1 where |a| > |b|, and 0 elsewhere.
    let d_b1 = |k1: f64| {
        let (a, c) = laurent_parts(k1, &wb);
        if a.norm_sqr() > c.norm_sqr() {
            -1.0
        } else {
            0.0
        }
    };
    Ok([
        integrate(d_b1, -PI, PI, &breaks, QUAD_TOL)? / (2.0 * PI),
        integrate(d_b2, -PI, PI, &breaks, QUAD_TOL)? / (2.0 * PI),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensionResult {
    /// `+inf` when the supremum is unbounded.
    pub value: f64,
    /// Maximising field, when finite.
    pub field: Option<MagneticField>,
}

fn objective(s: [f64; 2], b: [f64; 2], w: &EdgeWeights) -> Result<f64> {
    let f = free_energy_density(MagneticField::new(b[0], b[1]), w)?;
    Ok(s[0] * b[0] + s[1] * b[1] - 0.5 * (b[0] + b[1]) - f)
}

fn objective_gradient(s: [f64; 2], b: [f64; 2], w: &EdgeWeights) -> Result<[f64; 2]> {
    let g = free_energy_gradient(MagneticField::new(b[0], b[1]), w)?;
    Ok([s[0] - 0.5 - g[0], s[1] - 0.5 - g[1]])
}

/// `sigma(s) = sup_B [s . B - (B1 + B2)/2 - F(B)]` by damped Newton ascent
/// from `B = 0`.
pub fn surface_tension(s: [f64; 2], w: &EdgeWeights) -> Result<TensionResult> {
    let mut b = [0.0, 0.0];
    let mut val = objective(s, b, w)?;
    for _ in 0..200 {
        let g = objective_gradient(s, b, w)?;
        let gnorm = g[0].hypot(g[1]);
        if gnorm < 1e-10 {
            return Ok(TensionResult { value: val, field: Some(MagneticField::new(b[0], b[1])) });
        }
        // Hessian of the concave objective by differencing the gradient.
        let h = 1e-5;
        let gx = objective_gradient(s, [b[0] + h, b[1]], w)?;
        let gy = objective_gradient(s, [b[0], b[1] + h], w)?;
        let (hxx, hxy, hyy) = ((gx[0] - g[0]) / h, 0.5 * ((gx[1] - g[1]) + (gy[0] - g[0])) / h, (gy[1] - g[1]) / h);
        let det = hxx * hyy - hxy * hxy;
        let mut dir = if hxx < -1e-12 && det > 1e-20 {
            [-(hyy * g[0] - hxy * g[1]) / det, -(-hxy * g[0] + hxx * g[1]) / det]
        } else {
            g
        };
        // keep steps moderate where the free energy is nearly flat
        let dn = dir[0].hypot(dir[1]);
        if dn > 2.0 {
            dir = [2.0 * dir[0] / dn, 2.0 * dir[1] / dn];
        }
        let mut step = 1.0;
        let mut accepted = false;
        while step > 1e-10 {
            let trial = [b[0] + step * dir[0], b[1] + step * dir[1]];
            let tv = objective(s, trial, w)?;
            if tv >= val - 1e-15 {
                b = trial;
                let gained = tv - val;
                val = tv;
                accepted = true;
                if b[0].hypot(b[1]) > FIELD_CAP && gained > 0.0 {
                    return Ok(TensionResult { value: f64::INFINITY, field: None });
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            if gnorm < 1e-7 {
                return Ok(TensionResult { value: val, field: Some(MagneticField::new(b[0], b[1])) });
            }
            return Err(LabError::NonConvergence(format!("surface tension line search stalled at gradient {gnorm:e}")));
        }
    }
    Err(LabError::NonConvergence("surface tension ascent did not converge".into()))
}

/// Slope minimising the surface tension: `grad F(0) + (1/2, 1/2)`, the
/// dual point of `B = 0`.
pub fn minimizing_slope(w: &EdgeWeights) -> Result<[f64; 2]> {
    if crossings(w).len() != 2 {
        return Err(LabError::ZeroCount {
            found: crossings(w).len(),
            detail: "; minimizing slope needs the two-zero regime".into(),
        });
    }
    let g = free_energy_gradient(MagneticField::default(), w)?;
    Ok([g[0] + 0.5, g[1] + 0.5])
}
