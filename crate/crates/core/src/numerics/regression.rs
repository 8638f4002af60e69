//! Weighted least squares on log-log data.

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    /// `y = amplitude * R^exponent`.
    pub exponent: f64,
    pub amplitude: f64,
    pub exponent_err: f64,
    pub amplitude_err: f64,
    /// Reduced chi-square; NaN when there are no degrees of freedom.
    pub chi2_dof: f64,
    /// True when only two points were given: exact interpolation, infinite errors.
    pub exact_interpolation: bool,
}

/// Straight-line fit `y = a + b x` with weights `1/sigma^2`.
/// Returns `(a, b, var_a, var_b, cov_ab, chi2)`.
pub fn weighted_line(x: &[f64], y: &[f64], sigma: Option<&[f64]>) -> Result<(f64, f64, f64, f64, f64, f64)> {
    let n = x.len();
    if n != y.len() || sigma.is_some_and(|s| s.len() != n) {
        return Err(LabError::InvalidArgument("length mismatch".into()));
    }
    if n < 2 {
        return Err(LabError::Fit("need at least two points".into()));
    }
    let w: Vec<f64> = match sigma {
        Some(s) => s.iter().map(|&e| if e > 0.0 { 1.0 / (e * e) } else { f64::NAN }).collect(),
        None => vec![1.0; n],
    };
    if w.iter().any(|v| !v.is_finite()) {
        return Err(LabError::Fit("nonpositive error bar".into()));
    }
    let sw: f64 = w.iter().sum();
    let sx: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let sy: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum();
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let sxy: f64 = w.iter().zip(x).zip(y).map(|((w, x), y)| w * x * y).sum();
    let det = sw * sxx - sx * sx;
    // condition guard relative to scale of the normal matrix
    if det.abs() <= 1e-12 * (sw * sxx).abs().max(1e-300) {
        return Err(LabError::Fit("rank-deficient design (all x equal)".into()));
    }
    let b = (sw * sxy - sx * sy) / det;
    let a = (sxx * sy - sx * sxy) / det;
    let chi2: f64 = w.iter().zip(x).zip(y).map(|((w, x), y)| w * (y - a - b * x).powi(2)).sum();
    Ok((a, b, sxx / det, sw / det, -sx / det, chi2))
}

/// Fits `y = A R^p` by weighted least squares on `(ln R, ln y)`.
///
/// `errors` are absolute standard errors of `y`; they propagate to
/// `sigma_ln_y = err / y`. Without errors the parameter covariance is scaled
/// by the residual variance.
pub fn power_law_fit(r: &[f64], y: &[f64], errors: Option<&[f64]>) -> Result<PowerLawFit> {
    if r.len() != y.len() {
        return Err(LabError::InvalidArgument("length mismatch".into()));
    }
    if y.iter().any(|&v| !(v > 0.0)) || r.iter().any(|&v| !(v > 0.0)) {
        return Err(LabError::Fit("power-law fit needs positive R and y".into()));
    }
    let lx: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let sig: Option<Vec<f64>> = errors.map(|e| e.iter().zip(y).map(|(e, y)| e / y).collect());
    let (a, b, va, vb, _, chi2) = weighted_line(&lx, &ly, sig.as_deref())?;
    let n = r.len();
    if n == 2 {
        return Ok(PowerLawFit {
            exponent: b,
            amplitude: a.exp(),
            exponent_err: f64::INFINITY,
            amplitude_err: f64::INFINITY,
            chi2_dof: f64::NAN,
            exact_interpolation: true,
        });
    }
    let dof = (n - 2) as f64;
    let scale = if errors.is_some() { 1.0 } else { chi2 / dof };
    Ok(PowerLawFit {
        exponent: b,
        amplitude: a.exp(),
        exponent_err: (vb * scale).sqrt(),
        amplitude_err: a.exp() * (va * scale).sqrt(),
        chi2_dof: chi2 / dof,
        exact_interpolation: false,
    })
}
