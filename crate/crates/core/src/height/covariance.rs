use std::f64::consts::PI;

use num_complex::Complex64;

use crate::correlations::two_point_truncated;
use crate::error::{LabError, Result};
use crate::lattice::{grid_to_label, plane_dual_path, Face};
use crate::spectral::{DispersionData, KasteleynInverse, Omega};

/// Label coordinates of a face centre.
pub fn face_position(f: Face) -> [f64; 2] {
    let (a, b) = grid_to_label((f.0 as f64 + 0.5, f.1 as f64 + 0.5));
    [a, b]
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Log-correlated prediction with stiffness `nu / (2 pi^2)` and complex
/// coordinate `phi_+(x) = c1 x1 + c2 x2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GffPrediction {
    pub nu: f64,
    pub phi: [Complex64; 2],
}

impl GffPrediction {
    pub fn new(nu: f64, phi: [Complex64; 2]) -> Result<GffPrediction> {
        if !(nu > 0.0) {
            return Err(LabError::InvalidArgument(format!("stiffness nu = {nu} must be positive")));
        }
        Ok(GffPrediction { nu, phi })
    }

    pub fn from_dispersion(d: &DispersionData, nu: f64) -> Result<GffPrediction> {
        Self::new(nu, [d.dphi(Omega::Plus, 1), d.dphi(Omega::Plus, 2)])
    }

    pub fn map(&self, x: [f64; 2]) -> Complex64 {
        self.phi[0] * x[0] + self.phi[1] * x[1]
    }
}

/// `Cov(h(x1) - h(x2); h(x3) - h(x4))` predicted by
/// `(nu / 2 pi^2) Re log [(z4 - z1)(z3 - z2) / ((z4 - z2)(z3 - z1))]`.
pub fn gff_covariance_prediction(x: [[f64; 2]; 4], p: &GffPrediction) -> Result<f64> {
    let z: Vec<Complex64> = x.iter().map(|&v| p.map(v)).collect();
    let num = (z[3] - z[0]) * (z[2] - z[1]);
    let den = (z[3] - z[1]) * (z[2] - z[0]);
    if num.norm() == 0.0 || den.norm() == 0.0 {
        return Err(LabError::Coincident);
    }
    Ok(p.nu / (2.0 * PI * PI) * (num / den).norm().ln())
}

/// Exact `Cov(h(f1) - h(f2); h(f3) - h(f4))` in the infinite plane as the
/// double sum of truncated dimer correlations over two L-shaped dual paths.
///
/// The paths must be disjoint and at least a quarter of the smallest
/// point separation apart.
pub fn exact_height_covariance(f: [Face; 4], kinv: &impl KasteleynInverse) -> Result<f64> {
    if f[0] == f[1] || f[2] == f[3] {
        return Ok(0.0);
    }
    // path C_{f2 -> f1} gives h(f1) - h(f2)
    let p1 = plane_dual_path(f[1], f[0]);
    let p2 = plane_dual_path(f[3], f[2]);
    let pos: Vec<[f64; 2]> = f.iter().map(|&x| face_position(x)).collect();
    let mut sep = f64::INFINITY;
    for i in 0..4 {
        for j in i + 1..4 {
            sep = sep.min(dist(pos[i], pos[j]));
        }
    }
    let gap = p1
        .faces
        .iter()
        .flat_map(|a| p2.faces.iter().map(move |b| dist(face_position(*a), face_position(*b))))
        .fold(f64::INFINITY, f64::min);
    if gap < 0.25 * sep || p1.crossed.iter().any(|(e, _)| p2.crossed.iter().any(|(e2, _)| e == e2)) {
        return Err(LabError::InvalidArgument(format!("dual paths too close (gap {gap:.2}, separation {sep:.2})")));
    }
    let mut total = 0.0;
    for (e, s) in &p1.crossed {
        let mut row = 0.0;
        for (e2, s2) in &p2.crossed {
            row += *s2 as f64 * two_point_truncated(*e, *e2, kinv)?;
        }
        total += *s as f64 * row;
    }
    Ok(total)
}
