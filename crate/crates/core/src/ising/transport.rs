use num_complex::Complex64;

use crate::error::{LabError, Result};

/// A conformal map of a domain onto the upper half-plane, or between
/// intermediate domains when composed.
pub trait ConformalMap {
    fn map(&self, z: Complex64) -> Complex64;
    fn derivative(&self, z: Complex64) -> Complex64;
    fn contains(&self, _z: Complex64) -> bool {
        true
    }
}

/// Identity on the upper half-plane.
#[derive(Debug, Clone, Copy, Default)]
pub struct HalfPlaneIdentity;

impl ConformalMap for HalfPlaneIdentity {
    fn map(&self, z: Complex64) -> Complex64 {
        z
    }
    fn derivative(&self, _z: Complex64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
    fn contains(&self, z: Complex64) -> bool {
        z.im > 0.0
    }
}

/// `z -> i (1 + z) / (1 - z)`, unit disc onto the upper half-plane.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiscToHalfPlane;

impl ConformalMap for DiscToHalfPlane {
    fn map(&self, z: Complex64) -> Complex64 {
        Complex64::i() * (1.0 + z) / (1.0 - z)
    }
    fn derivative(&self, z: Complex64) -> Complex64 {
        2.0 * Complex64::i() / ((1.0 - z) * (1.0 - z))
    }
    fn contains(&self, z: Complex64) -> bool {
        z.norm() < 1.0
    }
}

/// `z -> e^{i theta} (z - a) / (1 - conj(a) z)` on the unit disc.
#[derive(Debug, Clone, Copy)]
pub struct DiscAutomorphism {
    a: Complex64,
    rotation: Complex64,
}

impl DiscAutomorphism {
    pub fn new(a: Complex64, theta: f64) -> Result<DiscAutomorphism> {
        if !(a.norm() < 1.0) {
            return Err(LabError::InvalidArgument(format!("|a| = {} must be below 1", a.norm())));
        }
        Ok(DiscAutomorphism { a, rotation: Complex64::from_polar(1.0, theta) })
    }
}

impl ConformalMap for DiscAutomorphism {
    fn map(&self, z: Complex64) -> Complex64 {
        self.rotation * (z - self.a) / (1.0 - self.a.conj() * z)
    }
    fn derivative(&self, z: Complex64) -> Complex64 {
        let d = 1.0 - self.a.conj() * z;
        self.rotation * (1.0 - self.a.norm_sqr()) / (d * d)
    }
    fn contains(&self, z: Complex64) -> bool {
        z.norm() < 1.0
    }
}

/// `second` after `first`.
#[derive(Debug, Clone, Copy)]
pub struct Compose<F, G> {
    pub first: F,
    pub second: G,
}

impl<F: ConformalMap, G: ConformalMap> ConformalMap for Compose<F, G> {
    fn map(&self, z: Complex64) -> Complex64 {
        self.second.map(self.first.map(z))
    }
    fn derivative(&self, z: Complex64) -> Complex64 {
        self.second.derivative(self.first.map(z)) * self.first.derivative(z)
    }
    fn contains(&self, z: Complex64) -> bool {
        self.first.contains(z) && self.second.contains(self.first.map(z))
    }
}

/// `prod |phi'(z_i)|^delta` times `target` evaluated at the images, which
/// must be distinct points of the upper half-plane. Use `delta = 1` for the
/// energy and `1/8` for the spin.
pub fn conformal_transport(
    map: &impl ConformalMap,
    z: &[Complex64],
    delta: f64,
    target: impl Fn(&[Complex64]) -> Result<f64>,
) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(LabError::InvalidArgument(format!("scaling exponent {delta}")));
    }
    let mut images = Vec::with_capacity(z.len());
    let mut factor = 1.0;
    for &p in z {
        if !map.contains(p) {
            return Err(LabError::OutsideDomain(format!("{p} outside the source domain")));
        }
        let w = map.map(p);
        if !(w.im > 0.0) || !w.re.is_finite() {
            return Err(LabError::OutsideDomain(format!("{p} maps to {w}, not in the upper half-plane")));
        }
        if images.iter().any(|q: &Complex64| (q - w).norm() <= 1e-14 * (1.0 + w.norm())) {
            return Err(LabError::Coincident);
        }
        images.push(w);
        factor *= map.derivative(p).norm().powf(delta);
    }
    Ok(factor * target(&images)?)
}
