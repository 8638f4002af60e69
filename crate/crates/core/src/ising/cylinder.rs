//! Energy correlations on a cylinder, periodic in the horizontal direction,
//! from the image sum
//! `g_cyl(x, y) = sum_n (-1)^{n1+n2} [g(x - y + l_n) + (-1)^a g(x - y~ + l_n)]`
//! with `g(x) = |x|^{-2} [[x1, x2], [x2, -x1]]`, `l_n = (n1 l1, n2 l2)` and
//! `y~ = (y1, -y2)`.
//!
//! `g(u)` is read off `conj(1 / u)` for complex `u`, so the image sums are
//! twisted Eisenstein-type series. The direction with the shorter period is
//! summed in closed form (`sum_n (-1)^n / (w + n) = pi / sin(pi w)`), and
//! the other one converges exponentially; the returned certificate is the
//! change between truncations `N` and `N - 4`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::EnergyObservable;
use crate::error::{LabError, Result};
use crate::numerics::{pfaffian, CMatrix, SkewMatrix};

/// Required agreement between successive truncations.
pub const CERTIFICATE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderSpec {
    pub l1: f64,
    pub l2: f64,
    /// Largest outer image index summed.
    pub max_images: usize,
}

impl CylinderSpec {
    pub fn new(l1: f64, l2: f64) -> Result<CylinderSpec> {
        if !(l1 > 0.0 && l2 > 0.0 && l1.is_finite() && l2.is_finite()) {
            return Err(LabError::InvalidArgument(format!("cylinder sides {l1} x {l2}")));
        }
        let r = l1 / l2;
        if !(1e-2..=1e2).contains(&r) {
            return Err(LabError::Guard(format!("aspect ratio {r:e} outside [1e-2, 1e2]")));
        }
        Ok(CylinderSpec { l1, l2, max_images: 256 })
    }

    pub fn with_max_images(mut self, n: usize) -> CylinderSpec {
        self.max_images = n.max(4);
        self
    }

    fn check_interior(&self, x: [f64; 2]) -> Result<()> {
        if !(x[0].is_finite() && x[1] > 0.0 && x[1] < self.l2) {
            return Err(LabError::OutsideDomain(format!("{x:?} is not inside the cylinder of height {}", self.l2)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderGreen {
    /// `g[a-1][b-1]`.
    pub g: [[f64; 2]; 2],
    pub certificate: f64,
    /// Outer images used.
    pub images: usize,
}

/// `csc w`, stable for large `|Im w|`.
fn csc(w: Complex64) -> Complex64 {
    let s = if w.im >= 0.0 { 1.0 } else { -1.0 };
    let q = (Complex64::i() * s * w).exp();
    -2.0 * Complex64::i() * s * q / (1.0 - q * q)
}

fn parity(n: i64) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

struct Twisted {
    value: Complex64,
    certificate: f64,
    images: usize,
}

/// `conj sum_n (-1)^{n1+n2} / (u + n1 l1 + i n2 l2)`.
fn twisted_sum(u: Complex64, spec: &CylinderSpec) -> Result<Twisted> {
    let (l1, l2) = (spec.l1, spec.l2);
    let r1 = u.re - l1 * (u.re / l1).round();
    let r2 = u.im - l2 * (u.im / l2).round();
    if r1.hypot(r2) <= 1e-12 * l1.max(l2) {
        return Err(LabError::Coincident);
    }
    let row = |n: i64| -> Complex64 {
        if l1 <= l2 {
            let w = u + Complex64::new(0.0, n as f64 * l2);
            parity(n) * PI / l1 * csc(PI * w / l1)
        } else {
            let w = u + n as f64 * l1;
            // pi / (l2 sinh(pi w / l2)), with 1 / sinh(v) = i csc(i v)
            parity(n) * PI / l2 * Complex64::i() * csc(Complex64::i() * PI * w / l2)
        }
    };
    let mut partial = vec![row(0)];
    let mut n = 0usize;
    loop {
        n += 1;
        let s = partial[n - 1] + row(n as i64) + row(-(n as i64));
        if !(s.re.is_finite() && s.im.is_finite()) {
            return Err(LabError::Coincident);
        }
        partial.push(s);
        if n >= 4 {
            let cert = (s - partial[n - 4]).norm();
            if cert <= 1e-15 * (1.0 + s.norm()) || n >= spec.max_images {
                if cert > CERTIFICATE_TOL {
                    return Err(LabError::NonConvergence(format!(
                        "cylinder image sum: certificate {cert:e} after {n} images"
                    )));
                }
                return Ok(Twisted { value: s.conj(), certificate: cert, images: n });
            }
        }
    }
}

fn g_of(s: Complex64) -> [[f64; 2]; 2] {
    [[s.re, s.im], [s.im, -s.re]]
}

/// The 2x2 cylinder kernel `g_cyl(x, y)` for interior points.
pub fn cylinder_green(x: [f64; 2], y: [f64; 2], spec: &CylinderSpec) -> Result<CylinderGreen> {
    spec.check_interior(x)?;
    spec.check_interior(y)?;
    let bulk = twisted_sum(Complex64::new(x[0] - y[0], x[1] - y[1]), spec)?;
    let image = twisted_sum(Complex64::new(x[0] - y[0], x[1] + y[1]), spec)?;
    let (gb, gi) = (g_of(bulk.value), g_of(image.value));
    let mut g = [[0.0; 2]; 2];
    for a in 0..2 {
        // (-1)^a with a = 1, 2
        let s = if a == 0 { -1.0 } else { 1.0 };
        for b in 0..2 {
            g[a][b] = gb[a][b] + s * gi[a][b];
        }
    }
    Ok(CylinderGreen { g, certificate: bulk.certificate.max(image.certificate), images: bulk.images.max(image.images) })
}

/// The antisymmetric `2n x 2n` matrix `A_{(i,a),(j,b)} = 1_{i != j} g_cyl_ab(x_i, x_j)`.
pub fn cylinder_matrix(points: &[EnergyObservable], spec: &CylinderSpec) -> Result<SkewMatrix> {
    let n = points.len();
    let mut a = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let g = cylinder_green(points[i].x, points[j].x, spec)?.g;
            for p in 0..2 {
                for q in 0..2 {
                    a[(2 * i + p, 2 * j + q)] = Complex64::new(g[p][q], 0.0);
                }
            }
        }
    }
    SkewMatrix::new(a)
}

/// `Z2^n (-pi)^{-n} Pf A`.
pub fn cylinder_energy(points: &[EnergyObservable], spec: &CylinderSpec, z2: f64) -> Result<f64> {
    if points.is_empty() {
        return Err(LabError::InvalidArgument("no points".into()));
    }
    if !(z2 > 0.0 && z2.is_finite()) {
        return Err(LabError::InvalidArgument(format!("Z2 = {z2}")));
    }
    let n = points.len() as i32;
    let pf = pfaffian(&cylinder_matrix(points, spec)?);
    Ok(z2.powi(n) * (-PI).powi(-n) * pf.re)
}
