//! Continuum correlation functions of the critical Ising model.

mod cylinder;
mod transport;

pub use cylinder::{cylinder_energy, cylinder_green, cylinder_matrix, CylinderGreen, CylinderSpec};
pub use transport::{conformal_transport, Compose, ConformalMap, DiscAutomorphism, DiscToHalfPlane, HalfPlaneIdentity};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::numerics::{pfaffian, SkewMatrix};

/// Point `x1 + i x2` of the plane.
pub type ComplexPoint = Complex64;

/// Spin two-point amplitude in `<s(x) s(y)> ~ A |x - y|^{-1/4}`.
pub const SPIN_AMPLITUDE: f64 = 0.70338016;

/// Largest number of points accepted by [`plane_spin`] (the sum has
/// `binom(n, n/2)` terms).
pub const SPIN_POINT_CAP: usize = 24;

/// Rescaled energy observable at `x` along lattice direction `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyObservable {
    pub x: [f64; 2],
    pub j: u8,
}

impl EnergyObservable {
    pub fn new(x: [f64; 2], j: u8) -> Result<EnergyObservable> {
        if !(1..=2).contains(&j) {
            return Err(LabError::InvalidArgument(format!("direction {j} must be 1 or 2")));
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(LabError::InvalidArgument(format!("non-finite position {x:?}")));
        }
        Ok(EnergyObservable { x, j })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Plus,
    Minus,
    Free,
}

fn check_distinct(z: &[Complex64]) -> Result<()> {
    for i in 0..z.len() {
        if !(z[i].re.is_finite() && z[i].im.is_finite()) {
            return Err(LabError::InvalidArgument(format!("non-finite point {}", z[i])));
        }
        for j in 0..i {
            if (z[i] - z[j]).norm() <= 1e-14 * (1.0 + z[i].norm()) {
                return Err(LabError::Coincident);
            }
        }
    }
    Ok(())
}

fn cauchy_pfaffian(z: &[Complex64]) -> Complex64 {
    let m = SkewMatrix::from_upper(z.len(), |i, j| 1.0 / (z[i] - z[j]));
    pfaffian(&m)
}

/// `pi^{-n} |Pf M|^2` with `M_ij = 1 / (z_i - z_j)`; zero for odd `n`.
pub fn plane_energy(z: &[ComplexPoint]) -> Result<f64> {
    if z.is_empty() {
        return Err(LabError::InvalidArgument("no points".into()));
    }
    check_distinct(z)?;
    Ok(cauchy_pfaffian(z).norm_sqr() / PI.powi(z.len() as i32))
}

fn halfplane_value(z: &[ComplexPoint]) -> Result<Complex64> {
    if z.is_empty() {
        return Err(LabError::InvalidArgument("no points".into()));
    }
    if let Some(p) = z.iter().find(|p| !(p.im > 0.0)) {
        return Err(LabError::OutsideDomain(format!("{p} is not in the upper half-plane")));
    }
    check_distinct(z)?;
    let doubled: Vec<Complex64> = z.iter().copied().chain(z.iter().rev().map(|p| p.conj())).collect();
    Ok(cauchy_pfaffian(&doubled) / (Complex64::i() * PI).powi(z.len() as i32))
}

/// Energy correlation in the upper half-plane. For `+`/`-` boundary spins
/// this is `(i pi)^{-n} Pf M(z_1..z_n, conj z_n..conj z_1)`; free
/// boundary multiplies by `(-1)^n`.
pub fn halfplane_energy(z: &[ComplexPoint], bc: BoundaryCondition) -> Result<f64> {
    let plus = halfplane_value(z)?.re;
    Ok(match bc {
        BoundaryCondition::Free if z.len() % 2 == 1 => -plus,
        _ => plus,
    })
}

/// Imaginary part dropped by [`halfplane_energy`]; zero up to rounding.
pub fn halfplane_energy_imaginary(z: &[ComplexPoint]) -> Result<f64> {
    Ok(halfplane_value(z)?.im)
}

/// Plane spin correlation for even `n`:
/// `[(A/sqrt 2)^n sum_{mu, sum mu = 0} prod_{i<j} |z_ij|^{mu_i mu_j / 2}]^{1/2}`.
pub fn plane_spin(z: &[ComplexPoint]) -> Result<f64> {
    let n = z.len();
    if n == 0 || n % 2 == 1 {
        return Err(LabError::InvalidArgument(format!("spin correlation needs an even number of points, got {n}")));
    }
    if n > SPIN_POINT_CAP {
        return Err(LabError::InvalidArgument(format!("{n} points exceed the cap {SPIN_POINT_CAP}")));
    }
    check_distinct(z)?;
    let mut logd = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                logd[i * n + j] = (z[i] - z[j]).norm().ln();
            }
        }
    }
    // exponents for every balanced sign vector, then a log-sum-exp
    let mut exps = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n / 2 {
            continue;
        }
        let mu = |i: usize| if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
        let mut e = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                e += mu(i) * mu(j) * 0.5 * logd[i * n + j];
            }
        }
        exps.push(e);
    }
    let top = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = exps.iter().map(|e| (e - top).exp()).sum();
    let log = n as f64 * (SPIN_AMPLITUDE / 2f64.sqrt()).ln() + top + sum.ln();
    Ok((0.5 * log).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn plane_energy_two_points() {
        let v = plane_energy(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((v - 1.0 / (PI * PI)).abs() < 1e-15);
        let v = plane_energy(&[c(0.3, 0.1), c(0.3, 2.1)]).unwrap();
        assert!((v - 1.0 / (4.0 * PI * PI)).abs() < 1e-15);
        let z = [c(1.2, -0.7), c(-3.0, 0.4)];
        assert!((plane_energy(&z).unwrap() * PI * PI * (z[0] - z[1]).norm_sqr() - 1.0).abs() < 1e-14);
        assert_eq!(plane_energy(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 1.0)]).unwrap(), 0.0);
        assert_eq!(plane_energy(&[c(1.0, 1.0), c(1.0, 1.0)]), Err(LabError::Coincident));
    }

    #[test]
    fn plane_energy_four_point_expansion() {
        let z = [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        let m = |i: usize, j: usize| 1.0 / (z[i] - z[j]);
        let pf = m(0, 1) * m(2, 3) - m(0, 2) * m(1, 3) + m(0, 3) * m(1, 2);
        let v = plane_energy(&z).unwrap();
        assert!((v - pf.norm_sqr() / PI.powi(4)).abs() < 1e-15);
    }

    #[test]
    fn halfplane_bulk_limit_and_reality() {
        let plane = 1.0 / (PI * PI);
        let mut prev = f64::INFINITY;
        for h in [10.0, 100.0, 1000.0] {
            let z = [c(0.0, h), c(1.0, h)];
            let v = halfplane_energy(&z, BoundaryCondition::Plus).unwrap();
            let err = (v - plane).abs();
            assert!(err < 1.0 / (h * h), "{h} {v}");
            assert!(err < prev);
            prev = err;
        }
        let z = [c(0.2, 0.5), c(-1.0, 2.0), c(0.7, 0.1)];
        for k in 1..=3 {
            assert!(halfplane_energy_imaginary(&z[..k]).unwrap().abs() < 1e-12);
            let plus = halfplane_energy(&z[..k], BoundaryCondition::Plus).unwrap();
            let free = halfplane_energy(&z[..k], BoundaryCondition::Free).unwrap();
            let minus = halfplane_energy(&z[..k], BoundaryCondition::Minus).unwrap();
            assert_eq!(free, if k % 2 == 0 { plus } else { -plus });
            assert_eq!(minus, plus);
        }
        assert!(halfplane_energy(&[c(0.0, 0.0)], BoundaryCondition::Plus).is_err());
    }

    #[test]
    fn spin_two_points() {
        let z = [c(0.0, 0.0), c(3.0, 4.0)];
        let v = plane_spin(&z).unwrap();
        assert!((v - SPIN_AMPLITUDE * 5f64.powf(-0.25)).abs() < 1e-12);
        assert!(plane_spin(&z[..1]).is_err());
    }

    #[test]
    fn spin_four_points_direct_sum() {
        let z = [c(0.0, 0.0), c(1.0, 0.0), c(2.5, 0.0), c(4.0, 0.0)];
        let d = |i: usize, j: usize| (z[i] - z[j]).norm();
        let mut s = 0.0;
        for mu in [[1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1], [-1, 1, 1, -1], [-1, 1, -1, 1], [-1, -1, 1, 1]] {
            let mut p = 1.0;
            for i in 0..4 {
                for j in i + 1..4 {
                    p *= d(i, j).powf((mu[i] * mu[j]) as f64 / 2.0);
                }
            }
            s += p;
        }
        let direct = ((SPIN_AMPLITUDE / 2f64.sqrt()).powi(4) * s).sqrt();
        assert!((plane_spin(&z).unwrap() - direct).abs() < 1e-14);
        let perm = [z[2], z[0], z[3], z[1]];
        assert!((plane_spin(&perm).unwrap() - direct).abs() < 1e-14);
    }
}
