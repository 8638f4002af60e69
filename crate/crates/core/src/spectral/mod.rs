//! Dispersion relation, Kasteleyn matrices and free-fermion thermodynamics
//! of the non-interacting dimer model.

mod inverse;
mod kasteleyn;
mod thermo;
mod zeros;

pub use inverse::{inverse_kasteleyn_infinite, InfiniteInverse, InverseTable, KasteleynInverse};
pub use kasteleyn::{
    inverse_kasteleyn, kasteleyn_matrix, sector_determinant, sector_momenta, torus_partition_function,
    torus_partition_function_log, TorusIndex, SECTOR_SIGNS,
};
pub use thermo::{free_energy_density, free_energy_gradient, minimizing_slope, surface_tension, TensionResult};
pub use zeros::{find_zeros, find_zeros_with_grid, DispersionData, Omega, DEFAULT_GRID};

use crate::error::{LabError, Result};
use num_complex::Complex64;

/// Edge weights `t1, t2, t3`; the type-4 weight is fixed to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeWeights {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

impl EdgeWeights {
    pub fn new(t1: f64, t2: f64, t3: f64) -> Result<EdgeWeights> {
        if [t1, t2, t3].iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(LabError::InvalidArgument(format!("edge weights must be positive, got ({t1}, {t2}, {t3})")));
        }
        Ok(EdgeWeights { t1, t2, t3 })
    }

    pub fn uniform() -> EdgeWeights {
        EdgeWeights { t1: 1.0, t2: 1.0, t3: 1.0 }
    }

    /// Real weight `t_r`.
    pub fn t(&self, r: u8) -> f64 {
        match r {
            1 => self.t1,
            2 => self.t2,
            3 => self.t3,
            4 => 1.0,
            _ => panic!("edge type must be in 1..=4, got {r}"),
        }
    }

    /// Kasteleyn weight `K_r = i^(r-1) t_r`.
    pub fn k(&self, r: u8) -> Complex64 {
        let t = self.t(r);
        match r {
            1 => Complex64::new(t, 0.0),
            2 => Complex64::new(0.0, t),
            3 => Complex64::new(-t, 0.0),
            _ => Complex64::new(0.0, -t),
        }
    }

    pub fn with_field(&self, b: MagneticField) -> EdgeWeights {
        EdgeWeights { t1: self.t1 * (-b.b1).exp(), t2: self.t2 * (-b.b1 - b.b2).exp(), t3: self.t3 * (-b.b2).exp() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MagneticField {
    pub b1: f64,
    pub b2: f64,
}

impl MagneticField {
    pub fn new(b1: f64, b2: f64) -> MagneticField {
        MagneticField { b1, b2 }
    }
}

/// Boundary twist of a torus Kasteleyn matrix. `theta_j` is 0 (periodic)
/// or 1/2 (anti-periodic) along grid direction `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KasteleynSector {
    anti1: bool,
    anti2: bool,
}

impl KasteleynSector {
    pub const ALL: [KasteleynSector; 4] = [
        KasteleynSector::new(false, false),
        KasteleynSector::new(false, true),
        KasteleynSector::new(true, false),
        KasteleynSector::new(true, true),
    ];

    pub const fn new(anti1: bool, anti2: bool) -> KasteleynSector {
        KasteleynSector { anti1, anti2 }
    }

    pub fn theta1(&self) -> f64 {
        if self.anti1 {
            0.5
        } else {
            0.0
        }
    }

    pub fn theta2(&self) -> f64 {
        if self.anti2 {
            0.5
        } else {
            0.0
        }
    }

    /// `(2 theta1, 2 theta2)` as integers.
    pub fn code(&self) -> (u8, u8) {
        (self.anti1 as u8, self.anti2 as u8)
    }

    /// Phase picked up by an edge that wraps `(s1, s2)` times.
    pub fn wrap_phase(&self, s1: i64, s2: i64) -> f64 {
        let odd = (self.anti1 && s1 % 2 != 0) ^ (self.anti2 && s2 % 2 != 0);
        if odd {
            -1.0
        } else {
            1.0
        }
    }
}

/// `mu(k) = t1 + i t2 e^{ik1} - t3 e^{i(k1+k2)} - i e^{ik2}`.
pub fn dispersion_mu(k: [f64; 2], w: &EdgeWeights) -> Complex64 {
    let e1 = Complex64::from_polar(1.0, k[0]);
    let e2 = Complex64::from_polar(1.0, k[1]);
    let i = Complex64::i();
    w.t1 + i * w.t2 * e1 - w.t3 * e1 * e2 - i * e2
}

/// `(d mu / dk1, d mu / dk2)`.
pub fn dispersion_gradient(k: [f64; 2], w: &EdgeWeights) -> [Complex64; 2] {
    let e1 = Complex64::from_polar(1.0, k[0]);
    let e2 = Complex64::from_polar(1.0, k[1]);
    let i = Complex64::i();
    let e12 = e1 * e2;
    [-w.t2 * e1 - i * w.t3 * e12, -i * w.t3 * e12 + e2]
}

/// Maps an angle into `[-pi, pi)`.
pub(crate) fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::PI;
    (x + PI).rem_euclid(2.0 * PI) - PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn mu_examples() {
        let w = EdgeWeights::uniform();
        assert!(dispersion_mu([0.0, 0.0], &w).norm() < 1e-15);
        assert!(dispersion_mu([PI, PI], &w).norm() < 1e-14);
        assert!(close(dispersion_mu([PI, 0.0], &w), Complex64::new(2.0, -2.0), 1e-14));
    }

    #[test]
    fn gradient_examples() {
        let w = EdgeWeights::uniform();
        let g = dispersion_gradient([0.0, 0.0], &w);
        assert!(close(g[0], Complex64::new(-1.0, -1.0), 1e-14));
        assert!(close(g[1], Complex64::new(1.0, -1.0), 1e-14));
        let g = dispersion_gradient([PI, PI], &w);
        // fixed by the conjugation symmetry: grad mu(pi - k) = -conj(grad mu(k))
        assert!(close(g[0], Complex64::new(1.0, -1.0), 1e-14));
        assert!(close(g[1], Complex64::new(-1.0, -1.0), 1e-14));
    }

    #[test]
    fn weights_validate() {
        assert!(EdgeWeights::new(1.0, 0.0, 1.0).is_err());
        assert!(EdgeWeights::new(1.0, f64::NAN, 1.0).is_err());
        let w = EdgeWeights::new(1.0, 2.0, 3.0).unwrap();
        assert_eq!(w.with_field(MagneticField::default()), w);
        assert_eq!(w.k(2), Complex64::new(0.0, 2.0));
        assert_eq!(w.k(4), Complex64::new(0.0, -1.0));
    }

    proptest! {
        #[test]
        fn gradient_matches_finite_differences(
            t1 in 0.2f64..3.0, t2 in 0.2f64..3.0, t3 in 0.2f64..3.0,
            k1 in -PI..PI, k2 in -PI..PI,
        ) {
            let w = EdgeWeights::new(t1, t2, t3).unwrap();
            let h = 1e-5;
            let g = dispersion_gradient([k1, k2], &w);
            let d1 = (dispersion_mu([k1 + h, k2], &w) - dispersion_mu([k1 - h, k2], &w)) / (2.0 * h);
            let d2 = (dispersion_mu([k1, k2 + h], &w) - dispersion_mu([k1, k2 - h], &w)) / (2.0 * h);
            prop_assert!(close(g[0], d1, 1e-8));
            prop_assert!(close(g[1], d2, 1e-8));
        }

        #[test]
        fn conjugation_symmetry(
            t1 in 0.2f64..3.0, t2 in 0.2f64..3.0, t3 in 0.2f64..3.0,
            k1 in -PI..PI, k2 in -PI..PI,
        ) {
            let w = EdgeWeights::new(t1, t2, t3).unwrap();
            let a = dispersion_mu([PI - k1, PI - k2], &w);
            let b = dispersion_mu([k1, k2], &w).conj();
            prop_assert!(close(a, b, 1e-13));
        }
    }
}
