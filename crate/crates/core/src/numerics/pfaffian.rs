//! Complex Pfaffians by skew-symmetric Gaussian elimination (Parlett-Reid).

use super::linalg::CMatrix;
use crate::error::{LabError, Result};
use num_complex::Complex64;

/// Absolute antisymmetry tolerance, scaled by `max(1, max|a_ij|)`.
pub const ANTISYMMETRY_TOL: f64 = 1e-10;
/// Relative pivot threshold below which the Pfaffian is reported as zero.
pub const PIVOT_TOL: f64 = 1e-13;

/// An even-dimensional antisymmetric complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix(CMatrix);

impl SkewMatrix {
    /// Validates `a = -a^T`. Odd dimensions are accepted here; [`pfaffian`]
    /// returns zero for them.
    pub fn new(a: CMatrix) -> Result<SkewMatrix> {
        if !a.is_square() {
            return Err(LabError::InvalidArgument("skew matrix must be square".into()));
        }
        let defect = antisymmetry_defect(&a);
        if defect > ANTISYMMETRY_TOL * a.max_abs().max(1.0) {
            return Err(LabError::NotAntisymmetric(defect));
        }
        Ok(SkewMatrix(a))
    }

    /// Builds from the strict upper triangle; `upper(i, j)` is called for `i < j`.
    pub fn from_upper(n: usize, mut upper: impl FnMut(usize, usize) -> Complex64) -> SkewMatrix {
        let mut a = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = upper(i, j);
                a[(i, j)] = v;
                a[(j, i)] = -v;
            }
        }
        SkewMatrix(a)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

pub fn antisymmetry_defect(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] + a[(j, i)]).norm());
        }
    }
    worst
}

/// Pfaffian of a skew matrix. Odd dimension gives zero.
pub fn pfaffian(a: &SkewMatrix) -> Complex64 {
    let n = a.dim();
    let zero = Complex64::new(0.0, 0.0);
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if n % 2 == 1 {
        return zero;
    }
    let scale = a.0.max_abs();
    if scale == 0.0 {
        return zero;
    }
    let mut m = a.0.clone();
    let mut pf = Complex64::new(1.0, 0.0);
    for k in (0..n - 1).step_by(2) {
        let (kp, best) =
            ((k + 1)..n).map(|i| (i, m[(i, k)].norm())).fold((k + 1, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if kp != k + 1 {
            m.swap_rows(k + 1, kp);
            m.swap_cols(k + 1, kp);
            pf = -pf;
        }
        if best <= PIVOT_TOL * scale {
            return zero;
        }
        let pivot = m[(k, k + 1)];
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<Complex64> = ((k + 2)..n).map(|j| m[(k, j)] / pivot).collect();
            let col: Vec<Complex64> = ((k + 2)..n).map(|i| m[(i, k + 1)]).collect();
            for (ii, i) in ((k + 2)..n).enumerate() {
                for (jj, j) in ((k + 2)..n).enumerate() {
                    let upd = tau[ii] * col[jj] - col[ii] * tau[jj];
                    m[(i, j)] += upd;
                }
            }
        }
    }
    pf
}

/// Convenience: Pfaffian of a matrix that should be antisymmetric.
pub fn pfaffian_checked(a: &CMatrix) -> Result<Complex64> {
    Ok(pfaffian(&SkewMatrix::new(a.clone())?))
}
