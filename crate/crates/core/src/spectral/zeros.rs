use std::f64::consts::PI;

use num_complex::Complex64;

use super::{dispersion_gradient, dispersion_mu, wrap_angle, EdgeWeights};
use crate::error::{LabError, Result};
use crate::numerics::newton_2d;

pub const DEFAULT_GRID: usize = 512;
const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;
const GRADIENT_FLOOR: f64 = 1e-8;

/// Label of a Fermi point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Omega {
    Plus,
    Minus,
}

impl Omega {
    pub const BOTH: [Omega; 2] = [Omega::Plus, Omega::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Omega::Plus => 1.0,
            Omega::Minus => -1.0,
        }
    }

    fn idx(self) -> usize {
        match self {
            Omega::Plus => 0,
            Omega::Minus => 1,
        }
    }

    pub fn flip(self) -> Omega {
        match self {
            Omega::Plus => Omega::Minus,
            Omega::Minus => Omega::Plus,
        }
    }
}

/// The two simple zeros of `mu` and the derivatives there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionData {
    pub weights: EdgeWeights,
    pub p_plus: [f64; 2],
    pub p_minus: [f64; 2],
    /// `alpha_omega = d mu / dk1 (p_omega)`, indexed `[plus, minus]`.
    pub alpha: [Complex64; 2],
    /// `beta_omega = d mu / dk2 (p_omega)`.
    pub beta: [Complex64; 2],
    pub nondegenerate: bool,
}

impl DispersionData {
    pub fn p(&self, w: Omega) -> [f64; 2] {
        match w {
            Omega::Plus => self.p_plus,
            Omega::Minus => self.p_minus,
        }
    }

    pub fn alpha(&self, w: Omega) -> Complex64 {
        self.alpha[w.idx()]
    }

    pub fn beta(&self, w: Omega) -> Complex64 {
        self.beta[w.idx()]
    }

    /// `phi_omega(x) = beta_omega x1 - alpha_omega x2`.
    pub fn phi(&self, w: Omega, x: [f64; 2]) -> Complex64 {
        self.beta(w) * x[0] - self.alpha(w) * x[1]
    }

    /// `d phi_omega / dx_j`.
    pub fn dphi(&self, w: Omega, j: usize) -> Complex64 {
        match j {
            1 => self.beta(w),
            2 => -self.alpha(w),
            _ => panic!("direction must be 1 or 2"),
        }
    }
}

/// Zeros of `mu` from a `DEFAULT_GRID^2` scan refined by Newton's method.
pub fn find_zeros(w: &EdgeWeights) -> Result<DispersionData> {
    find_zeros_with_grid(w, DEFAULT_GRID)
}

pub fn find_zeros_with_grid(w: &EdgeWeights, n: usize) -> Result<DispersionData> {
    if n < 8 {
        return Err(LabError::InvalidArgument("zero-finding grid below 8".into()));
    }
    let h = 2.0 * PI / n as f64;
    let at = |i: usize, j: usize| [-PI + i as f64 * h, -PI + j as f64 * h];
    let mag: Vec<f64> = (0..n * n).map(|idx| dispersion_mu(at(idx % n, idx / n), w).norm()).collect();
    // Lipschitz bound: no zero can sit in a cell whose corner value exceeds this.
    let lip = w.t2 + 2.0 * w.t3 + 1.0;
    let threshold = lip * h;
    let f = |k: [f64; 2]| (dispersion_mu(k, w), dispersion_gradient(k, w));
    let mut zeros: Vec<[f64; 2]> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let v = mag[j * n + i];
            if v > threshold {
                continue;
            }
            let is_min = (-1i64..=1).all(|dj| {
                (-1i64..=1).all(|di| {
                    let ii = (i as i64 + di).rem_euclid(n as i64) as usize;
                    let jj = (j as i64 + dj).rem_euclid(n as i64) as usize;
                    (di == 0 && dj == 0) || mag[jj * n + ii] >= v
                })
            });
            if !is_min {
                continue;
            }
            let Ok(k) = newton_2d(f, at(i, j), NEWTON_TOL, NEWTON_MAX_ITER) else {
                continue;
            };
            // One extra step to reach rounding level.
            let k = newton_2d(f, k, 0.0, 1).unwrap_or(k);
            let k = [wrap_angle(k[0]), wrap_angle(k[1])];
            let dup =
                zeros.iter().any(|z| wrap_angle(z[0] - k[0]).abs() < 1e-7 && wrap_angle(z[1] - k[1]).abs() < 1e-7);
            if !dup {
                zeros.push(k);
            }
        }
    }
    if zeros.len() != 2 {
        return Err(LabError::ZeroCount { found: zeros.len(), detail: String::new() });
    }
    let grads: Vec<[Complex64; 2]> = zeros.iter().map(|&k| dispersion_gradient(k, w)).collect();
    for g in &grads {
        if g[0].norm().hypot(g[1].norm()) <= GRADIENT_FLOOR {
            return Err(LabError::ZeroCount { found: 2, detail: "; a zero is degenerate".into() });
        }
    }
    let orient = |g: &[Complex64; 2]| (g[0].conj() * g[1]).im;
    let nondegenerate = grads.iter().all(|g| orient(g).abs() > GRADIENT_FLOOR);
    let (ip, im) = if orient(&grads[0]) > 0.0 { (0, 1) } else { (1, 0) };
    Ok(DispersionData {
        weights: *w,
        p_plus: zeros[ip],
        p_minus: zeros[im],
        alpha: [grads[ip][0], grads[im][0]],
        beta: [grads[ip][1], grads[im][1]],
        nondegenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent oracle: `mu = A(k1) - B(k1) e^{ik2}` vanishes iff
    /// `|A| = |B|`, with `e^{ik2} = A/B`.
    fn analytic_zeros(w: &EdgeWeights) -> Vec<[f64; 2]> {
        let i = Complex64::i();
        let ab = |k1: f64| {
            let e1 = Complex64::from_polar(1.0, k1);
            (w.t1 + i * w.t2 * e1, w.t3 * e1 + i)
        };
        let g = |k1: f64| {
            let (a, b) = ab(k1);
            a.norm_sqr() - b.norm_sqr()
        };
        let m = 4000;
        let mut out = Vec::new();
        for s in 0..m {
            let (mut lo, mut hi) = (-PI + 2.0 * PI * s as f64 / m as f64, -PI + 2.0 * PI * (s + 1) as f64 / m as f64);
            if g(lo) == 0.0 || g(lo).signum() != g(hi).signum() {
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if g(lo).signum() == g(mid).signum() && g(mid) != 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let (a, b) = ab(lo);
                out.push([wrap_angle(lo), wrap_angle((a / b).arg())]);
            }
        }
        out
    }

    fn near(a: [f64; 2], b: [f64; 2], tol: f64) -> bool {
        wrap_angle(a[0] - b[0]).abs() < tol && wrap_angle(a[1] - b[1]).abs() < tol
    }

    #[test]
    fn uniform_weights() {
        let d = find_zeros(&EdgeWeights::uniform()).unwrap();
        assert!(near(d.p_plus, [0.0, 0.0], 1e-12));
        assert!(near(d.p_minus, [PI, PI], 1e-12));
        assert!(d.nondegenerate);
        // phi_plus = (1 - i)(x1 + i x2)
        let z = d.phi(Omega::Plus, [0.3, 0.7]);
        let expect = Complex64::new(1.0, -1.0) * Complex64::new(0.3, 0.7);
        assert!((z - expect).norm() < 1e-12);
    }

    #[test]
    fn asymmetric_weights_match_oracle() {
        let w = EdgeWeights::new(2.0, 1.0, 1.0).unwrap();
        let d = find_zeros(&w).unwrap();
        let oracle = analytic_zeros(&w);
        assert_eq!(oracle.len(), 2);
        for p in [d.p_plus, d.p_minus] {
            assert!(dispersion_mu(p, &w).norm() < 1e-12);
            assert!(oracle.iter().any(|o| near(*o, p, 1e-9)));
        }
        let s = [d.p_plus[0] + d.p_minus[0], d.p_plus[1] + d.p_minus[1]];
        assert!(near(s, [PI, PI], 1e-10));
    }

    #[test]
    fn no_zeros_for_dominant_weight() {
        let r = find_zeros(&EdgeWeights::new(10.0, 1.0, 1.0).unwrap());
        assert!(matches!(r, Err(LabError::ZeroCount { found: 0, .. })));
    }

    #[test]
    fn random_weights_conjugation_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut tested = 0;
        while tested < 10 {
            let w =
                EdgeWeights::new(rng.gen_range(0.3..2.5), rng.gen_range(0.3..2.5), rng.gen_range(0.3..2.5)).unwrap();
            if analytic_zeros(&w).len() != 2 {
                continue;
            }
            let d = find_zeros_with_grid(&w, 256).unwrap();
            assert!((d.alpha(Omega::Plus).conj() + d.alpha(Omega::Minus)).norm() < 1e-10);
            assert!((d.beta(Omega::Plus).conj() + d.beta(Omega::Minus)).norm() < 1e-10);
            tested += 1;
        }
    }
}
