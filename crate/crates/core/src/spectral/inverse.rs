use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use num_complex::Complex64;

use super::EdgeWeights;
use crate::error::LabError;
use crate::error::Result;
use crate::numerics::{gauss_legendre, integrate_complex};

const QUAD_TOL: f64 = 1e-14;

/// `mu(k) = a(k1) - b(k1) e^{ik2}`.
pub(crate) fn laurent_parts(k1: f64, w: &EdgeWeights) -> (Complex64, Complex64) {
    let e1 = Complex64::from_polar(1.0, k1);
    let i = Complex64::i();
    (w.t1 + i * w.t2 * e1, w.t3 * e1 + i)
}

/// Values of `k1` in `[-pi, pi)` where `|a| = |b|`, i.e. the first
/// coordinates of the zeros of `mu`.
pub(crate) fn crossings(w: &EdgeWeights) -> Vec<f64> {
    let gap = |k1: f64| {
        let (a, b) = laurent_parts(k1, w);
        a.norm_sqr() - b.norm_sqr()
    };
    let m = 512;
    let h = 2.0 * PI / m as f64;
    // offset so that symmetric zeros never sit on a grid point
    let start = -PI + 0.287_1 * h;
    let mut out = Vec::new();
    for s in 0..m {
        let (mut lo, mut hi) = (start + s as f64 * h, start + (s + 1) as f64 * h);
        let (glo, ghi) = (gap(lo), gap(hi));
        if glo == 0.0 {
            out.push(super::wrap_angle(lo));
            continue;
        }
        if glo.signum() == ghi.signum() || ghi == 0.0 {
            continue;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if gap(mid).signum() == glo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(super::wrap_angle(0.5 * (lo + hi)));
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Source of infinite-volume `K^{-1}` values by label displacement
/// `d = x - y` (white minus black).
pub trait KasteleynInverse {
    fn weights(&self) -> &EdgeWeights;
    fn eval(&self, d: (i64, i64)) -> Result<Complex64>;
}

fn coefficient(k1: f64, d2: i64, w: &EdgeWeights) -> Complex64 {
    let (a, b) = laurent_parts(k1, w);
    if a.norm_sqr() > b.norm_sqr() {
        if d2 >= 0 {
            b.powi(d2 as i32) / a.powi(d2 as i32 + 1)
        } else {
            Complex64::new(0.0, 0.0)
        }
    } else if d2 <= -1 {
        -a.powi((-d2 - 1) as i32) / b.powi((-d2) as i32)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Infinite-volume inverse Kasteleyn matrix for fixed weights.
///
/// The `k2` integral is done by residues, leaving a one-dimensional integral
/// over `k1` whose integrand jumps where `|a| = |b|`; those points are
/// passed to the quadrature as breaks.
#[derive(Debug)]
pub struct InfiniteInverse {
    w: EdgeWeights,
    breaks: Vec<f64>,
    cache: Mutex<HashMap<(i64, i64), Complex64>>,
}

impl Clone for InfiniteInverse {
    fn clone(&self) -> Self {
        InfiniteInverse {
            w: self.w,
            breaks: self.breaks.clone(),
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl InfiniteInverse {
    pub fn new(w: &EdgeWeights) -> InfiniteInverse {
        InfiniteInverse { w: *w, breaks: crossings(w), cache: Mutex::new(HashMap::new()) }
    }

    fn compute(&self, d: (i64, i64)) -> Result<Complex64> {
        let (d1, d2) = d;
        let w = self.w;
        let f = move |k1: f64| Complex64::from_polar(1.0, -k1 * d1 as f64) * coefficient(k1, d2, &w);
        Ok(integrate_complex(f, -PI, PI, &self.breaks, QUAD_TOL)? / (2.0 * PI))
    }
}

impl KasteleynInverse for InfiniteInverse {
    fn weights(&self) -> &EdgeWeights {
        &self.w
    }

    fn eval(&self, d: (i64, i64)) -> Result<Complex64> {
        if let Some(v) = self.cache.lock().unwrap().get(&d) {
            return Ok(*v);
        }
        let v = self.compute(d)?;
        self.cache.lock().unwrap().insert(d, v);
        Ok(v)
    }
}

/// `K^{-1}` on the box `|d1|, |d2| <= radius`, one row of fixed `d2` at a
/// time: the `k1` integral is split at the jump points and each smooth
/// piece gets a Gauss-Legendre rule fine enough for the oscillation.
#[derive(Debug)]
pub struct InverseTable {
    w: EdgeWeights,
    radius: i64,
    nodes: Vec<(f64, f64)>,
    rows: Mutex<HashMap<i64, Vec<Complex64>>>,
}

impl InverseTable {
    pub fn new(w: &EdgeWeights, radius: usize) -> InverseTable {
        let mut cuts = vec![-PI];
        cuts.extend(crossings(w).into_iter().filter(|&c| c > -PI));
        cuts.push(PI);
        let mut nodes = Vec::new();
        for piece in cuts.windows(2) {
            let (lo, hi) = (piece[0], piece[1]);
            let len = hi - lo;
            if len <= 0.0 {
                continue;
            }
            let n = (1.5 * (2 * radius) as f64 * len / 2.0).ceil() as usize + 60;
            let (x, wt) = gauss_legendre(n);
            let (c, h) = (0.5 * (lo + hi), 0.5 * len);
            nodes.extend(x.iter().zip(&wt).map(|(x, wt)| (c + h * x, h * wt)));
        }
        InverseTable { w: *w, radius: radius as i64, nodes, rows: Mutex::new(HashMap::new()) }
    }

    pub fn radius(&self) -> usize {
        self.radius as usize
    }

    fn row(&self, d2: i64) -> Vec<Complex64> {
        let r = self.radius;
        let mut out = vec![Complex64::new(0.0, 0.0); (2 * r + 1) as usize];
        for &(k1, wt) in &self.nodes {
            let c = coefficient(k1, d2, &self.w) * (wt / (2.0 * PI));
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let step = Complex64::from_polar(1.0, -k1);
            let mut ph = Complex64::from_polar(1.0, k1 * r as f64);
            for slot in out.iter_mut() {
                *slot += c * ph;
                ph *= step;
            }
        }
        out
    }
}

impl KasteleynInverse for InverseTable {
    fn weights(&self) -> &EdgeWeights {
        &self.w
    }

    fn eval(&self, d: (i64, i64)) -> Result<Complex64> {
        let r = self.radius;
        if d.0.abs() > r || d.1.abs() > r {
            return Err(LabError::OutsideDomain(format!("displacement {d:?} beyond table radius {r}")));
        }
        let idx = (d.0 + r) as usize;
        if let Some(row) = self.rows.lock().unwrap().get(&d.1) {
            return Ok(row[idx]);
        }
        let row = self.row(d.1);
        let v = row[idx];
        self.rows.lock().unwrap().insert(d.1, row);
        Ok(v)
    }
}

pub fn inverse_kasteleyn_infinite(w: &EdgeWeights, d: (i64, i64)) -> Result<Complex64> {
    InfiniteInverse::new(w).eval(d)
}
