//! Exact `lambda = 0` statistics of one winding sector of a torus.
//!
//! Plaquette dynamics never leaves the winding sector it starts in, so on a
//! torus the chain targets the Gibbs measure conditioned on the signed
//! numbers of dimers crossing the two seams. With a continuous twist
//! `theta` on the seam edges, `det K_theta` is a trigonometric polynomial in
//! `theta` whose coefficients are the sector partition functions (one sign
//! per sector); a discrete Fourier transform over a grid of twists picks out
//! one sector. Grids of `M` points per direction alias sectors that differ
//! by multiples of `M`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::lattice::{black_label, white_label, BoundaryKind, DimerConfiguration, Edge, LatticeGeometry};
use crate::numerics::{complex_determinant, CMatrix};
use crate::spectral::{dispersion_mu, EdgeWeights, TorusIndex};

/// Default twist grid per direction.
pub const DEFAULT_TWIST_GRID: usize = 24;

/// Largest edge set accepted by [`WindingSector::probabilities`].
const SET_CAP: usize = 8;

pub struct WindingSector {
    g: LatticeGeometry,
    w: EdgeWeights,
    idx: TorusIndex,
    winding: (i64, i64),
    grid: usize,
}

impl WindingSector {
    /// Sector with signed seam crossings `winding` (see [`Self::winding_of`]).
    pub fn new(g: &LatticeGeometry, w: &EdgeWeights, winding: (i64, i64), grid: usize) -> Result<WindingSector> {
        if g.kind != BoundaryKind::Torus {
            return Err(LabError::Geometry("winding sectors need a torus".into()));
        }
        if grid < 4 || !grid.is_multiple_of(2) {
            return Err(LabError::InvalidArgument(format!("twist grid {grid} must be even and >= 4")));
        }
        Ok(WindingSector { g: *g, w: *w, idx: TorusIndex::new(g)?, winding, grid })
    }

    /// Sector of a given configuration.
    pub fn containing(
        g: &LatticeGeometry,
        w: &EdgeWeights,
        d: &DimerConfiguration,
        grid: usize,
    ) -> Result<WindingSector> {
        WindingSector::new(g, w, WindingSector::winding_of(g, d)?, grid)
    }

    /// Signed number of dimers crossing each seam, counted from black to
    /// white.
    pub fn winding_of(g: &LatticeGeometry, d: &DimerConfiguration) -> Result<(i64, i64)> {
        let idx = TorusIndex::new(g)?;
        let mut n = (0, 0);
        for e in d.edges() {
            let s = idx.wraps(g.normalize(*e)?);
            n = (n.0 + s.0, n.1 + s.1);
        }
        Ok(n)
    }

    pub fn winding(&self) -> (i64, i64) {
        self.winding
    }

    fn twists(&self) -> Vec<[f64; 2]> {
        let m = self.grid;
        // half-shifted so the periodic zero mode at theta = 0 is never hit
        (0..m * m).map(|k| [((k / m) as f64 + 0.5) / m as f64, ((k % m) as f64 + 0.5) / m as f64]).collect()
    }

    /// `mu` on the twisted momentum grid, indexed `[n][m]` as in
    /// [`crate::spectral::sector_momenta`].
    fn spectrum(&self, th: [f64; 2]) -> Result<Vec<Complex64>> {
        let (l1, l2) = (self.g.l1 as f64, self.g.l2 as f64);
        let mut out = Vec::with_capacity(self.idx.len());
        for n in 0..self.g.l1 / 2 {
            for m in 0..self.g.l2 {
                let a = (n as f64 + th[0]) / l1;
                let b = (m as f64 + th[1]) / l2;
                let mu = dispersion_mu([2.0 * PI * (a - b), 2.0 * PI * (a + b)], &self.w);
                if mu.norm() < 1e-12 {
                    return Err(LabError::NonConvergence(format!("twist {th:?} hits a zero of mu")));
                }
                out.push(mu);
            }
        }
        Ok(out)
    }

    /// `ln det K_theta` up to a theta-independent constant, including the
    /// phase that the label basis adds to the momentum product.
    fn log_det(&self, th: [f64; 2], mu: &[Complex64]) -> Complex64 {
        let c1 = (self.g.l2 / 2) as f64;
        let fourier = 2.0 * PI * (th[0] * (self.winding.0 as f64 - c1) + th[1] * self.winding.1 as f64);
        mu.iter().map(|m| m.ln()).sum::<Complex64>() + Complex64::new(0.0, fourier)
    }

    /// `K_theta^{-1}` for label displacements `d = white - black`.
    fn inverse(&self, th: [f64; 2], mu: &[Complex64], ds: &[(i64, i64)]) -> Vec<Complex64> {
        let (h1, l2) = (self.g.l1 / 2, self.g.l2);
        let roots = |len: usize, scale: usize| -> Vec<Complex64> {
            (0..len).map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / scale as f64)).collect()
        };
        let r1 = roots(self.g.l1, self.g.l1);
        let r2 = roots(l2, l2);
        let n = mu.len() as f64;
        ds.iter()
            .map(|&(d0, d1)| {
                // k . d = 2 pi [(n + th1) s / l1 + (m + th2) t / l2]
                let s = d0 + d1;
                let t = d1 - d0;
                let base = Complex64::from_polar(
                    1.0,
                    -2.0 * PI * (th[0] * s as f64 / self.g.l1 as f64 + th[1] * t as f64 / l2 as f64),
                );
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..h1 {
                    let pa = r1[(a as i64 * s).rem_euclid(self.g.l1 as i64) as usize];
                    let mut row = Complex64::new(0.0, 0.0);
                    for b in 0..l2 {
                        row += r2[(b as i64 * t).rem_euclid(l2 as i64) as usize] / mu[a * l2 + b];
                    }
                    acc += pa * row;
                }
                base * acc / n
            })
            .collect()
    }

    /// `P(all edges of S occupied | sector)` for each set `S`.
    pub fn probabilities(&self, sets: &[Vec<Edge>]) -> Result<Vec<f64>> {
        let mut sets_n: Vec<Vec<Edge>> = Vec::with_capacity(sets.len());
        for s in sets {
            if s.is_empty() || s.len() > SET_CAP {
                return Err(LabError::InvalidArgument(format!("edge sets must have 1..={SET_CAP} edges")));
            }
            let s: Vec<Edge> = s.iter().map(|e| self.g.normalize(*e)).collect::<Result<_>>()?;
            for i in 0..s.len() {
                if s[i + 1..].contains(&s[i]) {
                    return Err(LabError::InvalidArgument(format!("duplicate edge {:?}", s[i])));
                }
            }
            sets_n.push(s);
        }
        // every K^{-1} element the sets need, by label displacement
        let white = |e: &Edge| white_label(self.g.wrap(e.white_raw()).expect("torus wrap"));
        let mut slot: HashMap<(i64, i64), usize> = HashMap::new();
        let mut ds = Vec::new();
        for s in &sets_n {
            for a in s {
                for b in s {
                    let (wl, bl) = (white(a), black_label(b.x));
                    let d = (wl.0 - bl.0, wl.1 - bl.1);
                    slot.entry(d).or_insert_with(|| {
                        ds.push(d);
                        ds.len() - 1
                    });
                }
            }
        }
        let twists = self.twists();
        let spectra: Vec<Vec<Complex64>> = twists.iter().map(|&th| self.spectrum(th)).collect::<Result<_>>()?;
        let logs: Vec<Complex64> = twists.iter().zip(&spectra).map(|(&th, mu)| self.log_det(th, mu)).collect();
        let shift = logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        let per_twist: Vec<Result<(Complex64, Vec<Complex64>)>> = twists
            .par_iter()
            .zip(&spectra)
            .zip(&logs)
            .map(|((&th, mu), lg)| {
                let weight = (lg - shift).exp();
                let kinv = self.inverse(th, mu, &ds);
                let mut vals = Vec::with_capacity(sets_n.len());
                for s in &sets_n {
                    let k = s.len();
                    let mut m = CMatrix::zeros(k, k);
                    let mut pre = Complex64::new(1.0, 0.0);
                    for (i, a) in s.iter().enumerate() {
                        let (s1, s2) = self.idx.wraps(*a);
                        let phase = -2.0 * PI * (th[0] * s1 as f64 + th[1] * s2 as f64);
                        pre *= self.w.k(a.r) * Complex64::from_polar(1.0, phase);
                        for (j, b) in s.iter().enumerate() {
                            let (wl, bl) = (white(a), black_label(b.x));
                            m[(i, j)] = kinv[slot[&(wl.0 - bl.0, wl.1 - bl.1)]];
                        }
                    }
                    vals.push(weight * pre * complex_determinant(&m)?.value());
                }
                Ok((weight, vals))
            })
            .collect();
        let mut z = Complex64::new(0.0, 0.0);
        let mut acc = vec![Complex64::new(0.0, 0.0); sets_n.len()];
        for r in per_twist {
            let (wt, vals) = r?;
            z += wt;
            for (a, v) in acc.iter_mut().zip(vals) {
                *a += v;
            }
        }
        if z.norm() < 1e-13 || z.im.abs() > 1e-8 * z.norm() {
            return Err(LabError::NonConvergence(format!(
                "sector {:?} weight {z} not resolved on a {} grid",
                self.winding, self.grid
            )));
        }
        acc.iter()
            .map(|a| {
                let p = a / z;
                if p.im.abs() > 1e-8 {
                    return Err(LabError::NonConvergence(format!("probability {p} is not real")));
                }
                Ok(p.re)
            })
            .collect()
    }

    /// `P(e, e2) - P(e) P(e2)` within the sector, for each pair.
    pub fn truncated(&self, pairs: &[(Edge, Edge)]) -> Result<Vec<f64>> {
        let mut sets = Vec::with_capacity(3 * pairs.len());
        for (a, b) in pairs {
            if self.g.normalize(*a)? == self.g.normalize(*b)? {
                return Err(LabError::Coincident);
            }
            sets.push(vec![*a]);
            sets.push(vec![*b]);
            sets.push(vec![*a, *b]);
        }
        let p = self.probabilities(&sets)?;
        Ok(p.chunks(3).map(|c| c[2] - c[0] * c[1]).collect())
    }
}
