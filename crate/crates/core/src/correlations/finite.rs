//! Exact dimer statistics on small tori and open windows.

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::lattice::{BoundaryKind, Edge, LatticeGeometry};
use crate::numerics::{CMatrix, LogDet, Lu};
use crate::spectral::{kasteleyn_matrix, EdgeWeights, KasteleynSector, TorusIndex, SECTOR_SIGNS};

struct Sector {
    sign: f64,
    sector: KasteleynSector,
    matrix: CMatrix,
    det: LogDet,
}

/// Kasteleyn matrices of a finite geometry together with their
/// determinants: four twisted sectors on a torus, one matrix on an open
/// window (planar, so `Z = |det K|`).
pub struct FiniteKasteleyn {
    g: LatticeGeometry,
    w: EdgeWeights,
    sectors: Vec<Sector>,
    black_of: Vec<Option<usize>>,
    white_of: Vec<Option<usize>>,
    shift: f64,
    denominator: Complex64,
}

impl FiniteKasteleyn {
    pub fn new(g: &LatticeGeometry, w: &EdgeWeights) -> Result<FiniteKasteleyn> {
        let n = g.vertex_count();
        let mut black_of = vec![None; n];
        let mut white_of = vec![None; n];
        let mut sectors = Vec::new();
        match g.kind {
            BoundaryKind::Torus => {
                let idx = TorusIndex::new(g)?;
                for i in 0..idx.len() {
                    black_of[g.site_index(idx.black_site(i))] = Some(i);
                    white_of[g.site_index(idx.white_site(i))] = Some(i);
                }
                for (s, sign) in KasteleynSector::ALL.into_iter().zip(SECTOR_SIGNS) {
                    let matrix = kasteleyn_matrix(g, w, s)?;
                    let det = Lu::new(&matrix)?.log_det();
                    sectors.push(Sector { sign, sector: s, matrix, det });
                }
            }
            BoundaryKind::OpenWindow => {
                let blacks: Vec<_> = g.black_sites().collect();
                let whites: Vec<_> = g.white_sites().collect();
                if blacks.len() != whites.len() {
                    return Err(LabError::Geometry("window has unequal colour classes".into()));
                }
                for (i, b) in blacks.iter().enumerate() {
                    black_of[g.site_index(*b)] = Some(i);
                }
                for (i, x) in whites.iter().enumerate() {
                    white_of[g.site_index(*x)] = Some(i);
                }
                let mut matrix = CMatrix::zeros(blacks.len(), whites.len());
                for e in g.edges() {
                    let i = black_of[g.site_index(e.x)].unwrap();
                    let j = white_of[g.site_index(e.white_raw())].unwrap();
                    matrix[(i, j)] += w.k(e.r);
                }
                let det = Lu::new(&matrix)?.log_det();
                sectors.push(Sector { sign: 1.0, sector: KasteleynSector::new(false, false), matrix, det });
            }
            BoundaryKind::Cylinder => {
                return Err(LabError::Geometry("exact dimer statistics need a torus or window".into()))
            }
        }
        let shift = sectors.iter().map(|s| s.det.log_abs).fold(f64::NEG_INFINITY, f64::max);
        if shift == f64::NEG_INFINITY {
            return Err(LabError::Singular);
        }
        let denominator = sectors.iter().map(|s| s.det.scaled(shift) * s.sign).sum();
        Ok(FiniteKasteleyn { g: *g, w: *w, sectors, black_of, white_of, shift, denominator })
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.g
    }

    pub fn weights(&self) -> &EdgeWeights {
        &self.w
    }

    /// `ln Z`.
    pub fn log_partition_function(&self) -> f64 {
        let half = if self.g.kind == BoundaryKind::Torus { 0.5 } else { 1.0 };
        self.shift + (half * self.denominator.norm()).ln()
    }

    fn entry(&self, e: Edge, s: &Sector) -> Complex64 {
        if self.g.kind == BoundaryKind::Torus {
            TorusIndex::new(&self.g).unwrap().entry(e, &self.w, s.sector)
        } else {
            self.w.k(e.r)
        }
    }

    /// Probability that every edge of `edges` is occupied.
    pub fn probability(&self, edges: &[Edge]) -> Result<f64> {
        let mut rows = Vec::with_capacity(edges.len());
        let mut cols = Vec::with_capacity(edges.len());
        let mut norm = Vec::with_capacity(edges.len());
        for &e in edges {
            let e = self.g.normalize(e)?;
            let white = self.g.wrap(e.white_raw()).unwrap();
            let i = self.black_of[self.g.site_index(e.x)].expect("black index");
            let j = self.white_of[self.g.site_index(white)].expect("white index");
            if norm.contains(&e) {
                return Err(LabError::InvalidArgument(format!("duplicate edge {e:?}")));
            }
            if rows.contains(&i) || cols.contains(&j) {
                // two edges share a vertex
                return Ok(0.0);
            }
            rows.push(i);
            cols.push(j);
            norm.push(e);
        }
        // Restricted Laplace expansion: permutations forced to map rows[k] -> cols[k].
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by_key(|&k| rows[k]);
        let paired: Vec<usize> = order.iter().map(|&k| cols[k]).collect();
        let mut sign = perm_sign(&paired);
        let offset: usize = rows.iter().sum::<usize>() + cols.iter().sum::<usize>();
        if offset % 2 == 1 {
            sign = -sign;
        }
        let n = self.sectors[0].matrix.rows();
        let keep_r: Vec<usize> = (0..n).filter(|i| !rows.contains(i)).collect();
        let keep_c: Vec<usize> = (0..n).filter(|j| !cols.contains(j)).collect();
        let mut num = Complex64::new(0.0, 0.0);
        for s in &self.sectors {
            let minor = s.matrix.select(&keep_r, &keep_c);
            let d = if minor.rows() == 0 { LogDet { log_abs: 0.0, phase: 0.0 } } else { Lu::new(&minor)?.log_det() };
            let k: Complex64 = norm.iter().map(|&e| self.entry(e, s)).product();
            num += d.scaled(self.shift) * k * sign * s.sign;
        }
        let p = num / self.denominator;
        Ok(p.re)
    }

    /// `E(1_e; 1_e')`.
    pub fn truncated(&self, e: Edge, e2: Edge) -> Result<f64> {
        if self.g.normalize(e)? == self.g.normalize(e2)? {
            return Err(LabError::Coincident);
        }
        Ok(self.probability(&[e, e2])? - self.probability(&[e])? * self.probability(&[e2])?)
    }
}

/// Sign of the permutation that sorts `v` (distinct entries).
fn perm_sign(v: &[usize]) -> f64 {
    let mut inv = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
