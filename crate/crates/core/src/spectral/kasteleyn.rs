use std::f64::consts::PI;

use num_complex::Complex64;

use super::{dispersion_mu, EdgeWeights, KasteleynSector};
use crate::error::{LabError, Result};
use crate::lattice::{black_label, is_black, white_label, BoundaryKind, Edge, LatticeGeometry};
use crate::numerics::{CMatrix, LogDet, Lu};

/// Signs `eps_s` in `Z = |sum_s eps_s det K_s| / 2`, in the order of
/// [`KasteleynSector::ALL`]. Fixed by matching enumeration on the 4x4, 4x6,
/// 6x4 and 6x6 tori; the same signs hold in every parity class.
pub const SECTOR_SIGNS: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// Above this many black sites determinants use the momentum product.
const DIRECT_DET_LIMIT: usize = 256;

/// Row/column numbering of a torus Kasteleyn matrix.
///
/// Black sites are numbered in row-major order; white site `w` takes the
/// number of the black site `w - (1, 0)`, so white and black labels of equal
/// index coincide and the matrix is translation invariant.
#[derive(Debug, Clone, Copy)]
pub struct TorusIndex {
    g: LatticeGeometry,
}

impl TorusIndex {
    pub fn new(g: &LatticeGeometry) -> Result<TorusIndex> {
        if g.kind != BoundaryKind::Torus {
            return Err(LabError::Geometry("Kasteleyn matrix needs a torus".into()));
        }
        Ok(TorusIndex { g: *g })
    }

    pub fn len(&self) -> usize {
        self.g.vertex_count() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn black(&self, x: (i64, i64)) -> usize {
        let x = self.g.wrap(x).expect("torus wrap");
        debug_assert!(is_black(x));
        self.g.site_index(x) / 2
    }

    pub fn white(&self, x: (i64, i64)) -> usize {
        debug_assert!(!is_black(x));
        self.black((x.0 - 1, x.1))
    }

    pub fn black_site(&self, i: usize) -> (i64, i64) {
        let l1 = self.g.l1;
        let y = (2 * i) / l1;
        let x = 2 * i - y * l1 + (y % 2);
        (x as i64, y as i64)
    }

    pub fn white_site(&self, i: usize) -> (i64, i64) {
        let b = self.black_site(i);
        self.g.wrap((b.0 + 1, b.1)).unwrap()
    }

    /// Number of times an edge's white endpoint wraps each direction.
    pub fn wraps(&self, e: Edge) -> (i64, i64) {
        let w = e.white_raw();
        (
            w.0.div_euclid(self.g.l1 as i64) - e.x.0.div_euclid(self.g.l1 as i64),
            w.1.div_euclid(self.g.l2 as i64) - e.x.1.div_euclid(self.g.l2 as i64),
        )
    }

    /// Matrix element of an edge with its sector phase.
    pub fn entry(&self, e: Edge, w: &EdgeWeights, s: KasteleynSector) -> Complex64 {
        let (s1, s2) = self.wraps(e);
        w.k(e.r) * s.wrap_phase(s1, s2)
    }
}

/// Kasteleyn matrix of a torus, rows black and columns white (see [`TorusIndex`]).
pub fn kasteleyn_matrix(g: &LatticeGeometry, w: &EdgeWeights, s: KasteleynSector) -> Result<CMatrix> {
    let idx = TorusIndex::new(g)?;
    let n = idx.len();
    let mut k = CMatrix::zeros(n, n);
    for i in 0..n {
        let b = idx.black_site(i);
        for r in 1..=4u8 {
            let e = Edge::new(b, r);
            let j = idx.white(g.wrap(e.white_raw()).unwrap());
            k[(i, j)] += idx.entry(e, w, s);
        }
    }
    Ok(k)
}

/// Allowed momenta of a sector: `k . l(P_j) in 2 pi (Z + theta_j)` for the
/// label images `l(P_1) = (L1/2, L1/2)`, `l(P_2) = (-L2/2, L2/2)` of the
/// torus periods.
pub fn sector_momenta(g: &LatticeGeometry, s: KasteleynSector) -> Vec<[f64; 2]> {
    let (l1, l2) = (g.l1 as f64, g.l2 as f64);
    let mut out = Vec::with_capacity(g.vertex_count() / 2);
    for m in 0..g.l2 {
        for n in 0..g.l1 / 2 {
            let a = (n as f64 + s.theta1()) / l1;
            let b = (m as f64 + s.theta2()) / l2;
            out.push([2.0 * PI * (a - b), 2.0 * PI * (a + b)]);
        }
    }
    out
}

fn momentum_determinant(g: &LatticeGeometry, w: &EdgeWeights, s: KasteleynSector) -> LogDet {
    let mut log_abs = 0.0;
    let mut phase = 0.0;
    for k in sector_momenta(g, s) {
        let m = dispersion_mu(k, w);
        if m.norm() == 0.0 {
            return LogDet::zero();
        }
        log_abs += m.norm().ln();
        phase += m.arg();
    }
    LogDet { log_abs, phase: crate::numerics::linalg::wrap_phase(phase) }
}

/// `det K_s`, by LU on small tori and by the momentum product otherwise.
pub fn sector_determinant(g: &LatticeGeometry, w: &EdgeWeights, s: KasteleynSector) -> Result<LogDet> {
    let idx = TorusIndex::new(g)?;
    if idx.len() <= DIRECT_DET_LIMIT {
        Ok(Lu::new(&kasteleyn_matrix(g, w, s)?)?.log_det())
    } else {
        Ok(momentum_determinant(g, w, s))
    }
}

/// `ln Z` of the torus dimer model.
pub fn torus_partition_function_log(g: &LatticeGeometry, w: &EdgeWeights) -> Result<f64> {
    let dets = KasteleynSector::ALL.iter().map(|&s| sector_determinant(g, w, s)).collect::<Result<Vec<_>>>()?;
    let shift = dets.iter().map(|d| d.log_abs).fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return Err(LabError::Singular);
    }
    let sum: Complex64 = dets.iter().zip(SECTOR_SIGNS).map(|(d, e)| d.scaled(shift) * e).sum();
    Ok(shift + (0.5 * sum.norm()).ln())
}

pub fn torus_partition_function(g: &LatticeGeometry, w: &EdgeWeights) -> Result<f64> {
    torus_partition_function_log(g, w).map(f64::exp)
}

/// Finite-torus inverse Kasteleyn element `K_s^{-1}(white, black)` by the
/// momentum sum.
pub fn inverse_kasteleyn(
    g: &LatticeGeometry,
    w: &EdgeWeights,
    white: (i64, i64),
    black: (i64, i64),
    s: KasteleynSector,
) -> Result<Complex64> {
    TorusIndex::new(g)?;
    let (wx, bx) = match (g.wrap(white), g.wrap(black)) {
        (Some(a), Some(b)) if !is_black(a) && is_black(b) => (a, b),
        _ => return Err(LabError::InvalidArgument("expected a white and a black site".into())),
    };
    let lw = white_label(wx);
    let lb = black_label(bx);
    let d = [(lw.0 - lb.0) as f64, (lw.1 - lb.1) as f64];
    let ks = sector_momenta(g, s);
    let n = ks.len() as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in ks {
        let m = dispersion_mu(k, w);
        if m.norm() < 1e-12 {
            return Err(LabError::SectorSingular(s.code()));
        }
        acc += Complex64::from_polar(1.0, -(k[0] * d[0] + k[1] * d[1])) / m;
    }
    Ok(acc / n)
}
