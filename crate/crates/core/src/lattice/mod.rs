//! Bipartite square-lattice geometry.
//!
//! Sites live on an `L1 x L2` grid with integer coordinates `(X, Y)`; a site
//! is black iff `X + Y` is even, so the origin is black. Every black site has
//! four incident edges labelled by their type `r`:
//!
//! | r | white endpoint | phase of `K_r` |
//! |---|----------------|----------------|
//! | 1 | `(X+1, Y)`     | `t1`           |
//! | 2 | `(X, Y+1)`     | `i t2`         |
//! | 3 | `(X-1, Y)`     | `-t3`          |
//! | 4 | `(X, Y-1)`     | `-i`           |
//!
//! Rotated by 45 degrees these are the NE/NW/SW/SE neighbours of the tilted
//! lattice on which the Fourier formulas are written. Those formulas index
//! black and white sites by *sublattice labels* in `Z^2`: black `(X, Y)` has
//! label `((X-Y)/2, (X+Y)/2)`, white `(X, Y)` has label
//! `((X-Y-1)/2, (X+Y-1)/2)`, and the type-`r` edge of black label `b` ends at
//! white label `b + v_r` with `v = (0,0), (-1,0), (-1,-1), (0,-1)`.
//! Label coordinates are also the "physical" coordinates in which slopes,
//! distances and the linear forms `phi_omega` are expressed.

mod dual;
mod matching;

pub use dual::{crossed_edge, crossing_sign, dual_path, plane_dual_path, DualPath, Face};
pub use matching::{
    columnar_configuration, enumerate_matchings, reference_configuration, DimerConfiguration, ENUMERATION_CAP,
};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    /// Periodic in both directions.
    Torus,
    /// Periodic in direction 1 only.
    Cylinder,
    OpenWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Black,
    White,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub x: (i64, i64),
    pub color: Color,
}

/// An edge keyed by its black endpoint and its type `r` in `1..=4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub x: (i64, i64),
    pub r: u8,
}

impl Edge {
    pub fn new(x: (i64, i64), r: u8) -> Edge {
        debug_assert!((1..=4).contains(&r));
        Edge { x, r }
    }

    /// Grid offset from the black to the white endpoint.
    pub fn offset(r: u8) -> (i64, i64) {
        match r {
            1 => (1, 0),
            2 => (0, 1),
            3 => (-1, 0),
            4 => (0, -1),
            _ => panic!("edge type must be in 1..=4, got {r}"),
        }
    }

    /// Label offset `v_r` from the black label to the white label.
    pub fn label_offset(r: u8) -> (i64, i64) {
        match r {
            1 => (0, 0),
            2 => (-1, 0),
            3 => (-1, -1),
            4 => (0, -1),
            _ => panic!("edge type must be in 1..=4, got {r}"),
        }
    }

    pub fn is_horizontal(&self) -> bool {
        self.r == 1 || self.r == 3
    }

    /// Unwrapped white endpoint.
    pub fn white_raw(&self) -> (i64, i64) {
        let d = Edge::offset(self.r);
        (self.x.0 + d.0, self.x.1 + d.1)
    }

    /// Black label `x(e)`.
    pub fn black_label(&self) -> (i64, i64) {
        black_label(self.x)
    }

    /// White label `x(e) + v_r`.
    pub fn white_label(&self) -> (i64, i64) {
        let b = self.black_label();
        let v = Edge::label_offset(self.r);
        (b.0 + v.0, b.1 + v.1)
    }

    /// Edge between two adjacent grid sites given in either order.
    pub fn between(a: (i64, i64), b: (i64, i64)) -> Edge {
        let (black, white) = if (a.0 + a.1).rem_euclid(2) == 0 { (a, b) } else { (b, a) };
        let d = (white.0 - black.0, white.1 - black.1);
        let r = match d {
            (1, 0) => 1,
            (0, 1) => 2,
            (-1, 0) => 3,
            (0, -1) => 4,
            _ => panic!("sites {a:?} and {b:?} are not adjacent"),
        };
        Edge::new(black, r)
    }
}

pub fn is_black(x: (i64, i64)) -> bool {
    (x.0 + x.1).rem_euclid(2) == 0
}

/// Sublattice label of a black grid site.
pub fn black_label(x: (i64, i64)) -> (i64, i64) {
    debug_assert!(is_black(x));
    ((x.0 - x.1).div_euclid(2), (x.0 + x.1).div_euclid(2))
}

/// Sublattice label of a white grid site.
pub fn white_label(x: (i64, i64)) -> (i64, i64) {
    debug_assert!(!is_black(x));
    ((x.0 - x.1 - 1).div_euclid(2), (x.0 + x.1 - 1).div_euclid(2))
}

pub fn black_site(label: (i64, i64)) -> (i64, i64) {
    (label.0 + label.1, label.1 - label.0)
}

pub fn white_site(label: (i64, i64)) -> (i64, i64) {
    (label.0 + label.1 + 1, label.1 - label.0)
}

/// Converts a grid displacement to label (physical) coordinates.
pub fn grid_to_label(d: (f64, f64)) -> (f64, f64) {
    (0.5 * (d.0 - d.1), 0.5 * (d.0 + d.1))
}

pub fn label_to_grid(d: (f64, f64)) -> (f64, f64) {
    (d.0 + d.1, d.1 - d.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeGeometry {
    pub kind: BoundaryKind,
    pub l1: usize,
    pub l2: usize,
    /// Lattice spacing; formulas are evaluated in lattice units.
    pub spacing: f64,
}

impl LatticeGeometry {
    /// Periodic directions need even sides of at least 4; open directions
    /// accept any positive side.
    pub fn new(kind: BoundaryKind, l1: usize, l2: usize) -> Result<LatticeGeometry> {
        let periodic = |wraps: bool, l: usize| !wraps || (l >= 4 && l.is_multiple_of(2));
        let (w1, w2) = match kind {
            BoundaryKind::Torus => (true, true),
            BoundaryKind::Cylinder => (true, false),
            BoundaryKind::OpenWindow => (false, false),
        };
        if l1 == 0 || l2 == 0 || !periodic(w1, l1) || !periodic(w2, l2) {
            return Err(LabError::Geometry(format!("{kind:?} {l1}x{l2}: periodic sides must be even and >= 4")));
        }
        if kind == BoundaryKind::Cylinder && l2 < 2 {
            return Err(LabError::Geometry("cylinder height must be >= 2".into()));
        }
        Ok(LatticeGeometry { kind, l1, l2, spacing: 1.0 })
    }

    pub fn torus(l1: usize, l2: usize) -> Result<LatticeGeometry> {
        Self::new(BoundaryKind::Torus, l1, l2)
    }

    pub fn cylinder(l1: usize, l2: usize) -> Result<LatticeGeometry> {
        Self::new(BoundaryKind::Cylinder, l1, l2)
    }

    pub fn window(l1: usize, l2: usize) -> Result<LatticeGeometry> {
        Self::new(BoundaryKind::OpenWindow, l1, l2)
    }

    pub fn with_spacing(mut self, a: f64) -> Result<LatticeGeometry> {
        if !(a > 0.0) {
            return Err(LabError::Geometry("spacing must be positive".into()));
        }
        self.spacing = a;
        Ok(self)
    }

    pub fn wraps1(&self) -> bool {
        matches!(self.kind, BoundaryKind::Torus | BoundaryKind::Cylinder)
    }

    pub fn wraps2(&self) -> bool {
        self.kind == BoundaryKind::Torus
    }

    pub fn vertex_count(&self) -> usize {
        self.l1 * self.l2
    }

    /// Normalises a site into the fundamental domain, or `None` if it lies
    /// outside along an open direction.
    pub fn wrap(&self, x: (i64, i64)) -> Option<(i64, i64)> {
        let (l1, l2) = (self.l1 as i64, self.l2 as i64);
        let a = if self.wraps1() {
            x.0.rem_euclid(l1)
        } else if (0..l1).contains(&x.0) {
            x.0
        } else {
            return None;
        };
        let b = if self.wraps2() {
            x.1.rem_euclid(l2)
        } else if (0..l2).contains(&x.1) {
            x.1
        } else {
            return None;
        };
        Some((a, b))
    }

    pub fn site_index(&self, x: (i64, i64)) -> usize {
        x.1 as usize * self.l1 + x.0 as usize
    }

    pub fn site_at(&self, idx: usize) -> (i64, i64) {
        ((idx % self.l1) as i64, (idx / self.l1) as i64)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.vertex_count()).map(move |i| {
            let x = self.site_at(i);
            Vertex { x, color: if is_black(x) { Color::Black } else { Color::White } }
        })
    }

    pub fn black_sites(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.vertex_count()).map(move |i| self.site_at(i)).filter(|&x| is_black(x))
    }

    pub fn white_sites(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.vertex_count()).map(move |i| self.site_at(i)).filter(|&x| !is_black(x))
    }

    /// Normalises an edge so its black coordinate lies in the fundamental
    /// domain; errors if either endpoint falls outside an open direction.
    pub fn normalize(&self, e: Edge) -> Result<Edge> {
        let err = || LabError::EdgeOutside((e.x.0, e.x.1, e.r));
        if !(1..=4).contains(&e.r) || !is_black(e.x) {
            return Err(err());
        }
        let x = self.wrap(e.x).ok_or_else(err)?;
        self.wrap(e.white_raw()).ok_or_else(err)?;
        Ok(Edge::new(x, e.r))
    }

    /// All edges of the geometry, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self
            .black_sites()
            .flat_map(|b| (1..=4).map(move |r| Edge::new(b, r)))
            .filter_map(|e| self.normalize(e).ok())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// `(black, white)` endpoints of an edge, with the white endpoint wrapped.
pub fn edge_endpoints(e: Edge, g: &LatticeGeometry) -> Result<(Vertex, Vertex)> {
    let e = g.normalize(e)?;
    let w = g.wrap(e.white_raw()).expect("normalized edge");
    Ok((Vertex { x: e.x, color: Color::Black }, Vertex { x: w, color: Color::White }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_guards() {
        assert!(LatticeGeometry::torus(4, 4).is_ok());
        assert!(LatticeGeometry::torus(3, 4).is_err());
        assert!(LatticeGeometry::torus(2, 4).is_err());
        assert!(LatticeGeometry::cylinder(4, 3).is_ok());
        assert!(LatticeGeometry::window(2, 3).is_ok());
        assert!(LatticeGeometry::window(0, 3).is_err());
        assert!(LatticeGeometry::torus(4, 4).unwrap().with_spacing(-1.0).is_err());
    }

    #[test]
    fn endpoints_by_type() {
        let g = LatticeGeometry::torus(4, 4).unwrap();
        let (b, w) = edge_endpoints(Edge::new((0, 0), 1), &g).unwrap();
        assert_eq!(b.x, (0, 0));
        assert_eq!(w.x, (1, 0));
        assert_eq!(w.color, Color::White);
        let (_, w) = edge_endpoints(Edge::new((0, 0), 3), &g).unwrap();
        assert_eq!(w.x, (3, 0));
        let (_, w) = edge_endpoints(Edge::new((3, 1), 1), &g).unwrap();
        assert_eq!(w.x, (0, 1));
    }

    #[test]
    fn open_window_rejects_outside() {
        let g = LatticeGeometry::window(4, 4).unwrap();
        assert!(edge_endpoints(Edge::new((0, 0), 3), &g).is_err());
        assert!(edge_endpoints(Edge::new((0, 0), 4), &g).is_err());
        assert!(edge_endpoints(Edge::new((0, 0), 1), &g).is_ok());
        assert!(edge_endpoints(Edge::new((1, 0), 1), &g).is_err()); // white origin
    }

    #[test]
    fn label_maps_are_consistent() {
        for x in -3..4i64 {
            for y in -3..4i64 {
                if is_black((x, y)) {
                    assert_eq!(black_site(black_label((x, y))), (x, y));
                    for r in 1..=4 {
                        let e = Edge::new((x, y), r);
                        assert_eq!(white_label(e.white_raw()), e.white_label());
                    }
                } else {
                    assert_eq!(white_site(white_label((x, y))), (x, y));
                }
            }
        }
    }

    #[test]
    fn edge_count() {
        assert_eq!(LatticeGeometry::torus(4, 6).unwrap().edges().len(), 48);
        // 2x3 window: 3 horizontal pairs... 2*2 horizontal + 1*3 vertical
        assert_eq!(LatticeGeometry::window(3, 2).unwrap().edges().len(), 7);
    }
}
