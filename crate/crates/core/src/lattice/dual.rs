use super::{Edge, LatticeGeometry};
use crate::error::{LabError, Result};

/// A face of the grid, named by its lower-left corner `(X, Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face(pub i64, pub i64);

impl Face {
    pub fn center(&self) -> (f64, f64) {
        (self.0 as f64 + 0.5, self.1 as f64 + 0.5)
    }
}

impl LatticeGeometry {
    pub fn wrap_face(&self, f: Face) -> Option<Face> {
        let (l1, l2) = (self.l1 as i64, self.l2 as i64);
        let a = if self.wraps1() {
            f.0.rem_euclid(l1)
        } else if (0..l1 - 1).contains(&f.0) {
            f.0
        } else {
            return None;
        };
        let b = if self.wraps2() {
            f.1.rem_euclid(l2)
        } else if (0..l2 - 1).contains(&f.1) {
            f.1
        } else {
            return None;
        };
        Some(Face(a, b))
    }

    pub fn faces(&self) -> Vec<Face> {
        let n1 = if self.wraps1() { self.l1 } else { self.l1.saturating_sub(1) };
        let n2 = if self.wraps2() { self.l2 } else { self.l2.saturating_sub(1) };
        (0..n2 as i64).flat_map(|y| (0..n1 as i64).map(move |x| Face(x, y))).collect()
    }
}

/// The edge crossed when stepping between two adjacent faces (unwrapped
/// coordinates), or `None` if the faces are not adjacent.
pub fn crossed_edge(from: Face, to: Face) -> Option<Edge> {
    let (x, y) = (from.0, from.1);
    match (to.0 - x, to.1 - y) {
        (1, 0) => Some(Edge::between((x + 1, y), (x + 1, y + 1))),
        (-1, 0) => Some(Edge::between((x, y), (x, y + 1))),
        (0, 1) => Some(Edge::between((x, y + 1), (x + 1, y + 1))),
        (0, -1) => Some(Edge::between((x, y), (x + 1, y))),
        _ => None,
    }
}

/// `+1` if the oriented step crosses `e` with the white endpoint on its
/// right, `-1` if on its left. Faces and edge are compared after wrapping.
pub fn crossing_sign(g: &LatticeGeometry, step: (Face, Face), e: Edge) -> Result<i8> {
    let (from, to) = step;
    let raw = crossed_edge(from, to).ok_or(LabError::NotCrossed)?;
    if g.normalize(raw)? != g.normalize(e)? {
        return Err(LabError::NotCrossed);
    }
    Ok(raw_sign(from, to, raw))
}

pub(crate) fn raw_sign(from: Face, to: Face, e: Edge) -> i8 {
    let d = (to.0 - from.0, to.1 - from.1);
    let w = e.white_raw();
    let b = e.x;
    // twice the white position relative to the edge midpoint
    let rel = (w.0 - b.0, w.1 - b.1);
    let right = (d.1, -d.0);
    if rel.0 * right.0 + rel.1 * right.1 > 0 {
        1
    } else {
        -1
    }
}

/// A nearest-neighbour path on the dual lattice with the crossed edges and
/// their orientation signs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPath {
    pub faces: Vec<Face>,
    /// Normalised crossed edges with sign `sigma_e`.
    pub crossed: Vec<(Edge, i8)>,
}

impl DualPath {
    pub fn len(&self) -> usize {
        self.crossed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossed.is_empty()
    }

    /// Builds the path through the given unwrapped face sequence.
    pub fn through(g: &LatticeGeometry, faces: Vec<Face>) -> Result<DualPath> {
        let mut crossed = Vec::with_capacity(faces.len().saturating_sub(1));
        for w in faces.windows(2) {
            let raw = crossed_edge(w[0], w[1]).ok_or(LabError::NotCrossed)?;
            g.wrap_face(w[1]).ok_or_else(|| LabError::Geometry(format!("face {:?} outside geometry", w[1])))?;
            crossed.push((g.normalize(raw)?, raw_sign(w[0], w[1], raw)));
        }
        Ok(DualPath { faces, crossed })
    }

    /// Height change along the path in quarter units: `sum sigma (4 1_e - 1)`.
    pub fn height_increment4(&self, occupied: impl Fn(&Edge) -> bool) -> i64 {
        self.crossed.iter().map(|(e, s)| *s as i64 * (if occupied(e) { 3 } else { -1 })).sum()
    }
}

fn minimal(d: i64, l: usize, wraps: bool) -> i64 {
    if !wraps {
        return d;
    }
    let l = l as i64;
    let r = d.rem_euclid(l);
    if r >= l / 2 {
        r - l
    } else {
        r
    }
}

/// L-shaped dual path in the infinite plane (no wrapping), horizontal
/// steps first. Edges are returned unnormalised.
pub fn plane_dual_path(from: Face, to: Face) -> DualPath {
    let (dx, dy) = (to.0 - from.0, to.1 - from.1);
    let mut faces = vec![from];
    let mut cur = from;
    for _ in 0..dx.abs() {
        cur = Face(cur.0 + dx.signum(), cur.1);
        faces.push(cur);
    }
    for _ in 0..dy.abs() {
        cur = Face(cur.0, cur.1 + dy.signum());
        faces.push(cur);
    }
    let crossed = faces
        .windows(2)
        .map(|w| {
            let e = crossed_edge(w[0], w[1]).unwrap();
            (e, raw_sign(w[0], w[1], e))
        })
        .collect();
    DualPath { faces, crossed }
}

/// Canonical L-shaped dual path: horizontal steps first, then vertical. On
/// periodic directions the shortest non-winding displacement is used.
pub fn dual_path(g: &LatticeGeometry, from: Face, to: Face) -> Result<DualPath> {
    let start = g.wrap_face(from).ok_or_else(|| LabError::Geometry(format!("face {from:?} outside geometry")))?;
    let end = g.wrap_face(to).ok_or_else(|| LabError::Geometry(format!("face {to:?} outside geometry")))?;
    let dx = minimal(end.0 - start.0, g.l1, g.wraps1());
    let dy = minimal(end.1 - start.1, g.l2, g.wraps2());
    let mut faces = vec![from];
    let mut cur = from;
    for _ in 0..dx.abs() {
        cur = Face(cur.0 + dx.signum(), cur.1);
        faces.push(cur);
    }
    for _ in 0..dy.abs() {
        cur = Face(cur.0, cur.1 + dy.signum());
        faces.push(cur);
    }
    DualPath::through(g, faces)
}
