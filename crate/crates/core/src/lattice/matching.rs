use std::collections::HashSet;

use super::{is_black, Edge, LatticeGeometry};
use crate::error::{LabError, Result};

/// Largest vertex count accepted by [`enumerate_matchings`].
pub const ENUMERATION_CAP: usize = 36;

/// A perfect matching, stored as sorted normalised edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimerConfiguration {
    edges: Vec<Edge>,
    lookup: HashSet<Edge>,
}

impl DimerConfiguration {
    /// Checks that `edges` covers every vertex of `g` exactly once.
    pub fn new(g: &LatticeGeometry, edges: Vec<Edge>) -> Result<DimerConfiguration> {
        let mut seen = vec![false; g.vertex_count()];
        let mut norm = Vec::with_capacity(edges.len());
        for e in edges {
            let e = g.normalize(e)?;
            let w = g.wrap(e.white_raw()).expect("normalized edge");
            for v in [e.x, w] {
                let i = g.site_index(v);
                if seen[i] {
                    return Err(LabError::Geometry(format!("site {v:?} covered twice")));
                }
                seen[i] = true;
            }
            norm.push(e);
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(LabError::Geometry(format!("site {:?} uncovered", g.site_at(i))));
        }
        Ok(Self::from_sorted(norm))
    }

    fn from_sorted(mut edges: Vec<Edge>) -> DimerConfiguration {
        edges.sort();
        let lookup = edges.iter().copied().collect();
        DimerConfiguration { edges, lookup }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `e` must already be normalised.
    pub fn contains(&self, e: &Edge) -> bool {
        self.lookup.contains(e)
    }
}

/// Every black site matched along its type-`r` edge. Needs periodicity in
/// the direction of `r`.
pub fn reference_configuration(g: &LatticeGeometry, r: u8) -> Result<DimerConfiguration> {
    if !(1..=4).contains(&r) {
        return Err(LabError::InvalidArgument(format!("edge type {r}")));
    }
    let ok = if Edge::new((0, 0), r).is_horizontal() { g.wraps1() } else { g.wraps2() };
    if !ok {
        return Err(LabError::Geometry(format!(
            "type-{r} reference configuration needs periodicity along its direction"
        )));
    }
    let edges: Vec<Edge> = g.black_sites().map(|b| Edge::new(b, r)).collect();
    DimerConfiguration::new(g, edges)
}

/// Horizontal dominoes `(2k, Y)-(2k+1, Y)`, or vertical ones if `L1` is odd.
pub fn columnar_configuration(g: &LatticeGeometry) -> Result<DimerConfiguration> {
    let mut edges = Vec::with_capacity(g.vertex_count() / 2);
    if g.l1.is_multiple_of(2) {
        for y in 0..g.l2 as i64 {
            for x in (0..g.l1 as i64).step_by(2) {
                edges.push(Edge::between((x, y), (x + 1, y)));
            }
        }
    } else if g.l2.is_multiple_of(2) {
        for x in 0..g.l1 as i64 {
            for y in (0..g.l2 as i64).step_by(2) {
                edges.push(Edge::between((x, y), (x, y + 1)));
            }
        }
    } else {
        return Err(LabError::Geometry("odd number of sites".into()));
    }
    DimerConfiguration::new(g, edges)
}

/// Edges incident to a site, normalised, deduplicated.
pub(crate) fn incident_edges(g: &LatticeGeometry, v: (i64, i64)) -> Vec<Edge> {
    let mut out: Vec<Edge> = (1..=4u8)
        .filter_map(|r| {
            let e = if is_black(v) {
                Edge::new(v, r)
            } else {
                let d = Edge::offset(r);
                Edge::new((v.0 - d.0, v.1 - d.1), r)
            };
            g.normalize(e).ok()
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// All perfect matchings, by branching on the lowest uncovered site.
pub fn enumerate_matchings(g: &LatticeGeometry) -> Result<Vec<DimerConfiguration>> {
    let n = g.vertex_count();
    if n > ENUMERATION_CAP {
        return Err(LabError::TooLarge { vertices: n, cap: ENUMERATION_CAP });
    }
    let mut out = Vec::new();
    if n % 2 == 1 {
        return Ok(out);
    }
    let incident: Vec<Vec<(Edge, usize)>> = (0..n)
        .map(|i| {
            let v = g.site_at(i);
            incident_edges(g, v)
                .into_iter()
                .map(|e| {
                    let other = if is_black(v) { g.wrap(e.white_raw()).unwrap() } else { e.x };
                    (e, g.site_index(other))
                })
                .collect()
        })
        .collect();
    let mut covered = vec![false; n];
    let mut stack = Vec::with_capacity(n / 2);
    fn recurse(
        incident: &[Vec<(Edge, usize)>],
        covered: &mut [bool],
        stack: &mut Vec<Edge>,
        out: &mut Vec<DimerConfiguration>,
    ) {
        let Some(i) = covered.iter().position(|c| !c) else {
            out.push(DimerConfiguration::from_sorted(stack.clone()));
            return;
        };
        covered[i] = true;
        for &(e, j) in &incident[i] {
            if !covered[j] {
                covered[j] = true;
                stack.push(e);
                recurse(incident, covered, stack, out);
                stack.pop();
                covered[j] = false;
            }
        }
        covered[i] = false;
    }
    recurse(&incident, &mut covered, &mut stack, &mut out);
    Ok(out)
}
