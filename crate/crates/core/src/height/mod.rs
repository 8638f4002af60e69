//! Height function of dimer configurations and its large-scale statistics.
//!
//! Heights are stored as integers in quarter units: crossing edge `e` along
//! a dual step changes `4h` by `sigma_e (4 * 1_e - 1)`.

mod covariance;

pub use covariance::{exact_height_covariance, face_position, gff_covariance_prediction, GffPrediction};

use std::collections::VecDeque;

use num_complex::Complex64;

use crate::correlations::one_point;
use crate::error::{LabError, Result};
use crate::lattice::{plane_dual_path, DimerConfiguration, DualPath, Face, LatticeGeometry};
use crate::spectral::{DispersionData, EdgeWeights, InfiniteInverse, Omega};

#[derive(Debug, Clone, PartialEq)]
pub struct HeightField {
    geometry: LatticeGeometry,
    base: Face,
    faces: Vec<Face>,
    /// `4 h` per face, in the order of `faces`.
    values: Vec<i64>,
    /// Change of `4 h` around the two torus cycles (0 along open directions).
    winding: (i64, i64),
}

impl HeightField {
    pub fn base(&self) -> Face {
        self.base
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn values4(&self) -> &[i64] {
        &self.values
    }

    pub fn winding4(&self) -> (i64, i64) {
        self.winding
    }

    fn index(&self, f: Face) -> Option<usize> {
        let f = self.geometry.wrap_face(f)?;
        let n1 = if self.geometry.wraps1() { self.geometry.l1 } else { self.geometry.l1 - 1 };
        Some(f.1 as usize * n1 + f.0 as usize)
    }

    /// `4 h` at a face of the fundamental domain.
    pub fn get4(&self, f: Face) -> Option<i64> {
        self.index(f).map(|i| self.values[i])
    }

    /// Height in natural units.
    pub fn get(&self, f: Face) -> Option<f64> {
        self.get4(f).map(|v| v as f64 / 4.0)
    }
}

fn step_increment(g: &LatticeGeometry, d: &DimerConfiguration, a: Face, b: Face) -> Result<i64> {
    Ok(DualPath::through(g, vec![a, b])?.height_increment4(|e| d.contains(e)))
}

/// Integrates the height over all faces by breadth-first search from `base`.
/// On periodic directions the values live on the fundamental domain, cut
/// along its edges, and the cycle increments are reported by
/// [`HeightField::winding4`].
pub fn height_field(g: &LatticeGeometry, d: &DimerConfiguration, base: Face) -> Result<HeightField> {
    // re-validate against this geometry
    let d = DimerConfiguration::new(g, d.edges().to_vec())?;
    let base = g.wrap_face(base).ok_or_else(|| LabError::Geometry(format!("base face {base:?} outside geometry")))?;
    let faces = g.faces();
    let mut field = HeightField { geometry: *g, base, values: vec![0; faces.len()], faces, winding: (0, 0) };
    let mut seen = vec![false; field.faces.len()];
    let start = field.index(base).unwrap();
    seen[start] = true;
    let mut queue = VecDeque::from([base]);
    while let Some(f) = queue.pop_front() {
        let hf = field.get4(f).unwrap();
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let nb = Face(f.0 + dx, f.1 + dy);
            // stay inside the fundamental domain so the values never cross a seam
            if g.wrap_face(nb) != Some(nb) {
                continue;
            }
            let Some(j) = field.index(nb) else { continue };
            if seen[j] {
                continue;
            }
            seen[j] = true;
            field.values[j] = hf + step_increment(g, &d, f, nb)?;
            queue.push_back(g.wrap_face(nb).unwrap());
        }
    }
    let cycle = |dir: (i64, i64), len: usize| -> Result<i64> {
        let faces: Vec<Face> = (0..=len as i64).map(|k| Face(base.0 + k * dir.0, base.1 + k * dir.1)).collect();
        Ok(DualPath::through(g, faces)?.height_increment4(|e| d.contains(e)))
    };
    field.winding =
        (if g.wraps1() { cycle((1, 0), g.l1)? } else { 0 }, if g.wraps2() { cycle((0, 1), g.l2)? } else { 0 });
    Ok(field)
}

/// Grid displacement of a unit step along label direction `j`.
pub fn label_step(j: usize) -> Result<(i64, i64)> {
    match j {
        1 => Ok((1, -1)),
        2 => Ok((1, 1)),
        _ => Err(LabError::InvalidArgument(format!("direction {j} must be 1 or 2"))),
    }
}

fn unit_path(j: usize) -> Result<DualPath> {
    let s = label_step(j)?;
    Ok(plane_dual_path(Face(0, 0), Face(s.0, s.1)))
}

/// `rho_j = sum_{e in C} sigma_e (P(e) - 1/4)` along a unit label step.
pub fn mean_slope(w: &EdgeWeights) -> Result<[f64; 2]> {
    let kinv = InfiniteInverse::new(w);
    let mut rho = [0.0; 2];
    for j in 1..=2 {
        for (e, s) in &unit_path(j)?.crossed {
            rho[j - 1] += *s as f64 * (one_point(*e, &kinv)? - 0.25);
        }
    }
    Ok(rho)
}

/// `sum_{e in C} sigma_e c_{r(e)}` along a unit label step in direction `j`,
/// for per-type coefficients `c` (e.g. `K_{omega,r}`).
pub fn path_coefficient_sum(j: usize, coeffs: &[Complex64; 4]) -> Result<Complex64> {
    Ok(unit_path(j)?.crossed.iter().map(|(e, s)| coeffs[e.r as usize - 1] * *s as f64).sum())
}

/// `-i omega sqrt(nu) d_j phi_omega`.
pub fn chiral_gradient(data: &DispersionData, j: usize, w: Omega, nu: f64) -> Result<Complex64> {
    label_step(j)?;
    Ok(-Complex64::i() * w.sign() * nu.sqrt() * data.dphi(w, j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::AsymptoticCoefficients;
    use crate::lattice::{columnar_configuration, reference_configuration, Edge};
    use crate::spectral::{find_zeros, minimizing_slope};

    #[test]
    fn reference_configuration_heights() {
        let g = LatticeGeometry::torus(8, 8).unwrap();
        let d = reference_configuration(&g, 1).unwrap();
        let h = height_field(&g, &d, Face(0, 0)).unwrap();
        // period 2 horizontally, tilted vertically
        for f in g.faces() {
            assert_eq!(h.get4(f), h.get4(Face(f.0 + 2, f.1)));
            if f.1 + 2 < 8 {
                assert_eq!(h.get4(Face(f.0, f.1 + 2)).unwrap() - h.get4(f).unwrap(), 4);
            }
        }
        // vertical cycle crosses alternately an occupied (+3) and an empty (+1) edge
        assert_eq!(h.winding4(), (0, 16));
    }

    #[test]
    fn plaquette_flip_changes_enclosed_face_by_one() {
        let g = LatticeGeometry::window(4, 4).unwrap();
        let d = columnar_configuration(&g).unwrap();
        let h0 = height_field(&g, &d, Face(2, 2)).unwrap();
        let mut edges: Vec<Edge> = d
            .edges()
            .iter()
            .copied()
            .filter(|e| *e != Edge::between((0, 0), (1, 0)) && *e != Edge::between((0, 1), (1, 1)))
            .collect();
        edges.push(Edge::between((0, 0), (0, 1)));
        edges.push(Edge::between((1, 0), (1, 1)));
        let d1 = DimerConfiguration::new(&g, edges).unwrap();
        let h1 = height_field(&g, &d1, Face(2, 2)).unwrap();
        for f in g.faces() {
            let diff = h1.get4(f).unwrap() - h0.get4(f).unwrap();
            if f == Face(0, 0) {
                assert_eq!(diff.abs(), 4);
            } else {
                assert_eq!(diff, 0);
            }
        }
    }

    #[test]
    fn mean_slope_matches_minimizer() {
        assert!(mean_slope(&EdgeWeights::uniform()).unwrap().iter().all(|v| v.abs() < 1e-12));
        let w = EdgeWeights::new(2.0, 1.0, 1.0).unwrap();
        let a = mean_slope(&w).unwrap();
        let b = minimizing_slope(&w).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-4 && (a[1] - b[1]).abs() < 1e-4, "{a:?} {b:?}");
    }

    #[test]
    fn path_sum_uniform_plus() {
        let d = find_zeros(&EdgeWeights::uniform()).unwrap();
        let c = AsymptoticCoefficients::new(&d);
        let k = |w| [1, 2, 3, 4].map(|r| c.k(w, r));
        let s = path_coefficient_sum(1, &k(Omega::Plus)).unwrap();
        assert!((s - Complex64::new(-1.0, -1.0)).norm() < 1e-12);
        for j in 1..=2 {
            let p = path_coefficient_sum(j, &k(Omega::Plus)).unwrap();
            assert!((p - chiral_gradient(&d, j, Omega::Plus, 1.0).unwrap()).norm() < 1e-12);
            let m = path_coefficient_sum(j, &k(Omega::Minus)).unwrap();
            assert!((m - p.conj()).norm() < 1e-12);
        }
        assert!(path_coefficient_sum(3, &k(Omega::Plus)).is_err());
    }
}
