//! Plaquette-rotation Metropolis chain for dimers with weight
//! `prod t_r(e) * exp(lambda V(D))`, `V(D)` = number of faces carrying two
//! parallel dimers.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::stats::{estimate_autocorrelation, ChainEstimate};
use super::{chain_rng, check_lambda, Schedule};
use crate::error::{LabError, Result};
use crate::lattice::{columnar_configuration, BoundaryKind, DimerConfiguration, DualPath, Edge, Face, LatticeGeometry};
use crate::spectral::EdgeWeights;

#[derive(Debug, Clone)]
pub struct DimerChain {
    g: LatticeGeometry,
    w: EdgeWeights,
    lambda: f64,
    /// Site index of the partner of each site.
    partner: Vec<usize>,
    faces: Vec<Face>,
    rng: ChaCha8Rng,
    seed: u64,
    /// Winding of the current sector; plaquette moves conserve it.
    winding: (i64, i64),
    accepted: u64,
    proposed: u64,
}

impl DimerChain {
    /// Starts from the columnar configuration. Needs a torus or an open
    /// window with even sides.
    pub fn new(g: &LatticeGeometry, w: &EdgeWeights, lambda: f64, seed: u64, stream: u64) -> Result<DimerChain> {
        check_lambda(lambda)?;
        if g.kind == BoundaryKind::Cylinder {
            return Err(LabError::Geometry(
                "plaquette moves are not ergodic on the cylinder; use a torus or a window".into(),
            ));
        }
        if g.l1 % 2 == 1 || g.l2 % 2 == 1 {
            return Err(LabError::Geometry(format!("sides {}x{} must be even", g.l1, g.l2)));
        }
        let start = columnar_configuration(g)?;
        let mut chain = DimerChain {
            g: *g,
            w: *w,
            lambda,
            partner: vec![0; g.vertex_count()],
            faces: g.faces(),
            rng: chain_rng(seed, stream),
            seed,
            winding: (0, 0),
            accepted: 0,
            proposed: 0,
        };
        chain.set_configuration(&start)?;
        Ok(chain)
    }

    pub fn set_configuration(&mut self, d: &DimerConfiguration) -> Result<()> {
        let d = DimerConfiguration::new(&self.g, d.edges().to_vec())?;
        for e in d.edges() {
            let (b, w) = self.endpoints(*e);
            self.partner[b] = w;
            self.partner[w] = b;
        }
        self.winding = self.winding4();
        Ok(())
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.g
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn acceptance(&self) -> f64 {
        self.accepted as f64 / self.proposed.max(1) as f64
    }

    fn endpoints(&self, e: Edge) -> (usize, usize) {
        let w = self.g.wrap(e.white_raw()).expect("normalized edge");
        (self.g.site_index(e.x), self.g.site_index(w))
    }

    fn idx(&self, x: (i64, i64)) -> usize {
        self.g.site_index(self.g.wrap(x).expect("site inside geometry"))
    }

    /// Whether the normalised edge `e` is occupied.
    pub fn occupied(&self, e: &Edge) -> bool {
        let (b, w) = self.endpoints(*e);
        self.partner[b] == w
    }

    pub fn configuration(&self) -> DimerConfiguration {
        let edges: Vec<Edge> = self
            .g
            .black_sites()
            .map(|b| {
                let p = self.g.site_at(self.partner[self.g.site_index(b)]);
                let l1 = self.g.l1 as i64;
                let l2 = self.g.l2 as i64;
                // partner is adjacent up to wrapping
                let d = ((p.0 - b.0 + 1).rem_euclid(l1) - 1, (p.1 - b.1 + 1).rem_euclid(l2) - 1);
                self.g.normalize(Edge::between(b, (b.0 + d.0, b.1 + d.1))).unwrap()
            })
            .collect();
        DimerConfiguration::new(&self.g, edges).expect("chain state is a perfect matching")
    }

    fn corners(&self, f: Face) -> [usize; 4] {
        let (x, y) = (f.0, f.1);
        [self.idx((x, y)), self.idx((x + 1, y)), self.idx((x + 1, y + 1)), self.idx((x, y + 1))]
    }

    /// 1 for two horizontal dimers, 2 for two vertical ones, 0 otherwise.
    fn face_state(&self, f: Face) -> u8 {
        let [a, b, c, d] = self.corners(f);
        if self.partner[a] == b && self.partner[d] == c {
            1
        } else if self.partner[a] == d && self.partner[b] == c {
            2
        } else {
            0
        }
    }

    /// `V(D)`: faces carrying two parallel dimers.
    pub fn interaction(&self) -> usize {
        self.faces.iter().filter(|f| self.face_state(**f) != 0).count()
    }

    fn neighbourhood(&self, f: Face) -> Vec<Face> {
        let mut out: Vec<Face> = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
            .iter()
            .filter_map(|(dx, dy)| self.g.wrap_face(Face(f.0 + dx, f.1 + dy)))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn edge_weight(&self, a: (i64, i64), b: (i64, i64)) -> f64 {
        self.w.t(Edge::between(a, b).r)
    }

    fn rotate(&mut self, f: Face, state: u8) {
        let [a, b, c, d] = self.corners(f);
        if state == 1 {
            self.partner[a] = d;
            self.partner[d] = a;
            self.partner[b] = c;
            self.partner[c] = b;
        } else {
            self.partner[a] = b;
            self.partner[b] = a;
            self.partner[c] = d;
            self.partner[d] = c;
        }
    }

    /// One Metropolis proposal at a uniformly chosen face.
    pub fn step(&mut self) {
        let f = self.faces[self.rng.gen_range(0..self.faces.len())];
        let state = self.face_state(f);
        self.proposed += 1;
        if state == 0 {
            return;
        }
        let (x, y) = (f.0, f.1);
        let horizontal = self.edge_weight((x, y), (x + 1, y)) * self.edge_weight((x, y + 1), (x + 1, y + 1));
        let vertical = self.edge_weight((x, y), (x, y + 1)) * self.edge_weight((x + 1, y), (x + 1, y + 1));
        let mut ratio = if state == 1 { vertical / horizontal } else { horizontal / vertical };
        let near = if self.lambda != 0.0 { self.neighbourhood(f) } else { Vec::new() };
        let before = near.iter().filter(|n| self.face_state(**n) != 0).count() as f64;
        self.rotate(f, state);
        if self.lambda != 0.0 {
            let after = near.iter().filter(|n| self.face_state(**n) != 0).count() as f64;
            ratio *= (self.lambda * (after - before)).exp();
        }
        if ratio >= 1.0 || self.rng.gen::<f64>() < ratio {
            self.accepted += 1;
        } else {
            let back = self.face_state(f);
            self.rotate(f, back);
        }
    }

    pub fn sweep(&mut self) {
        for _ in 0..self.faces.len() {
            self.step();
        }
        if cfg!(debug_assertions) && self.g.kind == BoundaryKind::Torus {
            assert_eq!(self.winding4(), self.winding, "plaquette move changed the winding");
        }
    }

    /// Winding sector sampled by the chain.
    pub fn sector(&self) -> (i64, i64) {
        self.winding
    }

    /// Height change (quarter units) around the two torus cycles through
    /// face `(0, 0)`.
    pub fn winding4(&self) -> (i64, i64) {
        let cycle = |dir: (i64, i64), len: usize| -> i64 {
            let faces: Vec<Face> = (0..=len as i64).map(|k| Face(k * dir.0, k * dir.1)).collect();
            DualPath::through(&self.g, faces).map(|p| p.height_increment4(|e| self.occupied(e))).unwrap_or(0)
        };
        if self.g.kind != BoundaryKind::Torus {
            return (0, 0);
        }
        (cycle((1, 0), self.g.l1), cycle((0, 1), self.g.l2))
    }

    /// Height difference `h(to) - h(from)` along the shortest L-shaped path,
    /// in quarter units.
    pub fn height_difference4(&self, from: Face, to: Face) -> Result<i64> {
        Ok(crate::lattice::dual_path(&self.g, from, to)?.height_increment4(|e| self.occupied(e)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DimerObservable {
    /// `1_e`.
    Occupation(Edge),
    /// `1_e 1_e'`.
    Product(Edge, Edge),
    /// `V(D)`.
    Interaction,
    /// `h(to) - h(from)` in natural units.
    HeightDifference(Face, Face),
}

#[derive(Debug, Clone)]
pub struct DimerRun {
    pub estimates: Vec<ChainEstimate>,
    pub series: Vec<Vec<f64>>,
    pub acceptance: f64,
}

/// Runs a chain and records the requested observables once per sample.
pub fn dimer_mcmc_run(
    g: &LatticeGeometry,
    w: &EdgeWeights,
    lambda: f64,
    schedule: &Schedule,
    seed: u64,
    observables: &[DimerObservable],
) -> Result<DimerRun> {
    let mut chain = DimerChain::new(g, w, lambda, seed, 0)?;
    let norm = |e: &Edge| g.normalize(*e);
    // validate up front
    for o in observables {
        match o {
            DimerObservable::Occupation(e) => {
                norm(e)?;
            }
            DimerObservable::Product(a, b) => {
                norm(a)?;
                norm(b)?;
            }
            DimerObservable::Interaction => {}
            DimerObservable::HeightDifference(a, b) => {
                chain.height_difference4(*a, *b)?;
            }
        }
    }
    let Schedule { burn_in, samples, thin } = *schedule;
    for _ in 0..burn_in {
        chain.sweep();
    }
    let mut series = vec![Vec::with_capacity(samples); observables.len()];
    for _ in 0..samples {
        for _ in 0..thin {
            chain.sweep();
        }
        for (o, s) in observables.iter().zip(series.iter_mut()) {
            let v = match o {
                DimerObservable::Occupation(e) => chain.occupied(&norm(e)?) as u8 as f64,
                DimerObservable::Product(a, b) => (chain.occupied(&norm(a)?) && chain.occupied(&norm(b)?)) as u8 as f64,
                DimerObservable::Interaction => chain.interaction() as f64,
                DimerObservable::HeightDifference(a, b) => chain.height_difference4(*a, *b)? as f64 / 4.0,
            };
            s.push(v);
        }
    }
    let estimates = series.iter().map(|s| estimate_autocorrelation(s, seed)).collect::<Result<Vec<_>>>()?;
    Ok(DimerRun { estimates, series, acceptance: chain.acceptance() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moves_preserve_matching_and_winding() {
        let g = LatticeGeometry::torus(8, 6).unwrap();
        let w = EdgeWeights::new(1.3, 0.8, 1.1).unwrap();
        let mut c = DimerChain::new(&g, &w, 0.4, 7, 0).unwrap();
        for _ in 0..50 {
            c.sweep();
            let d = c.configuration();
            assert_eq!(d.len(), 24);
            assert_eq!(c.winding4(), (0, 0));
        }
        assert!(c.acceptance() > 0.05);
    }

    #[test]
    fn reproducible_streams() {
        let g = LatticeGeometry::window(6, 6).unwrap();
        let w = EdgeWeights::uniform();
        let run = |seed| {
            let mut c = DimerChain::new(&g, &w, -0.3, seed, 0).unwrap();
            for _ in 0..20 {
                c.sweep();
            }
            c.configuration()
        };
        assert_eq!(run(11), run(11));
        assert_ne!(run(11), run(12));
    }

    #[test]
    fn interaction_counts_parallel_faces() {
        let g = LatticeGeometry::window(4, 4).unwrap();
        let c = DimerChain::new(&g, &EdgeWeights::uniform(), 0.0, 0, 0).unwrap();
        // columnar 4x4: dominoes (0,y)-(1,y), (2,y)-(3,y); faces x = 0, 2 in every row
        assert_eq!(c.interaction(), 6);
    }

    #[test]
    fn guards() {
        let w = EdgeWeights::uniform();
        assert!(DimerChain::new(&LatticeGeometry::cylinder(4, 4).unwrap(), &w, 0.0, 0, 0).is_err());
        assert!(DimerChain::new(&LatticeGeometry::window(4, 3).unwrap(), &w, 0.0, 0, 0).is_err());
        assert!(matches!(
            DimerChain::new(&LatticeGeometry::torus(4, 4).unwrap(), &w, 1.5, 0, 0),
            Err(LabError::Guard(_))
        ));
    }
}
