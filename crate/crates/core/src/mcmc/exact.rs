//! Exhaustive Gibbs distributions for small systems, used as oracles.

use super::ising::{IsingLattice, IsingModel, IsingState};
use crate::error::{LabError, Result};
use crate::lattice::{enumerate_matchings, DimerConfiguration, Edge, LatticeGeometry};
use crate::spectral::EdgeWeights;

/// Largest spin count summed exhaustively.
pub const ISING_ENUMERATION_CAP: usize = 20;

fn has(g: &LatticeGeometry, d: &DimerConfiguration, a: (i64, i64), b: (i64, i64)) -> bool {
    g.normalize(Edge::between(a, b)).map(|e| d.contains(&e)).unwrap_or(false)
}

/// Faces carrying two parallel dimers.
pub(crate) fn parallel_faces(g: &LatticeGeometry, d: &DimerConfiguration) -> usize {
    g.faces()
        .iter()
        .filter(|f| {
            let (x, y) = (f.0, f.1);
            (has(g, d, (x, y), (x + 1, y)) && has(g, d, (x, y + 1), (x + 1, y + 1)))
                || (has(g, d, (x, y), (x, y + 1)) && has(g, d, (x + 1, y), (x + 1, y + 1)))
        })
        .count()
}

/// Every perfect matching with its probability under
/// `prod t_r(e) exp(lambda V(D))`.
pub fn dimer_gibbs_distribution(
    g: &LatticeGeometry,
    w: &EdgeWeights,
    lambda: f64,
) -> Result<Vec<(DimerConfiguration, f64)>> {
    let all = enumerate_matchings(g)?;
    if all.is_empty() {
        return Err(LabError::Geometry("no perfect matchings".into()));
    }
    let weights: Vec<f64> = all
        .iter()
        .map(|d| {
            let t: f64 = d.edges().iter().map(|e| w.t(e.r)).product();
            t * (lambda * parallel_faces(g, d) as f64).exp()
        })
        .collect();
    let z: f64 = weights.iter().sum();
    Ok(all.into_iter().zip(weights).map(|(d, x)| (d, x / z)).collect())
}

fn state_from_bits(lat: IsingLattice, bits: usize) -> IsingState {
    let spins = (0..lat.len()).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect();
    IsingState { lattice: lat, spins }
}

/// Probabilities of all `2^N` states, indexed by the bit pattern of `+1`
/// spins (site `i` is bit `i`).
pub fn ising_gibbs_distribution(lat: &IsingLattice, model: &IsingModel, beta: f64) -> Result<Vec<f64>> {
    let n = lat.len();
    if n > ISING_ENUMERATION_CAP {
        return Err(LabError::TooLarge { vertices: n, cap: ISING_ENUMERATION_CAP });
    }
    model.check_lattice(lat)?;
    let energies: Vec<f64> = (0..1usize << n).map(|b| state_from_bits(*lat, b).energy(model)).collect();
    let e0 = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = energies.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / z).collect())
}

/// Exact Gibbs mean of `f`.
pub fn ising_exact_mean(
    lat: &IsingLattice,
    model: &IsingModel,
    beta: f64,
    f: impl Fn(&IsingState) -> f64,
) -> Result<f64> {
    let p = ising_gibbs_distribution(lat, model, beta)?;
    Ok(p.iter().enumerate().map(|(b, q)| q * f(&state_from_bits(*lat, b))).sum())
}
