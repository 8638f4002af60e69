//! Samplers against exhaustive Gibbs distributions on enumerable systems.

use dimerlab::correlations::WindingSector;
use dimerlab::lattice::{black_site, columnar_configuration, Edge, Face, LatticeGeometry};
use dimerlab::mcmc::{
    dimer_gibbs_distribution, dimer_mcmc_run, estimate_autocorrelation, ising_exact_mean, ising_gibbs_distribution,
    ising_mcmc_run, measure_dimer_correlations, measure_height_covariance, DimerChain, DimerObservable, IsingBoundary,
    IsingChain, IsingInteraction, IsingLattice, IsingModel, IsingObservable, IsingState, Schedule, UpdateKind,
};
use dimerlab::spectral::EdgeWeights;

/// Largest |z| over the configuration frequencies of a dimer chain on a window.
fn dimer_max_z(g: &LatticeGeometry, w: &EdgeWeights, lambda: f64, samples: usize, seed: u64) -> (f64, f64) {
    let exact = dimer_gibbs_distribution(g, w, lambda).unwrap();
    let mut chain = DimerChain::new(g, w, lambda, seed, 0).unwrap();
    for _ in 0..200 {
        chain.sweep();
    }
    let mut series = vec![Vec::with_capacity(samples); exact.len()];
    for _ in 0..samples {
        chain.sweep();
        let d = chain.configuration();
        for (k, (c, _)) in exact.iter().enumerate() {
            series[k].push((c.edges() == d.edges()) as u8 as f64);
        }
    }
    let mut worst: f64 = 0.0;
    let mut tv = 0.0;
    for ((_, p), s) in exact.iter().zip(&series) {
        let est = estimate_autocorrelation(s, seed).unwrap();
        worst = worst.max(est.z_score(*p).abs());
        tv += 0.5 * (est.mean - p).abs();
    }
    (worst, tv)
}

#[test]
fn dimer_chain_matches_gibbs_on_window() {
    let g = LatticeGeometry::window(4, 4).unwrap();
    for (k, (w, lambda)) in [
        (EdgeWeights::uniform(), 0.0),
        (EdgeWeights::uniform(), 0.3),
        (EdgeWeights::uniform(), -0.3),
        (EdgeWeights::new(1.4, 0.7, 1.1).unwrap(), 0.3),
    ]
    .into_iter()
    .enumerate()
    {
        let (z, tv) = dimer_max_z(&g, &w, lambda, 60_000, 11 + k as u64);
        // 36 configurations: the largest of 36 |z| stays below ~3.5
        assert!(z < 4.0, "lambda = {lambda}: max |z| = {z}, tv = {tv}");
        assert!(tv < 0.02, "lambda = {lambda}: tv = {tv}");
    }
}

#[test]
fn dimer_edge_frequencies_and_interaction() {
    let g = LatticeGeometry::window(4, 4).unwrap();
    let w = EdgeWeights::new(0.8, 1.2, 1.0).unwrap();
    let lambda = -0.3;
    let exact = dimer_gibbs_distribution(&g, &w, lambda).unwrap();
    let e1 = Edge::between((1, 1), (2, 1));
    let e2 = Edge::between((1, 2), (1, 3));
    let obs = [DimerObservable::Occupation(e1), DimerObservable::Occupation(e2), DimerObservable::Product(e1, e2)];
    let sched = Schedule::new(500, 40_000, 1).unwrap();
    let run = dimer_mcmc_run(&g, &w, lambda, &sched, 3, &obs).unwrap();
    let n1 = g.normalize(e1).unwrap();
    let n2 = g.normalize(e2).unwrap();
    let targets = [
        exact.iter().filter(|(d, _)| d.contains(&n1)).map(|x| x.1).sum::<f64>(),
        exact.iter().filter(|(d, _)| d.contains(&n2)).map(|x| x.1).sum::<f64>(),
        exact.iter().filter(|(d, _)| d.contains(&n1) && d.contains(&n2)).map(|x| x.1).sum::<f64>(),
    ];
    for (est, t) in run.estimates.iter().zip(targets) {
        assert!(est.z_score(t).abs() < 3.0, "{} vs {t} (stderr {})", est.mean, est.stderr);
    }
}

#[test]
fn dimer_runs_are_reproducible() {
    let g = LatticeGeometry::torus(6, 6).unwrap();
    let w = EdgeWeights::uniform();
    let sched = Schedule::new(10, 200, 1).unwrap();
    let obs = [DimerObservable::Interaction];
    let a = dimer_mcmc_run(&g, &w, 0.2, &sched, 99, &obs);
    let b = dimer_mcmc_run(&g, &w, 0.2, &sched, 99, &obs);
    // short series may fail the length check; both runs must agree either way
    match (a, b) {
        (Ok(a), Ok(b)) => assert_eq!(a.series, b.series),
        (Err(a), Err(b)) => assert_eq!(a.to_string(), b.to_string()),
        _ => panic!("same seed, different outcome"),
    }
    let mut c1 = DimerChain::new(&g, &w, 0.2, 99, 0).unwrap();
    let mut c2 = DimerChain::new(&g, &w, 0.2, 99, 1).unwrap();
    for _ in 0..20 {
        c1.sweep();
        c2.sweep();
    }
    assert_ne!(c1.configuration(), c2.configuration());
}

fn ising_checks(model: &IsingModel, update: UpdateKind, seed: u64) {
    let lat = IsingLattice::new(3, 3, IsingBoundary::Free).unwrap();
    let beta = 0.4;
    let obs = [
        IsingObservable::M2,
        IsingObservable::M4,
        IsingObservable::AbsMagnetization,
        IsingObservable::Energy,
        IsingObservable::Product((0, 0), (2, 2)),
    ];
    let sched = Schedule::new(500, 100_000, 1).unwrap();
    let run = ising_mcmc_run(IsingState::uniform(lat, 1), model, beta, update, &sched, seed, &obs).unwrap();
    for (o, est) in obs.iter().zip(&run.estimates) {
        let exact = ising_exact_mean(&lat, model, beta, |s| o.eval(s, model)).unwrap();
        assert!(est.z_score(exact).abs() < 3.0, "{o:?}: {} vs {exact} (stderr {})", est.mean, est.stderr);
    }
    // distribution of the total spin over its ten values
    let p = ising_gibbs_distribution(&lat, model, beta).unwrap();
    let mut chain = IsingChain::new(IsingState::uniform(lat, 1), model, beta, update, seed + 1, 0).unwrap();
    for _ in 0..500 {
        chain.sweep();
    }
    let n = 60_000;
    let mut series: Vec<Vec<f64>> = (0..10).map(|_| Vec::with_capacity(n)).collect();
    for _ in 0..n {
        chain.sweep();
        let up = chain.state.spins.iter().filter(|s| **s == 1).count();
        for (k, s) in series.iter_mut().enumerate() {
            s.push((k == up) as u8 as f64);
        }
    }
    for (k, s) in series.iter().enumerate() {
        let target: f64 = p.iter().enumerate().filter(|(b, _)| b.count_ones() as usize == k).map(|x| x.1).sum();
        let est = estimate_autocorrelation(s, seed).unwrap();
        assert!(est.z_score(target).abs() < 3.0, "{k} up spins: {} vs {target}", est.mean);
    }
}

#[test]
fn ising_metropolis_matches_gibbs() {
    ising_checks(&IsingModel::nearest_neighbour(), UpdateKind::Metropolis, 21);
    ising_checks(&IsingModel::new(0.05, IsingInteraction::DiagonalPairs).unwrap(), UpdateKind::Metropolis, 22);
    ising_checks(&IsingModel::new(0.05, IsingInteraction::Plaquette).unwrap(), UpdateKind::Metropolis, 23);
}

#[test]
fn ising_wolff_matches_gibbs() {
    ising_checks(&IsingModel::nearest_neighbour(), UpdateKind::Wolff, 31);
}

#[test]
fn ising_runs_are_reproducible() {
    let lat = IsingLattice::new(8, 8, IsingBoundary::Periodic).unwrap();
    let model = IsingModel::new(0.05, IsingInteraction::DiagonalPairs).unwrap();
    let sched = Schedule::new(10, 2000, 1).unwrap();
    let obs = [IsingObservable::Energy];
    let run = |seed| {
        ising_mcmc_run(IsingState::uniform(lat, 1), &model, 0.3, UpdateKind::Metropolis, &sched, seed, &obs)
            .unwrap()
            .series
    };
    assert_eq!(run(5), run(5));
    assert_ne!(run(5), run(6));
}

/// Beyond enumeration: a torus chain keeps its winding sector, so its
/// target is the sector-conditioned measure, computed exactly at lambda = 0.
#[test]
fn torus_chain_matches_winding_sector() {
    let g = LatticeGeometry::torus(16, 16).unwrap();
    let w = EdgeWeights::new(1.2, 0.9, 1.0).unwrap();
    let sector = WindingSector::containing(&g, &w, &columnar_configuration(&g).unwrap(), 16).unwrap();
    let dist: Vec<i64> = (1..=6).collect();
    let sched = Schedule::new(1_000, 20_000, 1).unwrap();
    let mc = measure_dimer_correlations(&g, &w, 0.0, 2, &dist, &sched, 12).unwrap();
    let pairs: Vec<(Edge, Edge)> =
        dist.iter().map(|&d| (Edge::new((0, 0), 2), Edge::new(black_site((d, 0)), 2))).collect();
    let exact = sector.truncated(&pairs).unwrap();
    for (m, x) in mc.iter().zip(&exact) {
        let z = (m.value - x) / m.stderr;
        assert!(z.abs() < 4.0, "r = {}: mc {} +- {} vs sector {x}", m.r, m.value, m.stderr);
    }
    // height covariance is a sum of the same pair correlations along two dual paths
    let q = [Face(0, 0), Face(4, 0), Face(0, 4), Face(4, 4)];
    let cov = measure_height_covariance(&g, &w, 0.0, &[q], 2, &sched, 13).unwrap()[0];
    let p1 = dimerlab::lattice::plane_dual_path(q[1], q[0]);
    let p2 = dimerlab::lattice::plane_dual_path(q[3], q[2]);
    let mut pairs = Vec::new();
    let mut signs = Vec::new();
    for (e, s) in &p1.crossed {
        for (f, t) in &p2.crossed {
            pairs.push((*e, *f));
            signs.push((*s as f64) * (*t as f64));
        }
    }
    let exact: f64 = sector.truncated(&pairs).unwrap().iter().zip(&signs).map(|(v, s)| v * s).sum();
    assert!(((cov.0 - exact) / cov.1).abs() < 4.0, "height covariance {} +- {} vs sector {exact}", cov.0, cov.1);
}
