//! `lab selftest`: exact computations against exhaustive enumeration on
//! desk-scale systems.

use dimerlab::correlations::FiniteKasteleyn;
use dimerlab::lattice::{enumerate_matchings, LatticeGeometry};
use dimerlab::mcmc::{dimer_gibbs_distribution, ising_exact_mean, IsingBoundary, IsingLattice, IsingModel};
use dimerlab::numerics::{complex_determinant, pfaffian, SkewMatrix};
use dimerlab::spectral::{torus_partition_function, EdgeWeights};
use dimerlab::BoundaryKind;
use num_complex::Complex64;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn weights() -> Vec<EdgeWeights> {
    [(1.0, 1.0, 1.0), (1.3, 0.7, 1.1), (0.5, 2.0, 0.9), (2.5, 1.2, 0.4)]
        .iter()
        .map(|&(a, b, c)| EdgeWeights::new(a, b, c).unwrap())
        .collect()
}

fn geometries() -> Vec<LatticeGeometry> {
    vec![
        LatticeGeometry::torus(4, 4).unwrap(),
        LatticeGeometry::torus(4, 6).unwrap(),
        LatticeGeometry::window(4, 4).unwrap(),
        LatticeGeometry::window(6, 6).unwrap(),
    ]
}

fn partition_functions() -> Outcome {
    let mut worst: f64 = 0.0;
    for g in geometries() {
        let all = enumerate_matchings(&g).map_err(|e| e.to_string())?;
        for w in weights() {
            let z: f64 = all.iter().map(|d| d.edges().iter().map(|e| w.t(e.r)).product::<f64>()).sum();
            let fk = FiniteKasteleyn::new(&g, &w).map_err(|e| e.to_string())?;
            worst = worst.max((fk.log_partition_function().exp() - z).abs() / z);
            if g.kind == BoundaryKind::Torus {
                let zt = torus_partition_function(&g, &w).map_err(|e| e.to_string())?;
                worst = worst.max((zt - z).abs() / z);
            }
        }
    }
    check(worst < 1e-9, format!("partition functions, worst relative error {worst:.1e}"))
}

fn edge_probabilities() -> Outcome {
    let mut worst: f64 = 0.0;
    for g in geometries() {
        for w in weights() {
            let exact = dimer_gibbs_distribution(&g, &w, 0.0).map_err(|e| e.to_string())?;
            let fk = FiniteKasteleyn::new(&g, &w).map_err(|e| e.to_string())?;
            let edges = g.edges();
            for (i, e) in edges.iter().enumerate() {
                let p: f64 = exact.iter().filter(|(d, _)| d.contains(e)).map(|x| x.1).sum();
                worst = worst.max((fk.probability(&[*e]).map_err(|x| x.to_string())? - p).abs());
                let f = edges[(5 * i + 3) % edges.len()];
                if f != *e {
                    let q: f64 = exact.iter().filter(|(d, _)| d.contains(e) && d.contains(&f)).map(|x| x.1).sum();
                    worst = worst.max((fk.probability(&[*e, f]).map_err(|x| x.to_string())? - q).abs());
                }
            }
        }
    }
    check(worst < 1e-10, format!("one- and two-edge probabilities, worst abs error {worst:.1e}"))
}

fn ising_chain() -> Outcome {
    let lat = IsingLattice::new(2, 1, IsingBoundary::Free).map_err(|e| e.to_string())?;
    let beta: f64 = 0.37;
    let m = ising_exact_mean(&lat, &IsingModel::nearest_neighbour(), beta, |s| (s.spins[0] * s.spins[1]) as f64)
        .map_err(|e| e.to_string())?;
    let err = (m - beta.tanh()).abs();
    check(err < 1e-14, format!("two-spin Ising enumeration vs tanh(beta), error {err:.1e}"))
}

fn pfaffians() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2usize, 4, 8, 16] {
        // deterministic pseudo-random entries
        let m = SkewMatrix::from_upper(n, |i, j| {
            let t = (i * 31 + j * 17 + n) as f64;
            Complex64::new(t.sin(), (0.7 * t).cos())
        });
        let p = pfaffian(&m);
        let d = complex_determinant(m.matrix()).map_err(|e| e.to_string())?.value();
        worst = worst.max((p * p - d).norm() / d.norm());
    }
    check(worst < 1e-9, format!("Pf^2 = det up to 16x16, worst relative error {worst:.1e}"))
}

/// Runs every check, printing one line each; true when all pass.
pub fn run() -> bool {
    let checks: [Check; 4] = [
        ("partition", partition_functions),
        ("probabilities", edge_probabilities),
        ("ising", ising_chain),
        ("pfaffian", pfaffians),
    ];
    let mut ok = true;
    for (name, f) in checks {
        match f() {
            Ok(m) => println!("ok   {name:<14} {m}"),
            Err(m) => {
                ok = false;
                println!("FAIL {name:<14} {m}");
            }
        }
    }
    ok
}
