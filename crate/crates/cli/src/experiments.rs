//! The experiment kinds of `lab run`. Each returns its CSV tables in a
//! fixed order; parameter points fan out over the rayon pool and are merged
//! back in config order.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use dimerlab::correlations::{
    asymptotic_inverse_kasteleyn, asymptotic_two_point, two_point_truncated, FiniteKasteleyn,
};
use dimerlab::height::{exact_height_covariance, face_position, gff_covariance_prediction, mean_slope, GffPrediction};
use dimerlab::ising::{
    cylinder_energy, cylinder_green, halfplane_energy, plane_energy, plane_spin, BoundaryCondition, CylinderSpec,
    EnergyObservable,
};
use dimerlab::lattice::{black_site, enumerate_matchings, Edge, Face};
use dimerlab::mcmc::{
    binder_beta_c, dimer_mcmc_run, haldane_check, ising_mcmc_run, BinderOptions, DimerObservable, HaldaneOptions,
    IsingLattice, IsingObservable, IsingState,
};
use dimerlab::spectral::{
    find_zeros, minimizing_slope, surface_tension, torus_partition_function, InfiniteInverse, InverseTable,
    KasteleynInverse,
};
use dimerlab::BoundaryKind;

use crate::config::{Config, Experiment};
use crate::row;
use crate::table::Table;
use crate::CliError;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub fn run(c: &Config) -> Result<Vec<Table>, CliError> {
    match c.experiment {
        Experiment::ExactDimer => exact_dimer(c),
        Experiment::AsymptoticsCheck => asymptotics_check(c),
        Experiment::HeightGff => height_gff(c),
        Experiment::SurfaceTension => tension(c),
        Experiment::IsingPlane => ising_plane(c),
        Experiment::IsingCylinder => ising_cylinder(c),
        Experiment::McDimer => mc_dimer(c),
        Experiment::McIsing => mc_ising(c),
        Experiment::BetaC => beta_c(c),
        Experiment::Haldane => haldane(c),
    }
}

/// Edges of the geometry, Kasteleyn probability against enumeration.
fn exact_dimer(c: &Config) -> Result<Vec<Table>, CliError> {
    let g = c.dimer_geometry()?;
    let w = c.weights()?;
    let all = enumerate_matchings(&g)?;
    let weight = |d: &dimerlab::DimerConfiguration| -> f64 { d.edges().iter().map(|e| w.t(e.r)).product() };
    let ws: Vec<f64> = all.iter().map(weight).collect();
    let z: f64 = ws.iter().sum();
    let fk = FiniteKasteleyn::new(&g, &w)?;
    let mut zt = Table::new("partition", &["method", "value", "rel_err"]);
    zt.push(row!["enumeration", z, 0.0]);
    let zk = fk.log_partition_function().exp();
    zt.push(row!["kasteleyn-minors", zk, (zk - z).abs() / z]);
    if g.kind == BoundaryKind::Torus {
        let zs = torus_partition_function(&g, &w)?;
        zt.push(row!["kasteleyn-sectors", zs, (zs - z).abs() / z]);
    }
    let mut et = Table::new("edges", &["x", "y", "r", "p_kasteleyn", "p_enumeration", "abs_err"]);
    for e in g.edges() {
        let exact: f64 = all.iter().zip(&ws).filter(|(d, _)| d.contains(&e)).map(|x| x.1).sum::<f64>() / z;
        let p = fk.probability(&[e])?;
        et.push(row![e.x.0, e.x.1, e.r as i64, p, exact, (p - exact).abs()]);
    }
    Ok(vec![zt, et])
}

/// `K^-1` and the truncated two-point function against their large-distance
/// forms along a label direction.
fn asymptotics_check(c: &Config) -> Result<Vec<Table>, CliError> {
    let w = c.weights()?;
    let data = find_zeros(&w)?;
    let kinv = InfiniteInverse::new(&w);
    let p = &c.params;
    let dir = p.direction.unwrap_or([2, 1]);
    let [r1, r2] = p.edge_types.unwrap_or([1, 2]);
    if dir == [0, 0] || !(1..=4).contains(&r1) || !(1..=4).contains(&r2) {
        return Err(invalid("direction must be non-zero and edge types in 1..=4"));
    }
    let ds = p.distances.clone().unwrap_or_else(|| vec![4, 8, 16, 32, 64]);
    let mut t = Table::new(
        "asymptotics",
        &[
            "R",
            "d1",
            "d2",
            "kinv_exact_re",
            "kinv_exact_im",
            "kinv_asym_re",
            "kinv_asym_im",
            "kinv_rel_err",
            "two_point_exact",
            "two_point_asym",
            "two_point_residual",
        ],
    );
    let rows: Vec<Result<_, CliError>> = ds
        .par_iter()
        .map(|&r| {
            if r <= 0 {
                return Err(invalid(format!("distance {r} must be positive")));
            }
            let d = (r * dir[0], r * dir[1]);
            let x = kinv.eval(d)?;
            let a = asymptotic_inverse_kasteleyn([d.0 as f64, d.1 as f64], &data)?;
            let e = Edge::new((0, 0), r1);
            let e2 = Edge::new(black_site(d), r2);
            let te = two_point_truncated(e, e2, &kinv)?;
            let ta = asymptotic_two_point(e, e2, &data)?;
            Ok(row![r, d.0, d.1, x.re, x.im, a.re, a.im, (x - a).norm() / x.norm(), te, ta, te - ta])
        })
        .collect();
    for r in rows {
        t.push(r?);
    }
    Ok(vec![t])
}

fn height_gff(c: &Config) -> Result<Vec<Table>, CliError> {
    if c.lambdas() != [0.0] {
        return Err(invalid("height-gff is exact at lambda = 0 only"));
    }
    let w = c.weights()?;
    let data = find_zeros(&w)?;
    let p = &c.params;
    let mut quads: Vec<[Face; 4]> = p.quadruples.iter().flatten().map(|q| q.map(|f| Face(f[0], f[1]))).collect();
    for r in p.rectangles.iter().flatten() {
        quads.push([Face(0, 0), Face(r[0], 0), Face(0, r[1]), Face(r[0], r[1])]);
    }
    if quads.is_empty() {
        quads = [(16, 16), (32, 16), (32, 32), (64, 32)]
            .iter()
            .map(|&(a, b)| [Face(0, 0), Face(a, 0), Face(0, b), Face(a, b)])
            .collect();
    }
    let reach = quads
        .iter()
        .flat_map(|q| q.iter().flat_map(|a| q.iter().map(move |b| (a.0 - b.0).abs() + (a.1 - b.1).abs())))
        .max()
        .unwrap_or(0) as usize;
    let kinv = InverseTable::new(&w, p.table_radius.unwrap_or(reach / 2 + 8));
    let pred = GffPrediction::from_dispersion(&data, 1.0)?;
    let mut t =
        Table::new("height-gff", &["x1", "y1", "x2", "y2", "x3", "y3", "x4", "y4", "exact_cov", "gff_pred", "rel_err"]);
    let rows: Vec<Result<_, CliError>> = quads
        .par_iter()
        .map(|q| {
            let exact = exact_height_covariance(*q, &kinv)?;
            let g = gff_covariance_prediction(q.map(face_position), &pred)?;
            Ok(row![
                q[0].0,
                q[0].1,
                q[1].0,
                q[1].1,
                q[2].0,
                q[2].1,
                q[3].0,
                q[3].1,
                exact,
                g,
                (exact - g).abs() / g.abs()
            ])
        })
        .collect();
    for r in rows {
        t.push(r?);
    }
    Ok(vec![t])
}

fn tension(c: &Config) -> Result<Vec<Table>, CliError> {
    let w = c.weights()?;
    let smin = minimizing_slope(&w)?;
    let rho = mean_slope(&w)?;
    let mut m = Table::new("slope", &["method", "s1", "s2"]);
    m.push(row!["argmin-sigma", smin[0], smin[1]]);
    m.push(row!["one-point", rho[0], rho[1]]);
    let slopes = c.params.slopes.clone().unwrap_or_else(|| {
        (-2..=2).flat_map(|a| (-2..=2).map(move |b| [smin[0] + 0.05 * a as f64, smin[1] + 0.05 * b as f64])).collect()
    });
    let mut t = Table::new("surface-tension", &["s1", "s2", "sigma", "b1", "b2"]);
    let rows: Vec<Result<_, CliError>> = slopes
        .par_iter()
        .map(|s| {
            let r = surface_tension(*s, &w)?;
            let (b1, b2) = r.field.map(|f| (f.b1, f.b2)).unwrap_or((f64::NAN, f64::NAN));
            Ok(row![s[0], s[1], r.value, b1, b2])
        })
        .collect();
    for r in rows {
        t.push(r?);
    }
    Ok(vec![m, t])
}

fn points(c: &Config) -> Result<Vec<Complex64>, CliError> {
    let pts = c.params.points.clone().ok_or_else(|| invalid("params.points is required"))?;
    Ok(pts.iter().map(|p| Complex64::new(p[0], p[1])).collect())
}

/// Plane or half-plane correlations of the given points, then the same
/// configuration dilated by each of `scales`.
fn ising_plane(c: &Config) -> Result<Vec<Table>, CliError> {
    let z = points(c)?;
    let domain = c.params.domain.as_deref().unwrap_or("plane");
    let field = c.params.field.as_deref().unwrap_or("energy");
    let eval = |z: &[Complex64]| -> Result<f64, CliError> {
        Ok(match (field, domain) {
            ("energy", "plane") => plane_energy(z)?,
            ("energy", "plus") => halfplane_energy(z, BoundaryCondition::Plus)?,
            ("energy", "minus") => halfplane_energy(z, BoundaryCondition::Minus)?,
            ("energy", "free") => halfplane_energy(z, BoundaryCondition::Free)?,
            ("spin", "plane") => plane_spin(z)?,
            _ => return Err(invalid(format!("unsupported field/domain pair {field}/{domain}"))),
        })
    };
    let scales = c.params.scales.clone().unwrap_or_else(|| vec![1.0]);
    let mut t = Table::new("ising-plane", &["scale", "n", "value"]);
    for s in scales {
        if !(s > 0.0) {
            return Err(invalid(format!("scale {s} must be positive")));
        }
        let zs: Vec<Complex64> = z.iter().map(|p| p * s).collect();
        t.push(row![s, z.len(), eval(&zs)?]);
    }
    Ok(vec![t])
}

/// Cylinder energy correlation of the given points, plus the two-point
/// function against the plane value for horizontal separations `scales`,
/// placed at a quarter of the height where both reflections are farthest.
fn ising_cylinder(c: &Config) -> Result<Vec<Table>, CliError> {
    let [l1, l2] = c.params.cylinder.ok_or_else(|| invalid("params.cylinder = [l1, l2] is required"))?;
    let spec = CylinderSpec::new(l1, l2)?;
    let z2 = c.params.z2.unwrap_or(1.0);
    let mut out = Vec::new();
    if let Some(pts) = &c.params.points {
        let dirs = c.params.directions.clone().unwrap_or_else(|| vec![1; pts.len()]);
        if dirs.len() != pts.len() {
            return Err(invalid("params.directions must match params.points"));
        }
        let obs: Vec<EnergyObservable> =
            pts.iter().zip(&dirs).map(|(p, j)| EnergyObservable::new(*p, *j)).collect::<Result<_, _>>()?;
        let mut t = Table::new("ising-cylinder", &["n", "value"]);
        t.push(row![obs.len(), cylinder_energy(&obs, &spec, z2)?]);
        out.push(t);
    }
    let mut t = Table::new("cylinder-vs-plane", &["separation", "cylinder", "plane", "rel_diff", "certificate"]);
    for s in c.params.scales.clone().unwrap_or_else(|| vec![0.01 * l1, 0.03 * l1, 0.1 * l1]) {
        let x = [0.3 * l1, 0.25 * l2];
        let y = [x[0] + s, x[1]];
        let obs = [EnergyObservable::new(x, 1)?, EnergyObservable::new(y, 1)?];
        let v = cylinder_energy(&obs, &spec, z2)?;
        let plane = z2 * z2 / (PI * PI * s * s);
        let cert = cylinder_green(x, y, &spec)?.certificate;
        t.push(row![s, v, plane, (v - plane).abs() / plane, cert]);
    }
    out.push(t);
    Ok(out)
}

fn mc_dimer(c: &Config) -> Result<Vec<Table>, CliError> {
    let g = c.dimer_geometry()?;
    let w = c.weights()?;
    let sched = c.schedule()?;
    let mut obs = vec![DimerObservable::Interaction];
    let mut names = vec!["V".to_string()];
    for e in c.params.edges.iter().flatten() {
        if !(1..=4).contains(&e[2]) {
            return Err(invalid(format!("edge type {} must be in 1..=4", e[2])));
        }
        obs.push(DimerObservable::Occupation(Edge::new((e[0], e[1]), e[2] as u8)));
        names.push(format!("occ({};{};{})", e[0], e[1], e[2]));
    }
    let lambdas = c.lambdas();
    let runs: Vec<_> = lambdas
        .par_iter()
        .enumerate()
        .map(|(k, &l)| dimer_mcmc_run(&g, &w, l, &sched, c.seed.wrapping_add(k as u64), &obs))
        .collect();
    let mut t =
        Table::new("mc-dimer", &["lambda", "observable", "mean", "stderr", "tau_int", "n_samples", "acceptance"]);
    for (l, run) in lambdas.iter().zip(runs) {
        let run = run?;
        for (name, e) in names.iter().zip(&run.estimates) {
            t.push(row![*l, name.as_str(), e.mean, e.stderr, e.tau_int, e.n_samples, run.acceptance]);
        }
    }
    Ok(vec![t])
}

fn ising_observable(name: &str) -> Result<IsingObservable, CliError> {
    Ok(match name {
        "m" => IsingObservable::Magnetization,
        "abs-m" => IsingObservable::AbsMagnetization,
        "m2" => IsingObservable::M2,
        "m4" => IsingObservable::M4,
        "energy" => IsingObservable::Energy,
        other => return Err(invalid(format!("unknown Ising observable {other:?} (m, abs-m, m2, m4, energy)"))),
    })
}

fn mc_ising(c: &Config) -> Result<Vec<Table>, CliError> {
    let (l1, l2, bc) = c.ising_boundary()?;
    let lat = IsingLattice::new(l1, l2, bc)?;
    let sched = c.schedule()?;
    let beta = c.beta();
    let names =
        c.params.observables.clone().unwrap_or_else(|| vec!["abs-m".into(), "m2".into(), "m4".into(), "energy".into()]);
    let obs: Vec<IsingObservable> = names.iter().map(|n| ising_observable(n)).collect::<Result<_, _>>()?;
    let lambdas = c.lambdas();
    let models: Vec<_> = lambdas.iter().map(|&l| c.ising_model(l)).collect::<Result<_, _>>()?;
    let runs: Vec<_> = models
        .par_iter()
        .enumerate()
        .map(|(k, m)| {
            ising_mcmc_run(
                IsingState::uniform(lat, 1),
                m,
                beta,
                c.update(),
                &sched,
                c.seed.wrapping_add(k as u64),
                &obs,
            )
        })
        .collect();
    let mut t = Table::new("mc-ising", &["lambda", "beta", "observable", "mean", "stderr", "tau_int", "n_samples"]);
    for (l, run) in lambdas.iter().zip(runs) {
        let run = run?;
        for (name, e) in names.iter().zip(&run.estimates) {
            t.push(row![*l, beta, name.as_str(), e.mean, e.stderr, e.tau_int, e.n_samples]);
        }
    }
    Ok(vec![t])
}

fn beta_c(c: &Config) -> Result<Vec<Table>, CliError> {
    let sizes = c.params.sizes.clone().unwrap_or_else(|| vec![8, 16]);
    let mut opts = BinderOptions::default();
    if let Some(wd) = c.params.window {
        opts.window = (wd[0], wd[1]);
    }
    if let Some(s) = c.schedule {
        opts.burn_in = s.burn_in;
        opts.samples = s.samples;
    }
    let lambdas = c.lambdas();
    let models: Vec<_> = lambdas.iter().map(|&l| c.ising_model(l)).collect::<Result<_, _>>()?;
    let results: Vec<_> = models
        .par_iter()
        .enumerate()
        .map(|(k, m)| binder_beta_c(m, &sizes, c.seed.wrapping_add(k as u64), &opts))
        .collect();
    let mut sum = Table::new("beta-c", &["lambda", "beta_c", "err"]);
    let mut cross = Table::new("beta-c-crossings", &["lambda", "l_small", "l_large", "beta_cross", "err"]);
    for (l, r) in lambdas.iter().zip(results) {
        let r = r?;
        sum.push(row![*l, r.beta_c, r.error]);
        for (a, b, x, e) in r.crossings {
            cross.push(row![*l, a, b, x, e]);
        }
    }
    Ok(vec![sum, cross])
}

fn haldane(c: &Config) -> Result<Vec<Table>, CliError> {
    let g = c.dimer_geometry()?;
    let w = c.weights()?;
    let mut opts = HaldaneOptions::for_torus(&g, c.schedule()?);
    if let Some([a, b]) = c.params.fit_range {
        opts.r_range = (a, b);
    }
    let lambdas = c.lambdas();
    let reports: Vec<_> = lambdas
        .par_iter()
        .enumerate()
        .map(|(k, &l)| haldane_check(l, &g, &w, &opts, c.seed.wrapping_add(k as u64)))
        .collect();
    let mut t = Table::new(
        "haldane",
        &["lambda", "nu_corr", "nu_corr_err", "nu_height", "nu_height_err", "ratio", "ratio_err"],
    );
    for (l, r) in lambdas.iter().zip(reports) {
        let r = r?;
        t.push(row![*l, r.nu_corr, r.nu_corr_err, r.nu_height, r.nu_height_err, r.ratio, r.ratio_err]);
    }
    Ok(vec![t])
}
