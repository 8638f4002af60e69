//! Critical temperature from crossings of Binder cumulants.

use super::ising::{IsingBoundary, IsingChain, IsingLattice, IsingModel, IsingState, UpdateKind};
use super::stats::integrated_time;
use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinderOptions {
    /// Bracket `[lo, hi]` scanned for the crossing.
    pub window: (f64, f64),
    pub burn_in: usize,
    pub samples: usize,
    /// Bisection stops once the bracket is narrower than this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for BinderOptions {
    fn default() -> Self {
        BinderOptions { window: (0.40, 0.48), burn_in: 300, samples: 20_000, tol: 2e-4, max_iter: 20 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinderResult {
    pub beta_c: f64,
    pub error: f64,
    /// One crossing per consecutive size pair.
    pub crossings: Vec<(usize, usize, f64, f64)>,
}

/// `U = 1 - <m^4> / (3 <m^2>^2)` on an `l x l` torus, with a jackknife
/// error over blocks.
pub fn binder_cumulant(
    l: usize,
    model: &IsingModel,
    beta: f64,
    opts: &BinderOptions,
    seed: u64,
    stream: u64,
) -> Result<(f64, f64)> {
    let lat = IsingLattice::new(l, l, IsingBoundary::Periodic)?;
    let update = if model.lambda == 0.0 { UpdateKind::Wolff } else { UpdateKind::Metropolis };
    let mut chain = IsingChain::new(IsingState::uniform(lat, 1), model, beta, update, seed, stream)?;
    if update == UpdateKind::Wolff {
        chain.calibrate_wolff(100 + opts.burn_in);
    }
    for _ in 0..opts.burn_in {
        chain.sweep();
    }
    let mut m2 = Vec::with_capacity(opts.samples);
    let mut m4 = Vec::with_capacity(opts.samples);
    for _ in 0..opts.samples {
        chain.sweep();
        let m = chain.state.magnetization();
        m2.push(m * m);
        m4.push(m * m * m * m);
    }
    let u = |a: f64, b: f64| 1.0 - b / (3.0 * a * a);
    let tau = integrated_time(&m2)?;
    let b = ((8.0 * tau).ceil() as usize).next_power_of_two();
    let nb = m2.len() / b;
    if nb < 16 {
        return Err(LabError::Series(format!("{nb} blocks for the Binder cumulant; raise samples")));
    }
    let block = |x: &[f64]| -> Vec<f64> { x.chunks_exact(b).map(|c| c.iter().sum::<f64>()).collect() };
    let (s2, s4) = (block(&m2), block(&m4));
    let (t2, t4): (f64, f64) = (s2.iter().sum(), s4.iter().sum());
    let total = (nb * b) as f64;
    let full = u(t2 / total, t4 / total);
    let loo: Vec<f64> = (0..nb)
        .map(|k| {
            let n = total - b as f64;
            u((t2 - s2[k]) / n, (t4 - s4[k]) / n)
        })
        .collect();
    let mean = loo.iter().sum::<f64>() / nb as f64;
    let var = loo.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() * (nb - 1) as f64 / nb as f64;
    Ok((full, var.sqrt()))
}

fn crossing(small: usize, large: usize, model: &IsingModel, seed: u64, opts: &BinderOptions) -> Result<(f64, f64)> {
    let mut stream = 0u64;
    let mut diff = |beta: f64| -> Result<(f64, f64)> {
        let (a, ea) = binder_cumulant(small, model, beta, opts, seed, stream)?;
        let (b, eb) = binder_cumulant(large, model, beta, opts, seed, stream + 1)?;
        stream += 2;
        Ok((a - b, ea.hypot(eb)))
    };
    let (mut lo, mut hi) = opts.window;
    let (mut dlo, _) = diff(lo)?;
    let (mut dhi, _) = diff(hi)?;
    if !(dlo > 0.0 && dhi < 0.0) {
        return Err(LabError::Fit(format!(
            "no Binder crossing of L = {small}, {large} in [{lo}, {hi}] (U differences {dlo:.4}, {dhi:.4})"
        )));
    }
    let slope = (dlo - dhi) / (hi - lo);
    let mut noise: f64 = 0.0;
    for _ in 0..opts.max_iter {
        if hi - lo < opts.tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (d, e) = diff(mid)?;
        noise = noise.max(e);
        if d > 0.0 {
            lo = mid;
            dlo = d;
        } else {
            hi = mid;
            dhi = d;
        }
    }
    let beta = lo + dlo * (hi - lo) / (dlo - dhi);
    Ok((beta, (noise / slope).hypot(0.5 * (hi - lo))))
}

/// Inverse critical temperature from Binder crossings of consecutive sizes
/// on periodic `L x L` lattices, combined by inverse-variance weighting.
pub fn binder_beta_c(model: &IsingModel, sizes: &[usize], seed: u64, opts: &BinderOptions) -> Result<BinderResult> {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 2 {
        return Err(LabError::InvalidArgument("need at least two distinct sizes".into()));
    }
    let mut crossings = Vec::new();
    for (k, pair) in sizes.windows(2).enumerate() {
        let (b, e) = crossing(pair[0], pair[1], model, seed.wrapping_add(k as u64), opts)?;
        crossings.push((pair[0], pair[1], b, e));
    }
    let wsum: f64 = crossings.iter().map(|c| 1.0 / (c.3 * c.3)).sum();
    let beta_c = crossings.iter().map(|c| c.2 / (c.3 * c.3)).sum::<f64>() / wsum;
    Ok(BinderResult { beta_c, error: wsum.sqrt().recip(), crossings })
}
