//! Integrated autocorrelation time and blocked error bars.

use crate::error::{LabError, Result};

/// Sokal's window factor: stop at the first `W >= C * tau(W)`.
const WINDOW_FACTOR: f64 = 6.0;
/// Minimum series length in units of `tau_int`.
pub const MIN_LENGTH_TAUS: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainEstimate {
    pub mean: f64,
    /// Standard error from blocking.
    pub stderr: f64,
    pub tau_int: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl ChainEstimate {
    /// `|mean - target| / stderr`.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.stderr
    }
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
    (m, v)
}

/// `tau_int = 1/2 + sum_{t=1}^{W} rho(t)` with a self-consistent window.
pub fn integrated_time(x: &[f64]) -> Result<f64> {
    let n = x.len();
    if n < 2 {
        return Err(LabError::Series(format!("{n} samples")));
    }
    let (m, v) = mean_var(x);
    if !(v > 1e-24 * (1.0 + m * m)) {
        return Err(LabError::Series("constant series".into()));
    }
    let c: Vec<f64> = x.iter().map(|a| a - m).collect();
    let mut tau = 0.5;
    for t in 1..n {
        let rho = c[..n - t].iter().zip(&c[t..]).map(|(a, b)| a * b).sum::<f64>() / ((n - t) as f64 * v);
        tau += rho;
        if t as f64 >= WINDOW_FACTOR * tau {
            return Ok(tau.max(0.5));
        }
    }
    Err(LabError::Series("autocorrelation window did not close".into()))
}

/// Standard error of the mean from non-overlapping blocks of length `b`.
pub fn blocked_stderr(x: &[f64], b: usize) -> Result<f64> {
    let nb = x.len() / b.max(1);
    if nb < 8 {
        return Err(LabError::Series(format!("only {nb} blocks of length {b}")));
    }
    let means: Vec<f64> = x.chunks_exact(b).map(|c| c.iter().sum::<f64>() / b as f64).collect();
    let (_, v) = mean_var(&means);
    Ok((v / (nb - 1) as f64).sqrt())
}

/// Mean, blocked standard error and `tau_int` of a stationary series.
/// Blocks are at least `8 tau_int` long, rounded up to a power of two.
pub fn estimate_autocorrelation(x: &[f64], seed: u64) -> Result<ChainEstimate> {
    let tau = integrated_time(x)?;
    if (x.len() as f64) < MIN_LENGTH_TAUS * tau {
        return Err(LabError::Series(format!(
            "{} samples is shorter than {MIN_LENGTH_TAUS} tau_int (tau_int = {tau:.1})",
            x.len()
        )));
    }
    let b = ((8.0 * tau).ceil() as usize).next_power_of_two();
    let (mean, _) = mean_var(x);
    Ok(ChainEstimate { mean, stderr: blocked_stderr(x, b)?, tau_int: tau, n_samples: x.len(), seed })
}
