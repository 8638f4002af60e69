//! Conditionally convergent sums over `Z^2`, ordered by square shells.
//!
//! Shell `N` holds the points with `max(|n1|, |n2|) = N`. Two accelerations
//! are offered: binomial (Euler) averaging of the partial sums, which removes
//! components alternating in `N`, and a smooth multiplicative cutoff
//! `w(max|n_i| / N)`, which suppresses the boundary terms of sign-alternating
//! lattice sums faster than any power of `N`.

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acceleration {
    /// Plain shell partial sums.
    None,
    /// Binomial averaging of the last `levels + 1` partial sums.
    Euler { levels: usize },
    /// Smooth cutoff window, compared between radii `N` and `N - 4`.
    SmoothWindow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageSum<const K: usize> {
    pub value: [f64; K],
    /// `|S_N - S_{N-4}|` (max over components) after acceleration.
    pub certificate: f64,
    pub shells: usize,
}

fn shell_points(n: i64) -> Vec<(i64, i64)> {
    if n == 0 {
        return vec![(0, 0)];
    }
    let mut pts = Vec::with_capacity(8 * n as usize);
    for k in -n..=n {
        pts.push((k, -n));
        pts.push((k, n));
    }
    for k in (-n + 1)..n {
        pts.push((-n, k));
        pts.push((n, k));
    }
    pts
}

fn window(t: f64) -> f64 {
    // C-infinity step: 1 on [0, 1/2], 0 on [1, inf).
    if t <= 0.5 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let s = (t - 0.5) * 2.0;
    let a = (-1.0 / (1.0 - s)).exp();
    let b = (-1.0 / s).exp();
    a / (a + b)
}

fn add<const K: usize>(acc: &mut [f64; K], v: &[f64; K], w: f64) {
    for i in 0..K {
        acc[i] += w * v[i];
    }
}

fn max_diff<const K: usize>(a: &[f64; K], b: &[f64; K]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Sums `term(n1, n2)` over shells `0..=max_shell`.
///
/// Fails with `NonConvergence` if the certificate exceeds `tol`; use
/// [`lattice_image_sum_unchecked`] to inspect an unconverged estimate.
pub fn lattice_image_sum<const K: usize>(
    term: impl FnMut(i64, i64) -> [f64; K],
    accel: Acceleration,
    max_shell: usize,
    tol: f64,
) -> Result<ImageSum<K>> {
    let s = lattice_image_sum_unchecked(term, accel, max_shell);
    if !(s.certificate <= tol) {
        return Err(LabError::NonConvergence(format!(
            "image sum certificate {:e} above tolerance {:e}",
            s.certificate, tol
        )));
    }
    Ok(s)
}

pub fn lattice_image_sum_unchecked<const K: usize>(
    mut term: impl FnMut(i64, i64) -> [f64; K],
    accel: Acceleration,
    max_shell: usize,
) -> ImageSum<K> {
    let n_max = max_shell.max(4);
    // Per-shell term lists are needed by the windowed estimator; cache them.
    let shells: Vec<Vec<[f64; K]>> =
        (0..=n_max as i64).map(|n| shell_points(n).into_iter().map(|(a, b)| term(a, b)).collect()).collect();
    match accel {
        Acceleration::None | Acceleration::Euler { .. } => {
            let mut partial = Vec::with_capacity(n_max + 1);
            let mut acc = [0.0; K];
            for shell in &shells {
                for v in shell {
                    add(&mut acc, v, 1.0);
                }
                partial.push(acc);
            }
            let levels = match accel {
                Acceleration::Euler { levels } => levels.min(n_max.saturating_sub(4) / 2),
                _ => 0,
            };
            let averaged = |end: usize| -> [f64; K] {
                let mut out = [0.0; K];
                let mut binom = 1.0;
                let norm = 2f64.powi(levels as i32);
                for j in 0..=levels {
                    add(&mut out, &partial[end - levels + j], binom / norm);
                    binom = binom * (levels - j) as f64 / (j + 1) as f64;
                }
                out
            };
            let value = averaged(n_max);
            let prev = averaged(n_max - 4);
            ImageSum { value, certificate: max_diff(&value, &prev), shells: n_max }
        }
        Acceleration::SmoothWindow => {
            let windowed = |radius: usize| -> [f64; K] {
                let mut out = [0.0; K];
                for (n, shell) in shells.iter().enumerate().take(radius + 1) {
                    let w = window(n as f64 / radius as f64);
                    if w == 0.0 {
                        continue;
                    }
                    for v in shell {
                        add(&mut out, v, w);
                    }
                }
                out
            };
            let value = windowed(n_max);
            let prev = windowed(n_max - 4);
            ImageSum { value, certificate: max_diff(&value, &prev), shells: n_max }
        }
    }
}
