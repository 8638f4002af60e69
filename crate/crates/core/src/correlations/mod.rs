//! Dimer correlations at `lambda = 0`: exact values in infinite volume and
//! on finite geometries, plus their large-distance forms.

mod asymptotic;
mod finite;
mod sector;

pub use asymptotic::{
    asymptotic_inverse_kasteleyn, asymptotic_two_point, asymptotic_two_point_parts, black_displacement,
    interacting_form_eval, interacting_form_parts, AsymptoticCoefficients, InteractingFormParams, TwoPointParts,
};
pub use finite::FiniteKasteleyn;
pub use sector::{WindingSector, DEFAULT_TWIST_GRID};

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::lattice::Edge;
use crate::numerics::complex_determinant;
use crate::numerics::CMatrix;
use crate::spectral::KasteleynInverse;

/// Largest number of edges accepted by [`multipoint`].
pub const MULTIPOINT_CAP: usize = 12;

fn kinv_between(kinv: &impl KasteleynInverse, e: Edge, black: Edge) -> Result<Complex64> {
    let w = e.white_label();
    let b = black.black_label();
    kinv.eval((w.0 - b.0, w.1 - b.1))
}

/// Infinite-volume occupation probability `K_r K^{-1}(x + v_r, x)`.
pub fn one_point(e: Edge, kinv: &impl KasteleynInverse) -> Result<f64> {
    Ok((kinv.weights().k(e.r) * kinv_between(kinv, e, e)?).re)
}

/// `E(1_e; 1_e') = -K_r K_r' K^{-1}(x + v_r, x') K^{-1}(x' + v_r', x)`.
pub fn two_point_truncated(e: Edge, e2: Edge, kinv: &impl KasteleynInverse) -> Result<f64> {
    if e == e2 {
        return Err(LabError::Coincident);
    }
    let w = kinv.weights();
    let v = -w.k(e.r) * w.k(e2.r) * kinv_between(kinv, e, e2)? * kinv_between(kinv, e2, e)?;
    Ok(v.re)
}

/// `E(1_e1 ... 1_en) = prod K_ri det[K^{-1}(x_i + v_ri, x_j)]`.
pub fn multipoint(edges: &[Edge], kinv: &impl KasteleynInverse) -> Result<f64> {
    let n = edges.len();
    if n > MULTIPOINT_CAP {
        return Err(LabError::InvalidArgument(format!("multipoint limited to {MULTIPOINT_CAP} edges")));
    }
    for i in 0..n {
        if edges[i + 1..].contains(&edges[i]) {
            return Err(LabError::InvalidArgument(format!("duplicate edge {:?}", edges[i])));
        }
    }
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = kinv_between(kinv, edges[i], edges[j])?;
        }
    }
    let k: Complex64 = edges.iter().map(|e| kinv.weights().k(e.r)).product();
    Ok((k * complex_determinant(&m)?.value()).re)
}
