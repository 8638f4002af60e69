//! Large-distance forms of the inverse Kasteleyn matrix and of the
//! truncated dimer-dimer correlation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::lattice::Edge;
use crate::spectral::{DispersionData, Omega};

fn oi(w: Omega) -> usize {
    match w {
        Omega::Plus => 0,
        Omega::Minus => 1,
    }
}

fn dot(p: [f64; 2], x: [f64; 2]) -> f64 {
    p[0] * x[0] + p[1] * x[1]
}

/// Label displacement `x(e) - x(e')` between black endpoints.
pub fn black_displacement(e: Edge, e2: Edge) -> [f64; 2] {
    let a = e.black_label();
    let b = e2.black_label();
    [(a.0 - b.0) as f64, (a.1 - b.1) as f64]
}

/// `K_{omega,r} = K_r e^{-i p_omega . v_r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticCoefficients {
    pub data: DispersionData,
    k: [[Complex64; 4]; 2],
}

impl AsymptoticCoefficients {
    pub fn new(data: &DispersionData) -> AsymptoticCoefficients {
        let mut k = [[Complex64::new(0.0, 0.0); 4]; 2];
        for w in Omega::BOTH {
            let p = data.p(w);
            for r in 1..=4u8 {
                let v = Edge::label_offset(r);
                k[oi(w)][r as usize - 1] =
                    data.weights.k(r) * Complex64::from_polar(1.0, -dot(p, [v.0 as f64, v.1 as f64]));
            }
        }
        AsymptoticCoefficients { data: *data, k }
    }

    pub fn k(&self, w: Omega, r: u8) -> Complex64 {
        self.k[oi(w)][r as usize - 1]
    }
}

/// Leading term `(1/2pi) sum_omega omega e^{-i p_omega . d} / phi_omega(d)`.
pub fn asymptotic_inverse_kasteleyn(d: [f64; 2], data: &DispersionData) -> Result<Complex64> {
    if d == [0.0, 0.0] {
        return Err(LabError::Coincident);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for w in Omega::BOTH {
        let phi = data.phi(w, d);
        assert!(phi.norm() > 0.0, "phi vanishes off the origin: degenerate dispersion data");
        acc += w.sign() * Complex64::from_polar(1.0, -dot(data.p(w), d)) / phi;
    }
    Ok(acc / (2.0 * PI))
}

/// Parameters of the two-term large-distance form of the interacting
/// truncated correlation. At `lambda = 0`, `H = K = K_{omega,r}`, the zeros
/// and slopes are those of `mu`, and `nu = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractingFormParams {
    pub k: [[Complex64; 4]; 2],
    pub h: [[Complex64; 4]; 2],
    pub p: [[f64; 2]; 2],
    pub alpha: [Complex64; 2],
    pub beta: [Complex64; 2],
    pub nu: f64,
}

impl InteractingFormParams {
    pub fn free(data: &DispersionData) -> InteractingFormParams {
        let c = AsymptoticCoefficients::new(data);
        InteractingFormParams {
            k: c.k,
            h: c.k,
            p: [data.p_plus, data.p_minus],
            alpha: data.alpha,
            beta: data.beta,
            nu: 1.0,
        }
    }

    fn phi(&self, w: Omega, x: [f64; 2]) -> Complex64 {
        self.beta[oi(w)] * x[0] - self.alpha[oi(w)] * x[1]
    }
}

/// Smooth and oscillating parts of the two-term form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointParts {
    pub smooth: f64,
    pub oscillatory: f64,
}

impl TwoPointParts {
    pub fn total(&self) -> f64 {
        self.smooth + self.oscillatory
    }
}

pub fn interacting_form_parts(e: Edge, e2: Edge, params: &InteractingFormParams) -> Result<TwoPointParts> {
    if !(params.nu > 0.0) {
        return Err(LabError::InvalidArgument(format!("exponent nu = {} must be positive", params.nu)));
    }
    let d = black_displacement(e, e2);
    if d == [0.0, 0.0] {
        return Err(LabError::Coincident);
    }
    let (r, r2) = (e.r as usize - 1, e2.r as usize - 1);
    let mut smooth = Complex64::new(0.0, 0.0);
    let mut osc = Complex64::new(0.0, 0.0);
    for w in Omega::BOTH {
        let (o, m) = (oi(w), oi(w.flip()));
        let phi = params.phi(w, d);
        smooth += params.k[o][r] * params.k[o][r2] / (phi * phi);
        let dp = [params.p[o][0] - params.p[m][0], params.p[o][1] - params.p[m][1]];
        osc += params.h[m][r] * params.h[o][r2] * Complex64::from_polar(1.0, dot(dp, d))
            / phi.norm().powf(2.0 * params.nu);
    }
    let c = 1.0 / (4.0 * PI * PI);
    Ok(TwoPointParts { smooth: c * smooth.re, oscillatory: c * osc.re })
}

pub fn interacting_form_eval(e: Edge, e2: Edge, params: &InteractingFormParams) -> Result<f64> {
    interacting_form_parts(e, e2, params).map(|p| p.total())
}

pub fn asymptotic_two_point_parts(e: Edge, e2: Edge, data: &DispersionData) -> Result<TwoPointParts> {
    interacting_form_parts(e, e2, &InteractingFormParams::free(data))
}

/// Smooth plus oscillating leading terms of `E(1_e; 1_e')` at `lambda = 0`.
pub fn asymptotic_two_point(e: Edge, e2: Edge, data: &DispersionData) -> Result<f64> {
    asymptotic_two_point_parts(e, e2, data).map(|p| p.total())
}
