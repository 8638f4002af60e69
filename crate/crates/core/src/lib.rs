//! Exact and Monte Carlo tools for critical two-dimensional dimer and Ising
//! models.

// `!(x > 0.0)` style guards are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlations;
pub mod error;
pub mod height;
pub mod ising;
pub mod lattice;
pub mod mcmc;
pub mod numerics;
pub mod spectral;

pub use error::{LabError, Result};
pub use lattice::{BoundaryKind, DimerConfiguration, Edge, LatticeGeometry, Vertex};
pub use spectral::EdgeWeights;
