//! Shared numerical kernels.

pub mod image_sum;
pub mod linalg;
pub mod pfaffian;
pub mod quadrature;
pub mod regression;
pub mod roots;

pub use image_sum::{lattice_image_sum, Acceleration, ImageSum};
pub use linalg::{complex_determinant, inverse, CMatrix, LogDet, Lu};
pub use pfaffian::{pfaffian, SkewMatrix};
pub use quadrature::{gauss_legendre, integrate, integrate_complex};
pub use regression::{power_law_fit, weighted_line, PowerLawFit};
pub use roots::newton_2d;
