use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("edge {0:?} lies outside the geometry")]
    EdgeOutside((i64, i64, u8)),
    #[error("dual step does not cross the given edge")]
    NotCrossed,
    #[error("geometry too large for enumeration ({vertices} vertices, cap {cap})")]
    TooLarge { vertices: usize, cap: usize },
    #[error("matrix is not antisymmetric (defect {0:e})")]
    NotAntisymmetric(f64),
    #[error("matrix dimension {0} is odd")]
    OddDimension(usize),
    #[error("matrix is singular")]
    Singular,
    #[error("dispersion relation has {found} simple zeros (expected 2){detail}")]
    ZeroCount { found: usize, detail: String },
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("momentum grid hits a zero of the dispersion relation in sector {0:?}")]
    SectorSingular((u8, u8)),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("coincident points")]
    Coincident,
    #[error("point outside the domain: {0}")]
    OutsideDomain(String),
    #[error("parameter outside guard range: {0}")]
    Guard(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("series too short or degenerate: {0}")]
    Series(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
