use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("point on torus axis, closest point ambiguous")]
    PointOnAxis,
    #[error("closest point not unique")]
    ClosestPointNotUnique,
    #[error("point is not on the surface (|rho| = {0:e})")]
    OffSurface(f64),
    #[error("degenerate mapping (|B| = {0:e})")]
    DegenerateMapping(f64),
    #[error("degenerate element {cell} (area factor {area_factor:e})")]
    DegenerateElement { cell: usize, area_factor: f64 },
    #[error("point ({0}, {1}) outside the reference triangle")]
    OutsideReferenceTriangle(f64, f64),
    #[error("unsupported element order {0} (expected 1..=4)")]
    UnsupportedOrder(usize),
    #[error("quadrature degree {0} out of range (expected 1..=14)")]
    QuadratureDegree(usize),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("perturbation produced degenerate cell {0}")]
    DegeneratePerturbation(usize),
    #[error("CG did not converge after {iterations} iterations (relative residual {residual:e})")]
    CgDidNotConverge { iterations: usize, residual: f64 },
    #[error("kernel estimation failed: {0}")]
    KernelEstimationFailed(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
