use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide error taxonomy. Each variant maps to a distinct CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shift {shift} is numerically in the spectrum (pivot {pivot:.3e} below threshold {threshold:.3e})")]
    SingularShift {
        shift: Complex64,
        pivot: f64,
        threshold: f64,
    },

    #[error("quadrature node {node} lies on the spectrum")]
    NodeOnSpectrum { node: Complex64 },

    #[error("projection did not converge: residual {residual:.3e} at {nodes} nodes per loop{}",
        nearest_eigenvalue_distance.map(|d| format!(" (nearest eigenvalue at distance {d:.3e} from the contour)")).unwrap_or_default())]
    NotConverged {
        residual: f64,
        nodes: usize,
        nearest_eigenvalue_distance: Option<f64>,
    },

    #[error("subspace is not conjugation-closed: residual {residual:.3e} exceeds {tol:.3e}")]
    NotSymmetric { residual: f64, tol: f64 },

    #[error("point {point} is too close to the contour (winding residual {residual:.3e})")]
    TooCloseToContour { point: Complex64, residual: f64 },

    #[error("weight denominator root {root} lies within {distance:.3e} of the contour (clearance {clearance:.3e})")]
    WeightPoleNearContour {
        root: Complex64,
        distance: f64,
        clearance: f64,
    },

    #[error("quadratic pencil has full rank {n}; spectrum is not the conjugate pair — use the contour path")]
    PencilFullRank { n: usize },

    #[error("cyclic seed vector is zero")]
    ZeroVector,

    #[error("operator is singular; backward power chain unavailable")]
    SingularOperator,

    #[error("eigenvalue iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("split is trivial: projector rank {rank} of {n}")]
    TrivialSplit { rank: usize, n: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable process exit code for this error kind.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::NotSquare { .. } => 3,
            Error::SingularShift { .. } => 4,
            Error::NodeOnSpectrum { .. } => 5,
            Error::NotConverged { .. } => 6,
            Error::NotSymmetric { .. } => 7,
            Error::TrivialSplit { .. } => 8,
            Error::PencilFullRank { .. } => 9,
            Error::TooCloseToContour { .. } => 10,
            Error::WeightPoleNearContour { .. } => 11,
            Error::ZeroVector => 12,
            Error::SingularOperator => 13,
            Error::NoConvergence { .. } => 14,
            Error::InvalidContour(_) => 15,
            Error::InvalidArgument(_) => 16,
            Error::Io(_) => 17,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
