use thiserror::Error;

use crate::measures::AdmissibilityReport;
use crate::solver::SolveTrace;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("polygon is not convex and counter-clockwise near vertex {index}")]
    NotConvex { index: usize },

    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),

    #[error("measure is not centered: defect ({0:.3e}, {1:.3e})")]
    NotCentered(f64, f64),

    #[error("directions are contained in a closed half-plane")]
    DegenerateSpan,

    #[error("origin is not an interior point")]
    OriginOutside,

    #[error("linear map is singular")]
    SingularTransform,

    #[error("superlevel set is empty")]
    EmptyLevel,

    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("pair is not admissible: {0}")]
    NotAdmissible(AdmissibilityReport),

    #[error("origin is not interior to the hull of the gradients")]
    CoercivityViolation,

    #[error("support of g is unbounded while the boundary measure is nonzero")]
    UnboundedSupportTerm,

    #[error("support function is infinite at ({0:.6}, {1:.6})")]
    InfiniteSupport(f64, f64),

    #[error(
        "solver stopped after {} iterations with residual {:.3e}",
        .0.iterates.len(),
        .0.last_residual()
    )]
    NoConvergence(Box<SolveTrace>),

    #[error("radial boundary data is infeasible: {0}")]
    InfeasibleBoundary(String),

    #[error("atom layouts of target and function differ")]
    LayoutMismatch,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn validation(field: &str, reason: impl Into<String>) -> Self {
        Error::Validation { field: field.to_string(), reason: reason.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
