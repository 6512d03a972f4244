use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero vector where a nonzero lattice vector is required")]
    InvalidVector,
    #[error("vectors do not sum to zero")]
    NotBalanced,
    #[error("vectors do not span the plane")]
    Degenerate,
    #[error("degree is not even")]
    NotEven,
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("evaluation point is not a rational square")]
    NotASquare,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("curve is not simple")]
    NotSimple,
    #[error("curve is not elliptic")]
    NotElliptic,
    #[error("curve has no parity")]
    NoParity,
    #[error("degree and parity are not admissible")]
    NotAdmissible,
    #[error("no candidate direction b of the requested parity")]
    EmptyVSet,
    #[error("subset sums to zero")]
    ZeroSum,
    #[error("vanishing wedge in cycle data")]
    DegenerateWedge,
    #[error("general position failure: {0}")]
    GeneralPositionFailure(String),
    #[error("fragment mismatch: {0}")]
    FragmentMismatch(String),
    #[error("duplicate curve: {0}")]
    DuplicateCurve(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

impl Error {
    /// Errors that indicate a bug or a broken identity rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::InternalInconsistency(_) | Error::DuplicateCurve(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
