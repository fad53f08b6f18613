use thiserror::Error;

/// Errors raised by tensor constructors, validators and geometric operations.
#[derive(Debug, Error)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("complex dimension n = {n} outside the supported range 1..={max}")]
    DimensionRange { n: usize, max: usize },

    #[error("matrix is not symmetric (defect {defect:.3e})")]
    NotSymmetric { defect: f64 },

    #[error("metric is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:.3e})"
    )]
    EigenNoConvergence { sweeps: usize, residual: f64 },

    #[error("tensor is not curvature-like: {check} defect {defect:.3e} exceeds {tol:.1e}")]
    NotCurvatureLike {
        check: &'static str,
        defect: f64,
        tol: f64,
    },

    #[error("tensor is not flagged curvature-like; validate it before contracting")]
    NotFlaggedCurvatureLike,

    #[error("not a complex structure: {check} defect {defect:.3e}")]
    BadComplexStructure { check: &'static str, defect: f64 },

    #[error("not a product involution: {check} defect {defect:.3e}")]
    BadInvolution { check: &'static str, defect: f64 },

    #[error(
        "basis vector {index} is linearly dependent (norm ratio {ratio:.3e} below {threshold:.1e})"
    )]
    LinearlyDependent {
        index: usize,
        ratio: f64,
        threshold: f64,
    },

    #[error("frame is not orthonormal (defect {defect:.3e})")]
    FrameNotOrthonormal { defect: f64 },

    #[error("frame is not totally real (max |g(e_i, J e_j)| = {defect:.3e})")]
    FrameNotTotallyReal { defect: f64 },

    #[error("conflicting cubic entries at ({k}, {i}, {j}): {existing} vs {new}")]
    CubicConflict {
        k: usize,
        i: usize,
        j: usize,
        existing: f64,
        new: f64,
    },

    #[error("conflicting curvature entries at ({a}, {b}, {c}, {d}): {existing} vs {new}")]
    CurvatureConflict {
        a: usize,
        b: usize,
        c: usize,
        d: usize,
        existing: f64,
        new: f64,
    },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("{what} requires n > 3 (got n = {n})")]
    RequiresDimensionAboveThree { what: &'static str, n: usize },

    #[error("zero vector rejected: {context}")]
    ZeroVector { context: &'static str },

    #[error("invalid parameter: {what}")]
    InvalidParameter { what: String },

    #[error("internal consistency failure in {what}: paths differ by {difference:.3e}")]
    InternalConsistency { what: &'static str, difference: f64 },
}

pub type Result<T> = std::result::Result<T, GeomError>;
