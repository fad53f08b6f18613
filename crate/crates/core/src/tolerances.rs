//! Single source of truth for every "approximately zero" in the crate.

/// Largest supported real dimension of an ambient space.
pub const MAX_DIM: usize = 24;

/// Structural validation tolerance for constructed ambient data
/// (complex structures, involutions, curvature symmetries).
pub const STRUCTURE_TOL: f64 = 1e-12;

/// Orthonormality / totally-real tolerance on submanifold frames.
pub const FRAME_TOL: f64 = 1e-10;

/// Linear-dependence rejection threshold in Gram-Schmidt.
pub const DEPENDENCE_THRESHOLD: f64 = 1e-8;

/// Sweep cap for the cyclic Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Disagreement of the two semiparallel evaluation paths beyond this is an
/// internal-consistency failure, not a property of the instance.
pub const DUAL_PATH_TOL: f64 = 1e-10;

/// Tolerance bundle used by condition gates and classifiers.
///
/// `gate` decides whether a geometric condition "holds" (conformal flatness,
/// semiparallelism, minimality, ...). `internal` guards identities that are
/// exact in exact arithmetic. `eigen` is the Jacobi convergence target and
/// `cluster` the absolute tolerance for treating eigenvalues as equal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub gate: f64,
    pub internal: f64,
    pub eigen: f64,
    pub cluster: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gate: 1e-8,
            internal: 1e-12,
            eigen: 1e-12,
            cluster: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn with_gate(mut self, gate: f64) -> Self {
        self.gate = gate;
        self
    }

    pub fn with_internal(mut self, internal: f64) -> Self {
        self.internal = internal;
        self
    }
}
