//! A pointwise numerical laboratory for curvature conditions on totally real
//! submanifolds of Kaehler manifolds: ambient curvature models, second
//! fundamental form data at a point, every curvature condition as a measured
//! defect, and classification verdicts checked against brute-force oracles.

// Multi-index tensor kernels read better as explicit index loops.
#![allow(clippy::needless_range_loop)]

pub mod ambient;
pub mod classify;
pub mod error;
pub mod selftest;
pub mod submanifold;
pub mod tensor;
pub mod tolerances;

pub use error::{GeomError, Result};
pub use tolerances::Tolerances;
