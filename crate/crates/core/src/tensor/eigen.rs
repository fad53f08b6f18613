//! Cyclic Jacobi diagonalization for the small symmetric matrices of this
//! crate (dimension at most 24). Simplicity over speed.

use super::{Bilinear, Matrix};
use crate::error::{GeomError, Result};
use crate::tolerances::JACOBI_MAX_SWEEPS;

/// Spectrum of a symmetric bilinear form: eigenvalues sorted ascending,
/// matching orthonormal eigenvector columns, and the final off-diagonal
/// residual of the diagonalization.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
    pub residual: f64,
}

impl Spectrum {
    /// Coordinates of the j-th eigenvector in the original basis.
    pub fn eigenvector(&self, j: usize) -> Vec<f64> {
        self.eigenvectors.col(j)
    }
}

fn off_diag_max(a: &[f64], n: usize) -> f64 {
    let mut m: f64 = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            m = m.max(a[p * n + q].abs());
        }
    }
    m
}

/// Diagonalizes `s` by cyclic Jacobi sweeps until the largest off-diagonal
/// entry drops below `tol`, or fails after the sweep cap carrying the residual.
pub fn sym_eigen(s: &Bilinear, tol: f64) -> Result<Spectrum> {
    let n = s.dim();
    let mut a: Vec<f64> = s.data().to_vec();
    let mut v = Matrix::identity(n);

    let mut residual = off_diag_max(&a, n);
    let mut sweeps = 0;
    while residual > tol {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(GeomError::EigenNoConvergence { sweeps, residual });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = 0.5 * (a[q * n + q] - a[p * n + p]) / apq;
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                // A <- G^T A G with G the rotation in the (p,q) plane.
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = c * arp - sn * arq;
                    a[r * n + q] = sn * arp + c * arq;
                }
                for col in 0..n {
                    let apc = a[p * n + col];
                    let aqc = a[q * n + col];
                    a[p * n + col] = c * apc - sn * aqc;
                    a[q * n + col] = sn * apc + c * aqc;
                }
                for r in 0..n {
                    let vrp = v.get(r, p);
                    let vrq = v.get(r, q);
                    v.set(r, p, c * vrp - sn * vrq);
                    v.set(r, q, sn * vrp + c * vrq);
                }
            }
        }
        sweeps += 1;
        residual = off_diag_max(&a, n);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].partial_cmp(&a[j * n + j]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let eigenvectors = Matrix::from_fn(n, |r, c| v.get(r, order[c]));
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        residual,
    })
}
