//! Curvature-building operators and contractions.

use super::{Bilinear, Matrix, QuadTensor, Vector};
use crate::error::{GeomError, Result};
use crate::tolerances::{DEPENDENCE_THRESHOLD, STRUCTURE_TOL};

fn check_dims(g: &Bilinear, q: &Bilinear) -> Result<usize> {
    if g.dim() != q.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: g.dim(),
            found: q.dim(),
        });
    }
    Ok(g.dim())
}

/// phi(Q)(x,y,z,u) = g(x,u)Q(y,z) - g(x,z)Q(y,u) + g(y,z)Q(x,u) - g(y,u)Q(x,z).
///
/// The output carries the curvature-like flag (Q is symmetric by type).
pub fn phi(g: &Bilinear, q: &Bilinear) -> Result<QuadTensor> {
    let n = check_dims(g, q)?;
    let mut out = QuadTensor::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let v = g.get(a, d) * q.get(b, c) - g.get(a, c) * q.get(b, d)
                        + g.get(b, c) * q.get(a, d)
                        - g.get(b, d) * q.get(a, c);
                    out.set(a, b, c, d, v);
                }
            }
        }
    }
    out.into_curvature_like(STRUCTURE_TOL)
}

/// Six-term companion of [`phi`]:
///
/// psi(Q)(x,y,z,u) = g(x,Ju)Q(y,Jz) - g(x,Jz)Q(y,Ju) - 2g(x,Jy)Q(z,Ju)
///                 + g(y,Jz)Q(x,Ju) - g(y,Ju)Q(x,Jz) - 2g(z,Ju)Q(x,Jy).
///
/// The output is flagged curvature-like only when Q is J-invariant
/// (Q(Jx,Jy) = Q(x,y)); otherwise the raw entries are returned unflagged.
pub fn psi(g: &Bilinear, j: &Matrix, q: &Bilinear) -> Result<QuadTensor> {
    let n = check_dims(g, q)?;
    if j.dim() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            found: j.dim(),
        });
    }
    // gj[a][b] = g(e_a, J e_b), qj[a][b] = Q(e_a, J e_b)
    let gj = Matrix::from_fn(n, |a, b| (0..n).map(|r| g.get(a, r) * j.get(r, b)).sum());
    let qj = Matrix::from_fn(n, |a, b| (0..n).map(|r| q.get(a, r) * j.get(r, b)).sum());

    let mut out = QuadTensor::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let v = gj.get(a, d) * qj.get(b, c)
                        - gj.get(a, c) * qj.get(b, d)
                        - 2.0 * gj.get(a, b) * qj.get(c, d)
                        + gj.get(b, c) * qj.get(a, d)
                        - gj.get(b, d) * qj.get(a, c)
                        - 2.0 * gj.get(c, d) * qj.get(a, b);
                    out.set(a, b, c, d, v);
                }
            }
        }
    }

    // J-invariance of Q decides whether the six-term sum closes up to a
    // curvature tensor.
    let mut inv_defect: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let mut qjj = 0.0;
            for p in 0..n {
                let jpa = j.get(p, a);
                if jpa == 0.0 {
                    continue;
                }
                for r in 0..n {
                    qjj += jpa * q.get(p, r) * j.get(r, b);
                }
            }
            inv_defect = inv_defect.max((qjj - q.get(a, b)).abs());
        }
    }
    let scale = q.data().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if inv_defect <= STRUCTURE_TOL * scale.max(1.0) {
        out.into_curvature_like(STRUCTURE_TOL)
    } else {
        Ok(out)
    }
}

/// Ricci contraction S(y,z) = sum_a R(eps_a, y, z, eps_a) over a g-orthonormal
/// basis, realized as the slot-(1,4) contraction with the inverse metric.
/// The result is symmetrized at construction.
pub fn ricci(r: &QuadTensor, g: &Bilinear) -> Result<Bilinear> {
    if !r.is_curvature_like() {
        return Err(GeomError::NotFlaggedCurvatureLike);
    }
    let n = r.dim();
    if g.dim() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            found: g.dim(),
        });
    }
    let ginv = g.inverse(1e-12)?;
    let mut raw = vec![0.0; n * n];
    for b in 0..n {
        for c in 0..n {
            let mut s = 0.0;
            for a in 0..n {
                for d in 0..n {
                    let w = ginv.get(a, d);
                    if w == 0.0 {
                        continue;
                    }
                    s += w * r.get(a, b, c, d);
                }
            }
            raw[b * n + c] = s;
        }
    }
    Ok(Bilinear::symmetrized(n, &raw))
}

/// Scalar curvature tau = sum_a S(eps_a, eps_a) over a g-orthonormal basis.
pub fn scalar_curvature(s: &Bilinear, g: &Bilinear) -> Result<f64> {
    let n = s.dim();
    if g.dim() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            found: g.dim(),
        });
    }
    let ginv = g.inverse(1e-12)?;
    let mut tau = 0.0;
    for a in 0..n {
        for b in 0..n {
            tau += ginv.get(a, b) * s.get(a, b);
        }
    }
    Ok(tau)
}

/// Stabilized Gram-Schmidt with one re-orthogonalization pass. Rejects the
/// input when a vector loses more than a factor of `DEPENDENCE_THRESHOLD`
/// of its g-norm to the preceding ones.
pub fn gram_schmidt(g: &Bilinear, basis: &[Vector]) -> Result<Vec<Vector>> {
    let mut out: Vec<Vector> = Vec::with_capacity(basis.len());
    for (index, v) in basis.iter().enumerate() {
        if v.dim() != g.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: g.dim(),
                found: v.dim(),
            });
        }
        let original = g.eval(v, v).sqrt();
        if original == 0.0 {
            return Err(GeomError::LinearlyDependent {
                index,
                ratio: 0.0,
                threshold: DEPENDENCE_THRESHOLD,
            });
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let proj = g.eval(&w, u);
                w.add_scaled(-proj, u);
            }
        }
        let norm = g.eval(&w, &w).sqrt();
        let ratio = norm / original;
        if ratio < DEPENDENCE_THRESHOLD {
            return Err(GeomError::LinearlyDependent {
                index,
                ratio,
                threshold: DEPENDENCE_THRESHOLD,
            });
        }
        out.push(w.scale(1.0 / norm));
    }
    Ok(out)
}
