//! A totally real submanifold point: orthonormal tangent frame, second
//! fundamental form data, the Gauss equation, Weyl tensor and the pointwise
//! defect measures (semiparallelism, mean-curvature semiparallelism,
//! commutativity, conformal flatness).
//!
//! All intrinsic tensors are expressed in frame coordinates, where the
//! induced metric is the identity.

use crate::ambient::KaehlerCurvature;
use crate::error::{GeomError, Result};
use crate::tensor::{
    phi, ricci, scalar_curvature, sym_eigen, Bilinear, DefectNorm, Matrix, QuadTensor, Spectrum,
    SymmetricCubic, Vector,
};
use crate::tolerances::{Tolerances, DUAL_PATH_TOL, FRAME_TOL, STRUCTURE_TOL};

/// Point data: ambient curvature, a g-orthonormal totally real tangent frame
/// e_1..e_n (J maps it into the normal space), and the fully symmetric cubic
/// h[k][i][j] = g(sigma(e_i, e_j), J e_k).
#[derive(Clone, Debug)]
pub struct SubmanifoldPoint {
    ambient: KaehlerCurvature,
    frame: Vec<Vector>,
    h: SymmetricCubic,
}

impl SubmanifoldPoint {
    pub fn new(ambient: KaehlerCurvature, frame: Vec<Vector>, h: SymmetricCubic) -> Result<Self> {
        let n = ambient.space().n();
        if n < 2 {
            return Err(GeomError::DimensionRange { n, max: 12 });
        }
        if frame.len() != n {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                found: frame.len(),
            });
        }
        if h.dim() != n {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                found: h.dim(),
            });
        }
        let g = ambient.space().metric();
        let d = 2 * n;
        for v in &frame {
            if v.dim() != d {
                return Err(GeomError::DimensionMismatch {
                    expected: d,
                    found: v.dim(),
                });
            }
        }
        let mut ortho: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                ortho = ortho.max((g.eval(&frame[i], &frame[j]) - want).abs());
            }
        }
        if ortho > FRAME_TOL {
            return Err(GeomError::FrameNotOrthonormal { defect: ortho });
        }
        let jfj: Vec<Vector> = frame.iter().map(|f| ambient.space().apply_j(f)).collect();
        let mut real: f64 = 0.0;
        for f in &frame {
            for jf in &jfj {
                real = real.max(g.eval(f, jf).abs());
            }
        }
        if real > FRAME_TOL {
            return Err(GeomError::FrameNotTotallyReal { defect: real });
        }
        Ok(SubmanifoldPoint { ambient, frame, h })
    }

    pub fn n(&self) -> usize {
        self.frame.len()
    }

    pub fn ambient(&self) -> &KaehlerCurvature {
        &self.ambient
    }

    pub fn frame(&self) -> &[Vector] {
        &self.frame
    }

    pub fn cubic(&self) -> &SymmetricCubic {
        &self.h
    }

    /// J e_k for each frame vector: the normal frame of the point.
    pub fn normal_frame(&self) -> Vec<Vector> {
        self.frame
            .iter()
            .map(|f| self.ambient.space().apply_j(f))
            .collect()
    }
}

/// Shape operators A_k per normal direction J e_k: (A_k)[i][j] = h[k][i][j].
pub fn shape_operators(p: &SubmanifoldPoint) -> Vec<Matrix> {
    (0..p.n()).map(|k| p.cubic().shape_operator(k)).collect()
}

/// Mean curvature vector H = (1/n) tr sigma and its tangent image JH.
#[derive(Clone, Debug)]
pub struct MeanCurvature {
    /// H as an ambient vector (normal to the frame).
    pub normal: Vector,
    /// Coordinates g(JH, e_l) of the tangent vector JH in the frame.
    pub jh_tangent: Vec<f64>,
    /// |H|; zero iff the point is minimal.
    pub length: f64,
}

pub fn mean_curvature(p: &SubmanifoldPoint) -> MeanCurvature {
    let n = p.n();
    let g = p.ambient().space().metric();
    let normal_frame = p.normal_frame();
    let traces = p.cubic().trace_vector();
    let mut h_amb = Vector::zeros(2 * n);
    for k in 0..n {
        h_amb.add_scaled(traces[k] / n as f64, &normal_frame[k]);
    }
    let jh = p.ambient().space().apply_j(&h_amb);
    let jh_tangent = (0..n).map(|l| g.eval(&jh, &p.frame()[l])).collect();
    let length = g.eval(&h_amb, &h_amb).sqrt();
    MeanCurvature {
        normal: h_amb,
        jh_tangent,
        length,
    }
}

/// Intrinsic invariants of the point: curvature, Ricci data, Weyl tensor
/// (n > 3 only), Ricci spectrum and mean curvature.
#[derive(Clone, Debug)]
pub struct IntrinsicGeometry {
    r: QuadTensor,
    s: Bilinear,
    tau: f64,
    weyl: Option<QuadTensor>,
    conformal_defect: Option<f64>,
    spectrum: Spectrum,
    mean: MeanCurvature,
}

impl IntrinsicGeometry {
    pub fn r(&self) -> &QuadTensor {
        &self.r
    }

    pub fn ricci(&self) -> &Bilinear {
        &self.s
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn weyl(&self) -> Option<&QuadTensor> {
        self.weyl.as_ref()
    }

    /// Max-abs entry of the Weyl tensor; `None` below dimension four.
    pub fn conformal_defect(&self) -> Option<f64> {
        self.conformal_defect
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn mean(&self) -> &MeanCurvature {
        &self.mean
    }

    pub fn n(&self) -> usize {
        self.r.dim()
    }
}

fn assemble(p: &SubmanifoldPoint, r: QuadTensor, tol: &Tolerances) -> Result<IntrinsicGeometry> {
    let n = p.n();
    let r = r.into_curvature_like(tol.internal)?;
    let id = Bilinear::identity(n);
    let s = ricci(&r, &id)?;
    let tau = scalar_curvature(&s, &id)?;
    let spectrum = sym_eigen(&s, tol.eigen)?;
    let (weyl, conformal_defect) = if n > 3 {
        let c = weyl_tensor(&r, &s, tau, tol.internal)?;
        let defect = c.defect_norm();
        (Some(c), Some(defect))
    } else {
        (None, None)
    };
    Ok(IntrinsicGeometry {
        r,
        s,
        tau,
        weyl,
        conformal_defect,
        spectrum,
        mean: mean_curvature(p),
    })
}

/// Gauss equation in frame coordinates:
///
/// R(e_i,e_j,e_k,e_l) = Rbar(e_i,e_j,e_k,e_l) + g([A_i, A_j] e_k, e_l)
///
/// with Rbar the ambient curvature restricted to the frame and A_i the shape
/// operator of J e_i.
pub fn gauss_intrinsic(p: &SubmanifoldPoint) -> Result<IntrinsicGeometry> {
    gauss_intrinsic_with(p, &Tolerances::default())
}

pub fn gauss_intrinsic_with(p: &SubmanifoldPoint, tol: &Tolerances) -> Result<IntrinsicGeometry> {
    assemble(p, gauss_curvature(p)?, tol)
}

/// The raw Gauss-equation curvature (staged-contraction pullback plus
/// commutator term), without the derived invariants.
pub fn gauss_curvature(p: &SubmanifoldPoint) -> Result<QuadTensor> {
    let n = p.n();
    let pulled = p.ambient().r().pullback(p.frame())?;
    let ops = shape_operators(p);
    let mut r = pulled;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let bracket = ops[i].commutator(&ops[j]);
            for k in 0..n {
                for l in 0..n {
                    let v = r.get(i, j, k, l) + bracket.get(l, k);
                    r.set(i, j, k, l, v);
                }
            }
        }
    }
    Ok(r)
}

/// Builds the intrinsic invariants from an explicitly supplied curvature
/// tensor, bypassing the Gauss equation (fixture mode).
pub fn intrinsic_from_fixture(
    p: &SubmanifoldPoint,
    r: QuadTensor,
    tol: &Tolerances,
) -> Result<IntrinsicGeometry> {
    if r.dim() != p.n() {
        return Err(GeomError::DimensionMismatch {
            expected: p.n(),
            found: r.dim(),
        });
    }
    assemble(p, r, tol)
}

/// Weyl conformal curvature tensor (frame coordinates, identity metric):
///
/// C = R - phi(S)/(n-2) + tau phi(g) / (2(n-1)(n-2)),  defined for n > 3.
pub fn weyl_of(r: &QuadTensor, s: &Bilinear, tau: f64) -> Result<QuadTensor> {
    let n = r.dim();
    if n <= 3 {
        return Err(GeomError::RequiresDimensionAboveThree {
            what: "Weyl tensor",
            n,
        });
    }
    let nf = n as f64;
    let id = Bilinear::identity(n);
    let c = r
        .add_scaled(-1.0 / (nf - 2.0), &phi(&id, s)?)
        .add_scaled(tau / (2.0 * (nf - 1.0) * (nf - 2.0)), &phi(&id, &id)?);
    c.into_curvature_like(STRUCTURE_TOL)
}

/// Normal-connection curvature acting on the normal vector J z through the
/// tangent curvature: returns J(R(e_i, e_j) z) as an ambient vector.
pub fn normal_curvature_action(
    p: &SubmanifoldPoint,
    geom: &IntrinsicGeometry,
    i: usize,
    j: usize,
    z: &[f64],
) -> Result<Vector> {
    let n = p.n();
    if i >= n || j >= n {
        return Err(GeomError::IndexOutOfRange {
            index: i.max(j),
            dim: n,
        });
    }
    if z.len() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            found: z.len(),
        });
    }
    let mut tangent = Vector::zeros(2 * n);
    for l in 0..n {
        let mut wl = 0.0;
        for k in 0..n {
            wl += geom.r().get(i, j, k, l) * z[k];
        }
        tangent.add_scaled(wl, &p.frame()[l]);
    }
    Ok(p.ambient().space().apply_j(&tangent))
}

/// The semiparallel defect along its two evaluation paths. Both express the
/// same condition and must agree to rounding.
#[derive(Clone, Copy, Debug)]
pub struct SemiparallelDefect {
    /// Max residual of R(X,Y) A_{JZ} U = A_{JZ} R(X,Y) U + A_{JU} R(X,Y) Z
    /// over all frame 4-tuples.
    pub via_operator_identity: f64,
    /// Max residual of Rbar(X,Y).sigma expanded through the normal-curvature
    /// identification, projected back onto the normal frame.
    pub via_normal_curvature: f64,
}

impl SemiparallelDefect {
    pub fn max(&self) -> f64 {
        self.via_operator_identity.max(self.via_normal_curvature)
    }
}

pub fn semiparallel_defect(
    p: &SubmanifoldPoint,
    geom: &IntrinsicGeometry,
) -> Result<SemiparallelDefect> {
    let n = p.n();
    let h = p.cubic();
    let ops = shape_operators(p);
    let r = geom.r();

    // Path 1: commutation with the shape operators, in frame coordinates.
    let mut d1: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let m = Matrix::from_fn(n, |l, k| r.get(i, j, k, l));
            for k in 0..n {
                for l in 0..n {
                    let ak_el = ops[k].col(l);
                    let t1 = m.mul_vec(&ak_el);
                    let t2 = ops[k].mul_vec(&m.col(l));
                    let t3 = ops[l].mul_vec(&m.col(k));
                    for pidx in 0..n {
                        d1 = d1.max((t1[pidx] - t2[pidx] - t3[pidx]).abs());
                    }
                }
            }
        }
    }

    // Path 2: Rbar.sigma expanded in the ambient space. sigma(e_a, e_b) is a
    // normal vector; the normal curvature acts on J-frame vectors through
    // the tangent curvature.
    let g = p.ambient().space().metric();
    let jf = p.normal_frame();
    let d2n = 2 * n;
    let mut sigma = vec![Vector::zeros(d2n); n * n];
    for a in 0..n {
        for b in 0..n {
            let mut v = Vector::zeros(d2n);
            for q in 0..n {
                v.add_scaled(h.get(q, a, b), &jf[q]);
            }
            sigma[a * n + b] = v;
        }
    }
    let mut d2: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            // jr[m] = J(R(e_i,e_j) e_m) in ambient coordinates
            let mut jr = Vec::with_capacity(n);
            for m in 0..n {
                jr.push(normal_curvature_action(p, geom, i, j, &unit(n, m))?);
            }
            for k in 0..n {
                for l in 0..n {
                    let mut res = Vector::zeros(d2n);
                    for m in 0..n {
                        res.add_scaled(h.get(m, k, l), &jr[m]);
                        res.add_scaled(-r.get(i, j, k, m), &sigma[m * n + l]);
                        res.add_scaled(-r.get(i, j, l, m), &sigma[k * n + m]);
                    }
                    for q in 0..n {
                        d2 = d2.max(g.eval(&res, &jf[q]).abs());
                    }
                }
            }
        }
    }

    let diff = (d1 - d2).abs();
    if diff > DUAL_PATH_TOL {
        return Err(GeomError::InternalConsistency {
            what: "semiparallel defect paths",
            difference: diff,
        });
    }
    Ok(SemiparallelDefect {
        via_operator_identity: d1,
        via_normal_curvature: d2,
    })
}

fn unit(n: usize, m: usize) -> Vec<f64> {
    let mut z = vec![0.0; n];
    z[m] = 1.0;
    z
}

/// Max over i < j of the components of R(e_i, e_j) JH; zero iff the mean
/// curvature vector is semiparallel at the point.
pub fn mean_curvature_semiparallel_defect(geom: &IntrinsicGeometry) -> f64 {
    let n = geom.n();
    let jh = &geom.mean().jh_tangent;
    let mut defect: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for l in 0..n {
                let mut wl = 0.0;
                for k in 0..n {
                    wl += geom.r().get(i, j, k, l) * jh[k];
                }
                defect = defect.max(wl.abs());
            }
        }
    }
    defect
}

/// Max over k < l of the commutator norm of the shape operators.
pub fn commutativity_defect(p: &SubmanifoldPoint) -> f64 {
    let ops = shape_operators(p);
    let n = p.n();
    let mut defect: f64 = 0.0;
    for k in 0..n {
        for l in k + 1..n {
            defect = defect.max(ops[k].commutator(&ops[l]).defect_norm());
        }
    }
    defect
}

/// Inverts the Weyl formula at C = 0: the unique conformally flat curvature
/// tensor with the given Ricci tensor (frame coordinates, n > 3).
pub fn conformally_flat_from_ricci(s: &Bilinear) -> Result<QuadTensor> {
    let n = s.dim();
    if n <= 3 {
        return Err(GeomError::RequiresDimensionAboveThree {
            what: "conformally flat reconstruction",
            n,
        });
    }
    let nf = n as f64;
    let id = Bilinear::identity(n);
    let tau = s.trace();
    let r = phi(&id, s)?
        .scale(1.0 / (nf - 2.0))
        .add_scaled(-tau / (2.0 * (nf - 1.0) * (nf - 2.0)), &phi(&id, &id)?);
    r.into_curvature_like(STRUCTURE_TOL)
}
