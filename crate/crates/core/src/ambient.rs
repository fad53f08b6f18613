//! Ambient Kaehler data: metric / complex-structure pairs, curvature models
//! for a product of two opposite-curvature factors, the constant holomorphic
//! sectional curvature specialization, and the Bochner tensor.

use crate::error::{GeomError, Result};
use crate::tensor::{
    phi, psi, ricci, scalar_curvature, Bilinear, DefectNorm, Matrix, QuadTensor, Vector,
};
use crate::tolerances::{MAX_DIM, STRUCTURE_TOL};

/// A 2n-dimensional real vector space with metric g and orthogonal complex
/// structure J (J^2 = -Id, g(Jx,Jy) = g(x,y)).
#[derive(Clone, Debug)]
pub struct AmbientSpace {
    n: usize,
    g: Bilinear,
    j: Matrix,
}

impl AmbientSpace {
    /// Standard space: g the identity on dimension 2n, J e_i = e_{n+i} and
    /// J e_{n+i} = -e_i. The invariants hold exactly.
    pub fn standard(n: usize) -> Result<Self> {
        if n < 1 || 2 * n > MAX_DIM {
            return Err(GeomError::DimensionRange {
                n,
                max: MAX_DIM / 2,
            });
        }
        let d = 2 * n;
        let j = Matrix::from_fn(d, |r, c| {
            if c < n && r == n + c {
                1.0
            } else if c >= n && r == c - n {
                -1.0
            } else {
                0.0
            }
        });
        Ok(AmbientSpace {
            n,
            g: Bilinear::identity(d),
            j,
        })
    }

    /// Validates a user-supplied pair: J∘J = -Id and g(Jx,Jy) = g(x,y), both
    /// within the structural tolerance, and g positive definite.
    pub fn new(n: usize, g: Bilinear, j: Matrix) -> Result<Self> {
        if n < 1 || 2 * n > MAX_DIM {
            return Err(GeomError::DimensionRange {
                n,
                max: MAX_DIM / 2,
            });
        }
        let d = 2 * n;
        if g.dim() != d || j.dim() != d {
            return Err(GeomError::DimensionMismatch {
                expected: d,
                found: g.dim().max(j.dim()),
            });
        }
        let jj = j.mul(&j);
        let mut defect: f64 = 0.0;
        for r in 0..d {
            for c in 0..d {
                let want = if r == c { -1.0 } else { 0.0 };
                defect = defect.max((jj.get(r, c) - want).abs());
            }
        }
        if defect > STRUCTURE_TOL {
            return Err(GeomError::BadComplexStructure {
                check: "J∘J = -Id",
                defect,
            });
        }
        // g(Je_a, Je_b) = g(e_a, e_b)
        let mut compat: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                let mut s = 0.0;
                for p in 0..d {
                    let jpa = j.get(p, a);
                    if jpa == 0.0 {
                        continue;
                    }
                    for q in 0..d {
                        s += jpa * g.get(p, q) * j.get(q, b);
                    }
                }
                compat = compat.max((s - g.get(a, b)).abs());
            }
        }
        if compat > STRUCTURE_TOL {
            return Err(GeomError::BadComplexStructure {
                check: "g(Jx,Jy) = g(x,y)",
                defect: compat,
            });
        }
        g.validate_metric(1e-12)?;
        Ok(AmbientSpace { n, g, j })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn metric(&self) -> &Bilinear {
        &self.g
    }

    pub fn complex_structure(&self) -> &Matrix {
        &self.j
    }

    /// J applied to an ambient vector.
    pub fn apply_j(&self, x: &Vector) -> Vector {
        Vector::new(self.j.mul_vec(x.as_slice()))
    }

    /// g(e_a, J e_b) as a matrix, the basic skew pairing of the space.
    pub fn g_j(&self) -> Matrix {
        let d = self.dim();
        Matrix::from_fn(d, |a, b| {
            (0..d).map(|r| self.g.get(a, r) * self.j.get(r, b)).sum()
        })
    }
}

/// Which sign the final mixed term of the ten-term product curvature bracket
/// carries. `Minus` fails the factor-sum cross-check and is retained only as
/// a negative control for the self-test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossTermSign {
    Plus,
    Minus,
}

/// Product of two opposite-curvature factors, described by the involution
/// F = pi_1 - pi_2 (difference of the factor projections).
#[derive(Clone, Debug)]
pub struct ProductModel {
    space: AmbientSpace,
    mu: f64,
    k: usize,
    f: Matrix,
}

impl ProductModel {
    /// Canonical block involution: +1 on the first factor's 2k directions
    /// (e_0..e_{k-1} and their J-images), -1 on the rest.
    pub fn new(n: usize, k: usize, mu: f64) -> Result<Self> {
        if k < 1 || k + 1 > n {
            return Err(GeomError::InvalidParameter {
                what: format!("factor dimension k = {k} must satisfy 1 <= k <= n-1 (n = {n})"),
            });
        }
        let space = AmbientSpace::standard(n)?;
        let f = canonical_involution(n, k);
        Self::with_involution(space, k, mu, f)
    }

    /// Single-factor limit (F = Id, k = n); used only for calibrating the
    /// curvature formula against the constant holomorphic sectional model.
    pub fn single_factor(n: usize, mu: f64) -> Result<Self> {
        let space = AmbientSpace::standard(n)?;
        let f = Matrix::identity(2 * n);
        Ok(ProductModel { space, mu, k: n, f })
    }

    /// Validates an explicit involution: F∘F = Id, g-symmetric, commuting
    /// with J, with a +1 eigenspace of dimension 2k.
    pub fn with_involution(space: AmbientSpace, k: usize, mu: f64, f: Matrix) -> Result<Self> {
        if mu == 0.0 {
            return Err(GeomError::InvalidParameter {
                what: "product model requires mu != 0".to_string(),
            });
        }
        let d = space.dim();
        if f.dim() != d {
            return Err(GeomError::DimensionMismatch {
                expected: d,
                found: f.dim(),
            });
        }
        let ff = f.mul(&f);
        let mut defect: f64 = 0.0;
        for r in 0..d {
            for c in 0..d {
                let want = if r == c { 1.0 } else { 0.0 };
                defect = defect.max((ff.get(r, c) - want).abs());
            }
        }
        if defect > STRUCTURE_TOL {
            return Err(GeomError::BadInvolution {
                check: "F∘F = Id",
                defect,
            });
        }
        // g(Fx, y) = g(x, Fy)
        let g = space.metric();
        let mut sym: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                let mut fg = 0.0;
                let mut gf = 0.0;
                for r in 0..d {
                    fg += f.get(r, a) * g.get(r, b);
                    gf += g.get(a, r) * f.get(r, b);
                }
                sym = sym.max((fg - gf).abs());
            }
        }
        if sym > STRUCTURE_TOL {
            return Err(GeomError::BadInvolution {
                check: "g-symmetry of F",
                defect: sym,
            });
        }
        let comm = f
            .mul(space.complex_structure())
            .sub(&space.complex_structure().mul(&f));
        if comm.defect_norm() > STRUCTURE_TOL {
            return Err(GeomError::BadInvolution {
                check: "[F, J] = 0",
                defect: comm.defect_norm(),
            });
        }
        // For an involution the +1 eigenspace dimension is (d + tr F) / 2.
        let trace: f64 = (0..d).map(|i| f.get(i, i)).sum();
        let want = 4.0 * k as f64 - d as f64;
        if (trace - want).abs() > 1e-8 {
            return Err(GeomError::BadInvolution {
                check: "+1 eigenspace dimension",
                defect: (trace - want).abs(),
            });
        }
        Ok(ProductModel { space, mu, k, f })
    }

    pub fn space(&self) -> &AmbientSpace {
        &self.space
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn involution(&self) -> &Matrix {
        &self.f
    }
}

fn canonical_involution(n: usize, k: usize) -> Matrix {
    Matrix::from_fn(2 * n, |r, c| {
        if r != c {
            0.0
        } else if (r < n && r < k) || (r >= n && r - n < k) {
            1.0
        } else {
            -1.0
        }
    })
}

/// Ambient curvature data: a curvature-like, Kaehler-symmetric tensor with
/// its Ricci contraction and scalar curvature.
#[derive(Clone, Debug)]
pub struct KaehlerCurvature {
    space: AmbientSpace,
    r: QuadTensor,
    ricci: Bilinear,
    tau: f64,
}

impl KaehlerCurvature {
    pub fn new(space: AmbientSpace, r: QuadTensor) -> Result<Self> {
        if r.dim() != space.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: space.dim(),
                found: r.dim(),
            });
        }
        let r = r.into_curvature_like(STRUCTURE_TOL)?;
        let kd = r.kaehler_symmetry_defect(space.complex_structure());
        if kd > STRUCTURE_TOL {
            return Err(GeomError::NotCurvatureLike {
                check: "Kaehler symmetry R(x,y,z,u) = R(x,y,Jz,Ju)",
                defect: kd,
                tol: STRUCTURE_TOL,
            });
        }
        let s = ricci(&r, space.metric())?;
        let tau = scalar_curvature(&s, space.metric())?;
        Ok(KaehlerCurvature {
            space,
            r,
            ricci: s,
            tau,
        })
    }

    pub fn flat(n: usize) -> Result<Self> {
        let space = AmbientSpace::standard(n)?;
        let d = space.dim();
        Ok(KaehlerCurvature {
            ricci: Bilinear::zeros(d),
            tau: 0.0,
            r: QuadTensor::zeros(d),
            space,
        })
    }

    /// Constant holomorphic sectional curvature mu on the standard space.
    pub fn constant_hsc(n: usize, mu: f64) -> Result<Self> {
        direct_sum_curvature(n, n, mu)
    }

    pub fn space(&self) -> &AmbientSpace {
        &self.space
    }

    pub fn r(&self) -> &QuadTensor {
        &self.r
    }

    pub fn ricci(&self) -> &Bilinear {
        &self.ricci
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Entry of the five-term constant holomorphic sectional curvature tensor:
///
/// R(x,y,z,u) = mu/4 [ g(x,u)g(y,z) - g(x,z)g(y,u)
///                   + g(Jx,u)g(Jy,z) - g(Jx,z)g(Jy,u) + 2 g(x,Jy) g(Jz,u) ]
fn constant_hsc_entry(
    g: &Bilinear,
    gj: &Matrix,
    mu: f64,
    a: usize,
    b: usize,
    c: usize,
    d: usize,
) -> f64 {
    // gj[p][q] = g(e_p, J e_q); g(J e_p, e_q) = -gj[p][q] = gj[q][p].
    mu / 4.0
        * (g.get(a, d) * g.get(b, c) - g.get(a, c) * g.get(b, d) + gj.get(d, a) * gj.get(c, b)
            - gj.get(c, a) * gj.get(d, b)
            + 2.0 * gj.get(a, b) * gj.get(d, c))
}

/// Block model for the product of factors with holomorphic sectional
/// curvatures mu (complex dimension k) and -mu (complex dimension n-k):
/// the five-term constant-curvature tensor on each factor, zero on mixed
/// slots. k = n is the single-factor calibration case.
///
/// This construction is the independent cross-check for
/// [`product_curvature`].
pub fn direct_sum_curvature(n: usize, k: usize, mu: f64) -> Result<KaehlerCurvature> {
    if k < 1 || k > n {
        return Err(GeomError::InvalidParameter {
            what: format!("factor dimension k = {k} must satisfy 1 <= k <= n (n = {n})"),
        });
    }
    let space = AmbientSpace::standard(n)?;
    let d = space.dim();
    let gj = space.g_j();
    let in_first = |idx: usize| (idx < n && idx < k) || (idx >= n && idx - n < k);
    let mut r = QuadTensor::zeros(d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    let members = [in_first(a), in_first(b), in_first(c), in_first(e)];
                    let v = if members.iter().all(|&m| m) {
                        constant_hsc_entry(space.metric(), &gj, mu, a, b, c, e)
                    } else if members.iter().all(|&m| !m) {
                        constant_hsc_entry(space.metric(), &gj, -mu, a, b, c, e)
                    } else {
                        0.0
                    };
                    if v != 0.0 {
                        r.set(a, b, c, e, v);
                    }
                }
            }
        }
    }
    KaehlerCurvature::new(space, r)
}

/// Raw entries of the ten-term product curvature bracket:
///
/// R(x,y,z,u) = mu/8 { g(Fx,u)g(y,z) - g(Fx,z)g(y,u)
///                   + g(x,u)g(Fy,z) - g(x,z)g(Fy,u)
///                   + g(Jx,u)g(JFy,z) - g(Jx,z)g(JFy,u)
///                   + g(JFx,u)g(Jy,z) - g(JFx,z)g(Jy,u)
///                   + 2 g(Fx,Jy) g(Jz,u) +/- 2 g(x,Jy) g(JFz,u) }
///
/// with the final sign given by `sign`. Only [`CrossTermSign::Plus`] agrees
/// with the factor-sum construction; `Minus` is the self-test's negative
/// control and is returned unvalidated.
pub fn product_curvature_tensor(model: &ProductModel, sign: CrossTermSign) -> QuadTensor {
    let space = model.space();
    let d = space.dim();
    let g = space.metric();
    let j = space.complex_structure();
    let f = model.involution();
    let jf = j.mul(f);

    let pair = |op: &Matrix, p: usize, q: usize| -> f64 {
        // g(Op e_p, e_q)
        (0..d).map(|r| op.get(r, p) * g.get(r, q)).sum()
    };
    let bf = Matrix::from_fn(d, |p, q| pair(f, p, q));
    let bj = Matrix::from_fn(d, |p, q| pair(j, p, q));
    let bjf = Matrix::from_fn(d, |p, q| pair(&jf, p, q));
    let s = match sign {
        CrossTermSign::Plus => 1.0,
        CrossTermSign::Minus => -1.0,
    };

    let mut r = QuadTensor::zeros(d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    // g(x, Jy) = g(Je_b, e_a) = bj[b][a]; g(Fx, Jy) = -g(JFx, y).
                    let v = model.mu() / 8.0
                        * (bf.get(a, e) * g.get(b, c) - bf.get(a, c) * g.get(b, e)
                            + g.get(a, e) * bf.get(b, c)
                            - g.get(a, c) * bf.get(b, e)
                            + bj.get(a, e) * bjf.get(b, c)
                            - bj.get(a, c) * bjf.get(b, e)
                            + bjf.get(a, e) * bj.get(b, c)
                            - bjf.get(a, c) * bj.get(b, e)
                            - 2.0 * bjf.get(a, b) * bj.get(c, e)
                            + s * 2.0 * bj.get(b, a) * bjf.get(c, e));
                    if v != 0.0 {
                        r.set(a, b, c, e, v);
                    }
                }
            }
        }
    }
    r
}

/// Validated product curvature with the correct cross-term sign.
pub fn product_curvature(model: &ProductModel) -> Result<KaehlerCurvature> {
    let r = product_curvature_tensor(model, CrossTermSign::Plus);
    KaehlerCurvature::new(model.space().clone(), r)
}

/// Bochner tensor of an ambient curvature (m is the complex dimension):
///
/// B = R - (phi+psi)(S) / (2(m+2)) + tau (phi+psi)(g) / (8(m+1)(m+2)).
///
/// The output is curvature-like, Kaehler-symmetric and Ricci-trace-free.
pub fn bochner(k: &KaehlerCurvature) -> Result<QuadTensor> {
    bochner_tensor(k.r(), k.space(), k.ricci(), k.tau())
}

/// Bochner formula applied to raw parts; reapplying it to a tensor whose
/// Ricci contraction vanishes returns the tensor unchanged.
pub fn bochner_tensor(
    r: &QuadTensor,
    space: &AmbientSpace,
    s: &Bilinear,
    tau: f64,
) -> Result<QuadTensor> {
    let m = space.n() as f64;
    let g = space.metric();
    let j = space.complex_structure();
    let corr_s = phi(g, s)?.add_scaled(1.0, &psi(g, j, s)?);
    let corr_g = phi(g, g)?.add_scaled(1.0, &psi(g, j, g)?);
    let b = r
        .add_scaled(-1.0 / (2.0 * (m + 2.0)), &corr_s)
        .add_scaled(tau / (8.0 * (m + 1.0) * (m + 2.0)), &corr_g);
    b.into_curvature_like(1e-10)
}

/// R(x, Jx, Jx, x) / g(x,x)^2 for a non-null vector x.
pub fn holomorphic_sectional(k: &KaehlerCurvature, x: &Vector) -> Result<f64> {
    let g = k.space().metric();
    let gx = g.eval(x, x);
    if gx == 0.0 {
        return Err(GeomError::ZeroVector {
            context: "holomorphic sectional curvature",
        });
    }
    let jx = k.space().apply_j(x);
    Ok(k.r().eval(x, &jx, &jx, x) / (gx * gx))
}
