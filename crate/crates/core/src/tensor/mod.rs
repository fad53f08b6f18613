//! Dense multilinear algebra at a single tangent space.
//!
//! Everything is a flat `Vec<f64>` indexed row-major by slot order. The types
//! are small (dimension at most [`crate::tolerances::MAX_DIM`]) and immutable
//! after construction, so they can be shared and sent between threads freely.

mod eigen;
mod ops;

pub use eigen::{sym_eigen, Spectrum};
pub use ops::{gram_schmidt, phi, psi, ricci, scalar_curvature};

use crate::error::{GeomError, Result};
use crate::tolerances::STRUCTURE_TOL;

/// Max-abs entry; the norm behind every "approximately zero" check.
pub trait DefectNorm {
    fn defect_norm(&self) -> f64;
}

impl DefectNorm for [f64] {
    fn defect_norm(&self) -> f64 {
        self.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl DefectNorm for Vec<f64> {
    fn defect_norm(&self) -> f64 {
        self.as_slice().defect_norm()
    }
}

/// A vector of a d-dimensional real space (ambient d = 2n or intrinsic d = n).
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    components: Vec<f64>,
}

impl Vector {
    pub fn new(components: Vec<f64>) -> Self {
        Vector { components }
    }

    pub fn zeros(dim: usize) -> Self {
        Vector {
            components: vec![0.0; dim],
        }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[index] = 1.0;
        Vector { components: v }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.components
    }

    pub fn get(&self, i: usize) -> f64 {
        self.components[i]
    }

    /// Euclidean dot product (metric-aware pairings go through [`Bilinear::eval`]).
    pub fn dot(&self, other: &Vector) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scale(&self, t: f64) -> Vector {
        Vector {
            components: self.components.iter().map(|x| t * x).collect(),
        }
    }

    pub fn add_scaled(&mut self, t: f64, other: &Vector) {
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            *a += t * b;
        }
    }
}

impl DefectNorm for Vector {
    fn defect_norm(&self) -> f64 {
        self.components.defect_norm()
    }
}

/// Square matrix, row-major. Used for operators (J, F, shape operators,
/// eigenvector frames), not for bilinear forms.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = f(r, c);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn col(&self, c: usize) -> Vec<f64> {
        (0..self.dim).map(|r| self.get(r, c)).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == 0.0 {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for r in 0..n {
            let mut s = 0.0;
            for c in 0..n {
                s += self.data[r * n + c] * v[c];
            }
            out[r] = s;
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.dim, |r, c| self.get(c, r))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, t: f64) -> Matrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= t;
        }
        out
    }

    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }
}

impl DefectNorm for Matrix {
    fn defect_norm(&self) -> f64 {
        self.data.defect_norm()
    }
}

/// Symmetric bilinear form (metric, Ricci tensor, ...). Constructors enforce
/// entries[a][b] == entries[b][a] to exact storage equality.
#[derive(Clone, Debug, PartialEq)]
pub struct Bilinear {
    dim: usize,
    data: Vec<f64>,
}

impl Bilinear {
    pub fn zeros(dim: usize) -> Self {
        Bilinear {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut b = Bilinear::zeros(dim);
        for i in 0..dim {
            b.data[i * dim + i] = 1.0;
        }
        b
    }

    /// Builds from `f` evaluated only on pairs a <= b, mirroring the value so
    /// symmetry holds to storage equality.
    pub fn from_fn_symmetric(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut b = Bilinear::zeros(dim);
        for a in 0..dim {
            for c in a..dim {
                let v = f(a, c);
                b.data[a * dim + c] = v;
                b.data[c * dim + a] = v;
            }
        }
        b
    }

    /// Accepts a full row-major array and rejects it if it is not exactly
    /// symmetric in storage.
    pub fn from_data_symmetric(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(GeomError::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        let mut defect: f64 = 0.0;
        for a in 0..dim {
            for c in 0..dim {
                defect = defect.max((data[a * dim + c] - data[c * dim + a]).abs());
            }
        }
        if defect > 0.0 {
            return Err(GeomError::NotSymmetric { defect });
        }
        Ok(Bilinear { dim, data })
    }

    /// Symmetrizes an arbitrary square array by averaging.
    pub fn symmetrized(dim: usize, data: &[f64]) -> Self {
        Bilinear::from_fn_symmetric(dim, |a, c| 0.5 * (data[a * dim + c] + data[c * dim + a]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.dim + b]
    }

    pub fn set_sym(&mut self, a: usize, b: usize, v: f64) {
        self.data[a * self.dim + b] = v;
        self.data[b * self.dim + a] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn eval(&self, x: &Vector, y: &Vector) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for a in 0..n {
            let xa = x.get(a);
            if xa == 0.0 {
                continue;
            }
            for b in 0..n {
                s += xa * self.data[a * n + b] * y.get(b);
            }
        }
        s
    }

    pub fn is_identity(&self) -> bool {
        let n = self.dim;
        for a in 0..n {
            for b in 0..n {
                let want = if a == b { 1.0 } else { 0.0 };
                if self.data[a * n + b] != want {
                    return false;
                }
            }
        }
        true
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn add_scaled(&self, t: f64, other: &Bilinear) -> Bilinear {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += t * b;
        }
        out
    }

    pub fn scale(&self, t: f64) -> Bilinear {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= t;
        }
        out
    }

    /// Checks positive definiteness through the spectrum.
    pub fn validate_metric(&self, tol: f64) -> Result<()> {
        let spec = sym_eigen(self, tol.min(1e-12))?;
        let min = spec.eigenvalues[0];
        if min <= tol {
            return Err(GeomError::NotPositiveDefinite {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }

    /// Inverse through the Jacobi spectrum; exact for the identity metric.
    pub fn inverse(&self, tol: f64) -> Result<Bilinear> {
        if self.is_identity() {
            return Ok(self.clone());
        }
        let spec = sym_eigen(self, tol)?;
        let min = spec.eigenvalues[0];
        if min <= 1e-14 {
            return Err(GeomError::NotPositiveDefinite {
                min_eigenvalue: min,
            });
        }
        let n = self.dim;
        let e = &spec.eigenvectors;
        Ok(Bilinear::from_fn_symmetric(n, |a, b| {
            (0..n)
                .map(|i| e.get(a, i) * e.get(b, i) / spec.eigenvalues[i])
                .sum()
        }))
    }
}

impl DefectNorm for Bilinear {
    fn defect_norm(&self) -> f64 {
        self.data.defect_norm()
    }
}

/// Symmetry defects of a rank-4 tensor, relative to its max-abs entry.
#[derive(Clone, Copy, Debug)]
pub struct CurvatureDefects {
    pub antisym_12: f64,
    pub antisym_34: f64,
    pub pair_swap: f64,
    pub bianchi: f64,
    pub scale: f64,
}

impl CurvatureDefects {
    pub fn max(&self) -> f64 {
        self.antisym_12
            .max(self.antisym_34)
            .max(self.pair_swap)
            .max(self.bianchi)
    }

    fn worst(&self) -> (&'static str, f64) {
        let mut worst = ("antisymmetry in slots (1,2)", self.antisym_12);
        for cand in [
            ("antisymmetry in slots (3,4)", self.antisym_34),
            ("pair-swap symmetry", self.pair_swap),
            ("first Bianchi identity", self.bianchi),
        ] {
            if cand.1 > worst.1 {
                worst = cand;
            }
        }
        worst
    }
}

/// Dense rank-4 tensor. Carries a `curvature_like` flag set by constructors
/// that validated the Riemann symmetries.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadTensor {
    dim: usize,
    data: Vec<f64>,
    curvature_like: bool,
}

impl QuadTensor {
    pub fn zeros(dim: usize) -> Self {
        QuadTensor {
            dim,
            data: vec![0.0; dim * dim * dim * dim],
            curvature_like: true,
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = QuadTensor::zeros(dim);
        t.curvature_like = false;
        let mut idx = 0;
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for d in 0..dim {
                        t.data[idx] = f(a, b, c, d);
                        idx += 1;
                    }
                }
            }
        }
        t
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.dim + b) * self.dim + c) * self.dim + d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[self.idx(a, b, c, d)]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        let i = self.idx(a, b, c, d);
        self.data[i] = v;
        self.curvature_like = false;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_curvature_like(&self) -> bool {
        self.curvature_like
    }

    pub fn max_abs(&self) -> f64 {
        self.data.defect_norm()
    }

    pub fn scale(&self, t: f64) -> QuadTensor {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= t;
        }
        out
    }

    pub fn add_scaled(&self, t: f64, other: &QuadTensor) -> QuadTensor {
        let mut out = self.clone();
        out.curvature_like = self.curvature_like && other.curvature_like;
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += t * b;
        }
        out
    }

    pub fn sub(&self, other: &QuadTensor) -> QuadTensor {
        self.add_scaled(-1.0, other)
    }

    /// Multilinear evaluation on arbitrary vectors.
    pub fn eval(&self, x: &Vector, y: &Vector, z: &Vector, u: &Vector) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for a in 0..n {
            let xa = x.get(a);
            if xa == 0.0 {
                continue;
            }
            for b in 0..n {
                let xy = xa * y.get(b);
                if xy == 0.0 {
                    continue;
                }
                for c in 0..n {
                    let xyz = xy * z.get(c);
                    if xyz == 0.0 {
                        continue;
                    }
                    for d in 0..n {
                        s += xyz * u.get(d) * self.data[self.idx(a, b, c, d)];
                    }
                }
            }
        }
        s
    }

    /// Restriction to a frame of `m` vectors: out[i,j,k,l] = T(f_i,f_j,f_k,f_l),
    /// computed by contracting one slot at a time.
    pub fn pullback(&self, frame: &[Vector]) -> Result<QuadTensor> {
        let d = self.dim;
        let m = frame.len();
        for f in frame {
            if f.dim() != d {
                return Err(GeomError::DimensionMismatch {
                    expected: d,
                    found: f.dim(),
                });
            }
        }
        // slot 1
        let mut t1 = vec![0.0; m * d * d * d];
        for i in 0..m {
            for a in 0..d {
                let fa = frame[i].get(a);
                if fa == 0.0 {
                    continue;
                }
                let src = a * d * d * d;
                let dst = i * d * d * d;
                for r in 0..d * d * d {
                    t1[dst + r] += fa * self.data[src + r];
                }
            }
        }
        // slot 2
        let mut t2 = vec![0.0; m * m * d * d];
        for i in 0..m {
            for j in 0..m {
                for b in 0..d {
                    let fb = frame[j].get(b);
                    if fb == 0.0 {
                        continue;
                    }
                    let src = (i * d + b) * d * d;
                    let dst = (i * m + j) * d * d;
                    for r in 0..d * d {
                        t2[dst + r] += fb * t1[src + r];
                    }
                }
            }
        }
        // slot 3
        let mut t3 = vec![0.0; m * m * m * d];
        for ij in 0..m * m {
            for k in 0..m {
                for c in 0..d {
                    let fc = frame[k].get(c);
                    if fc == 0.0 {
                        continue;
                    }
                    let src = (ij * d + c) * d;
                    let dst = (ij * m + k) * d;
                    for r in 0..d {
                        t3[dst + r] += fc * t2[src + r];
                    }
                }
            }
        }
        // slot 4
        let mut out = QuadTensor::zeros(m);
        out.curvature_like = false;
        for ijk in 0..m * m * m {
            for l in 0..m {
                let mut s = 0.0;
                for e in 0..d {
                    s += frame[l].get(e) * t3[ijk * d + e];
                }
                out.data[ijk * m + l] = s;
            }
        }
        Ok(out)
    }

    /// Measures the four curvature symmetries, each relative to the max-abs
    /// entry. The denominator is floored at 1 so a numerically-zero tensor
    /// (pure cancellation noise) validates as the zero tensor.
    pub fn curvature_defects(&self) -> CurvatureDefects {
        let n = self.dim;
        let scale = self.max_abs();
        let denom = scale.max(1.0);
        let mut d12: f64 = 0.0;
        let mut d34: f64 = 0.0;
        let mut dps: f64 = 0.0;
        let mut dbi: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let v = self.get(a, b, c, d);
                        d12 = d12.max((v + self.get(b, a, c, d)).abs());
                        d34 = d34.max((v + self.get(a, b, d, c)).abs());
                        dps = dps.max((v - self.get(c, d, a, b)).abs());
                        dbi = dbi.max((v + self.get(b, c, a, d) + self.get(c, a, b, d)).abs());
                    }
                }
            }
        }
        CurvatureDefects {
            antisym_12: d12 / denom,
            antisym_34: d34 / denom,
            pair_swap: dps / denom,
            bianchi: dbi / denom,
            scale,
        }
    }

    /// Validates the Riemann symmetries and sets the curvature-like flag.
    pub fn into_curvature_like(mut self, tol: f64) -> Result<QuadTensor> {
        let defects = self.curvature_defects();
        let (check, defect) = defects.worst();
        if defect > tol {
            return Err(GeomError::NotCurvatureLike { check, defect, tol });
        }
        self.curvature_like = true;
        Ok(self)
    }

    /// Max |T(a,b,c,d) - T(a,b,Jc,Jd)| relative to the max-abs entry
    /// (denominator floored at 1, as in [`Self::curvature_defects`]).
    pub fn kaehler_symmetry_defect(&self, j: &Matrix) -> f64 {
        let n = self.dim;
        let scale = self.max_abs();
        let denom = scale.max(1.0);
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        // T(a,b,Jc,Jd) = sum_{p,q} T(a,b,p,q) J[p][c] J[q][d]
                        let mut s = 0.0;
                        for p in 0..n {
                            let jpc = j.get(p, c);
                            if jpc == 0.0 {
                                continue;
                            }
                            for q in 0..n {
                                s += self.get(a, b, p, q) * jpc * j.get(q, d);
                            }
                        }
                        worst = worst.max((self.get(a, b, c, d) - s).abs());
                    }
                }
            }
        }
        worst / denom
    }
}

impl DefectNorm for QuadTensor {
    fn defect_norm(&self) -> f64 {
        self.data.defect_norm()
    }
}

/// Fully symmetric cubic array h[k][i][j]; storage keeps all six permutations
/// exactly equal.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricCubic {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricCubic {
    pub fn zeros(dim: usize) -> Self {
        SymmetricCubic {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    #[inline]
    fn idx(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.dim + i) * self.dim + j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[self.idx(k, i, j)]
    }

    /// Writes the whole permutation orbit of (k,i,j).
    pub fn set_orbit(&mut self, k: usize, i: usize, j: usize, v: f64) {
        for (a, b, c) in [
            (k, i, j),
            (k, j, i),
            (i, k, j),
            (i, j, k),
            (j, k, i),
            (j, i, k),
        ] {
            let idx = self.idx(a, b, c);
            self.data[idx] = v;
        }
    }

    /// Builds from sparse entries, closing each under index permutation.
    /// Entries naming the same orbit must agree exactly.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut cubic = SymmetricCubic::zeros(dim);
        let mut seen = vec![false; dim * dim * dim];
        for &(k, i, j, v) in entries {
            for idx in [k, i, j] {
                if idx >= dim {
                    return Err(GeomError::IndexOutOfRange { index: idx, dim });
                }
            }
            let mut key = [k, i, j];
            key.sort_unstable();
            let flat = (key[0] * dim + key[1]) * dim + key[2];
            if seen[flat] {
                let existing = cubic.get(k, i, j);
                if existing != v {
                    return Err(GeomError::CubicConflict {
                        k,
                        i,
                        j,
                        existing,
                        new: v,
                    });
                }
                continue;
            }
            seen[flat] = true;
            cubic.set_orbit(k, i, j, v);
        }
        Ok(cubic)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn scale(&self, t: f64) -> SymmetricCubic {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= t;
        }
        out
    }

    /// trace_k = sum_i h[k][i][i].
    pub fn trace_vector(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|k| (0..self.dim).map(|i| self.get(k, i, i)).sum())
            .collect()
    }

    /// Shape operator for the k-th normal direction: (A_k)[i][j] = h[k][i][j].
    pub fn shape_operator(&self, k: usize) -> Matrix {
        Matrix::from_fn(self.dim, |i, j| self.get(k, i, j))
    }

    /// Conjugates all three slots by the columns of `e` (a rotation of the frame).
    pub fn rotate(&self, e: &Matrix) -> SymmetricCubic {
        let n = self.dim;
        let mut out = SymmetricCubic::zeros(n);
        for c in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        let ekc = e.get(k, c);
                        if ekc == 0.0 {
                            continue;
                        }
                        for i in 0..n {
                            let eia = e.get(i, a);
                            if eia == 0.0 {
                                continue;
                            }
                            for j in 0..n {
                                s += ekc * eia * e.get(j, b) * self.get(k, i, j);
                            }
                        }
                    }
                    let idx = out.idx(c, a, b);
                    out.data[idx] = s;
                }
            }
        }
        out
    }
}

impl DefectNorm for SymmetricCubic {
    fn defect_norm(&self) -> f64 {
        self.data.defect_norm()
    }
}

/// Builds a rank-4 tensor from sparse entries, closing each under the
/// curvature symmetry group (signed swaps of both slot pairs and the pair
/// exchange). Conflicting duplicates are rejected; the first Bianchi identity
/// is *not* implied by closure and is checked afterwards.
pub fn curvature_from_entries(
    dim: usize,
    entries: &[(usize, usize, usize, usize, f64)],
    tol: f64,
) -> Result<QuadTensor> {
    let mut t = QuadTensor::zeros(dim);
    t.curvature_like = false;
    let mut set = vec![false; dim * dim * dim * dim];
    for &(a, b, c, d, v) in entries {
        for idx in [a, b, c, d] {
            if idx >= dim {
                return Err(GeomError::IndexOutOfRange { index: idx, dim });
            }
        }
        let orbit = [
            (a, b, c, d, v),
            (b, a, c, d, -v),
            (a, b, d, c, -v),
            (b, a, d, c, v),
            (c, d, a, b, v),
            (d, c, a, b, -v),
            (c, d, b, a, -v),
            (d, c, b, a, v),
        ];
        for (p, q, r, s, w) in orbit {
            let flat = ((p * dim + q) * dim + r) * dim + s;
            if set[flat] {
                if t.data[flat] != w {
                    return Err(GeomError::CurvatureConflict {
                        a: p,
                        b: q,
                        c: r,
                        d: s,
                        existing: t.data[flat],
                        new: w,
                    });
                }
            } else {
                set[flat] = true;
                t.data[flat] = w;
            }
        }
    }
    t.into_curvature_like(tol)
}

/// Canonical nonzero representatives (a<b, c<d, (a,b) <= (c,d)) of a
/// curvature-like tensor; inverse of [`curvature_from_entries`].
pub fn curvature_entries(t: &QuadTensor) -> Vec<(usize, usize, usize, usize, f64)> {
    let n = t.dim();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in 0..n {
                for d in c + 1..n {
                    if (c, d) < (a, b) {
                        continue;
                    }
                    let v = t.get(a, b, c, d);
                    if v != 0.0 {
                        out.push((a, b, c, d, v));
                    }
                }
            }
        }
    }
    out
}

/// Relative Kaehler-symmetry tolerance shared by ambient validators.
pub fn structure_tol() -> f64 {
    STRUCTURE_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::AmbientSpace;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn standard(n: usize) -> AmbientSpace {
        AmbientSpace::standard(n).unwrap()
    }

    #[test]
    fn phi_of_zero_is_zero() {
        let g = Bilinear::identity(4);
        let out = phi(&g, &Bilinear::zeros(4)).unwrap();
        assert_eq!(out.defect_norm(), 0.0);
        assert!(out.is_curvature_like());
    }

    #[test]
    fn phi_identity_metric_example() {
        let g = Bilinear::identity(4);
        let out = phi(&g, &g).unwrap();
        assert_eq!(out.get(0, 1, 1, 0), 2.0);
        assert_eq!(out.defect_norm(), 2.0);
    }

    #[test]
    fn phi_vanishes_on_repeated_first_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Bilinear::identity(5);
        let q = Bilinear::from_fn_symmetric(5, |_, _| rng.gen_range(-1.0..1.0));
        let out = phi(&g, &q).unwrap();
        let x = Vector::new((0..5).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let z = Vector::new((0..5).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let u = Vector::new((0..5).map(|_| rng.gen_range(-1.0..1.0)).collect());
        assert!(out.eval(&x, &x, &z, &u).abs() < 1e-14);
    }

    #[test]
    fn phi_rejects_dimension_mismatch() {
        let g = Bilinear::identity(4);
        let q = Bilinear::identity(6);
        assert!(matches!(
            phi(&g, &q),
            Err(GeomError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn psi_examples_on_the_standard_space() {
        let space = standard(2);
        let g = space.metric();
        let j = space.complex_structure();
        let zero = psi(g, j, &Bilinear::zeros(4)).unwrap();
        assert_eq!(zero.defect_norm(), 0.0);
        let out = psi(g, j, g).unwrap();
        // e_0, e_1 span a totally real plane: J e_0 = e_2 is orthogonal to it.
        assert_eq!(out.get(0, 1, 1, 0), 0.0);
        // J e_0 = e_2.
        assert_eq!(out.get(0, 2, 2, 0), 6.0);
        assert!(out.is_curvature_like());
    }

    #[test]
    fn psi_without_j_invariance_is_unflagged() {
        let space = standard(2);
        let mut q = Bilinear::zeros(4);
        q.set_sym(0, 0, 1.0); // not J-invariant: Q(Je_0, Je_0) = Q(e_2, e_2) = 0
        let out = psi(space.metric(), space.complex_structure(), &q).unwrap();
        assert!(!out.is_curvature_like());
    }

    fn constant_curvature(d: usize, c: f64) -> QuadTensor {
        let id = Bilinear::identity(d);
        phi(&id, &id).unwrap().scale(c / 2.0)
    }

    #[test]
    fn ricci_of_zero_is_zero() {
        let g = Bilinear::identity(4);
        let s = ricci(&QuadTensor::zeros(4), &g).unwrap();
        assert_eq!(s.defect_norm(), 0.0);
    }

    #[test]
    fn ricci_of_constant_curvature_matches_loop_oracle() {
        let d = 5;
        let c = 1.75;
        let r = constant_curvature(d, c);
        let g = Bilinear::identity(d);
        let s = ricci(&r, &g).unwrap();
        // independent contraction loop
        for b in 0..d {
            for cc in 0..d {
                let mut oracle = 0.0;
                for a in 0..d {
                    oracle += r.get(a, b, cc, a);
                }
                assert!((s.get(b, cc) - oracle).abs() < 1e-14);
                let want = if b == cc { c * (d as f64 - 1.0) } else { 0.0 };
                assert!((s.get(b, cc) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ricci_rejects_unvalidated_tensors() {
        let g = Bilinear::identity(3);
        let mut t = QuadTensor::zeros(3);
        t.set(0, 0, 0, 0, 1.0);
        assert!(matches!(
            ricci(&t, &g),
            Err(GeomError::NotFlaggedCurvatureLike)
        ));
    }

    #[test]
    fn ricci_of_the_two_factor_model_has_opposite_eigenvalues() {
        let kc = crate::ambient::direct_sum_curvature(2, 1, 1.0).unwrap();
        let spec = sym_eigen(kc.ricci(), 1e-12).unwrap();
        let want = [-1.0, -1.0, 1.0, 1.0];
        for (got, want) in spec.eigenvalues.iter().zip(want) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn scalar_curvature_examples() {
        let d = 6;
        let g = Bilinear::identity(d);
        assert_eq!(scalar_curvature(&Bilinear::zeros(d), &g).unwrap(), 0.0);
        assert_eq!(scalar_curvature(&g, &g).unwrap(), d as f64);
        let c = -0.5;
        let r = constant_curvature(d, c);
        let s = ricci(&r, &g).unwrap();
        let tau = scalar_curvature(&s, &g).unwrap();
        assert!((tau - c * (d * (d - 1)) as f64).abs() < 1e-12);
    }

    #[test]
    fn defect_norm_examples() {
        assert_eq!(QuadTensor::zeros(3).defect_norm(), 0.0);
        let mut t = QuadTensor::zeros(3);
        t.set(1, 2, 0, 1, -7.0);
        assert_eq!(t.defect_norm(), 7.0);
        let g = Bilinear::identity(4);
        assert_eq!(phi(&g, &g).unwrap().defect_norm(), 2.0);
    }

    #[test]
    fn cubic_orbit_closure_and_conflicts() {
        let h = SymmetricCubic::from_entries(3, &[(0, 1, 2, 4.0)]).unwrap();
        for (a, b, c) in [
            (0, 1, 2),
            (1, 0, 2),
            (2, 1, 0),
            (1, 2, 0),
            (2, 0, 1),
            (0, 2, 1),
        ] {
            assert_eq!(h.get(a, b, c), 4.0);
        }
        let err = SymmetricCubic::from_entries(3, &[(0, 1, 2, 4.0), (2, 1, 0, 5.0)]).unwrap_err();
        assert!(matches!(err, GeomError::CubicConflict { .. }));
        // agreeing duplicates are fine
        assert!(SymmetricCubic::from_entries(3, &[(0, 1, 2, 4.0), (2, 1, 0, 4.0)]).is_ok());
    }

    #[test]
    fn cubic_shape_operator_from_single_orbit() {
        let h = SymmetricCubic::from_entries(4, &[(0, 0, 0, 2.5)]).unwrap();
        let a0 = h.shape_operator(0);
        assert_eq!(a0.get(0, 0), 2.5);
        for i in 0..4 {
            for j in 0..4 {
                if (i, j) != (0, 0) {
                    assert_eq!(a0.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn gram_schmidt_orthonormalizes_and_rejects_dependence() {
        let g = Bilinear::identity(3);
        let basis = vec![
            Vector::new(vec![1.0, 1.0, 0.0]),
            Vector::new(vec![0.0, 1.0, 1.0]),
            Vector::new(vec![1.0, 0.0, 1.0]),
        ];
        let onb = gram_schmidt(&g, &basis).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g.eval(&onb[i], &onb[j]) - want).abs() < 1e-14);
            }
        }
        let dependent = vec![
            Vector::new(vec![1.0, 0.0, 0.0]),
            Vector::new(vec![1.0, 1e-12, 0.0]),
        ];
        assert!(matches!(
            gram_schmidt(&g, &dependent),
            Err(GeomError::LinearlyDependent { .. })
        ));
    }

    #[test]
    fn curvature_validator_rejects_broken_symmetries() {
        // valid orbit entry, then a Bianchi-violating tensor A(x,y)A(z,u)
        // with A = e0^e1 + e2^e3: all pair symmetries hold, Bianchi fails.
        let mut a = Matrix::zeros(4);
        a.set(0, 1, 1.0);
        a.set(1, 0, -1.0);
        a.set(2, 3, 1.0);
        a.set(3, 2, -1.0);
        let t = QuadTensor::from_fn(4, |x, y, z, u| a.get(x, y) * a.get(z, u));
        let err = t.into_curvature_like(1e-12).unwrap_err();
        match err {
            GeomError::NotCurvatureLike { check, .. } => {
                assert_eq!(check, "first Bianchi identity")
            }
            other => panic!("unexpected {other:?}"),
        }

        let mut broken = QuadTensor::zeros(3);
        broken.set(0, 1, 0, 1, 1.0); // no antisymmetric partner entries
        assert!(broken.into_curvature_like(1e-12).is_err());
    }

    #[test]
    fn curvature_entries_round_trip() {
        let kc = crate::ambient::direct_sum_curvature(3, 1, 1.25).unwrap();
        let entries = curvature_entries(kc.r());
        let quads: Vec<(usize, usize, usize, usize, f64)> = entries;
        let rebuilt = curvature_from_entries(6, &quads, 1e-12).unwrap();
        assert_eq!(rebuilt.sub(kc.r()).defect_norm(), 0.0);
    }

    #[test]
    fn curvature_from_entries_detects_conflicts() {
        let err =
            curvature_from_entries(4, &[(0, 1, 1, 0, 1.0), (0, 1, 0, 1, 1.0)], 1e-12).unwrap_err();
        assert!(matches!(err, GeomError::CurvatureConflict { .. }));
    }

    #[test]
    fn bilinear_constructors_enforce_symmetry() {
        let data = vec![1.0, 2.0, 3.0, 4.0];
        assert!(matches!(
            Bilinear::from_data_symmetric(2, data.clone()),
            Err(GeomError::NotSymmetric { .. })
        ));
        let s = Bilinear::symmetrized(2, &data);
        assert_eq!(s.get(0, 1), s.get(1, 0));
        assert_eq!(s.get(0, 1), 2.5);
    }

    #[test]
    fn metric_validation_flags_indefinite_forms() {
        let mut s = Bilinear::identity(3);
        s.set_sym(2, 2, -1.0);
        assert!(matches!(
            s.validate_metric(1e-12),
            Err(GeomError::NotPositiveDefinite { .. })
        ));
        assert!(Bilinear::identity(3).validate_metric(1e-12).is_ok());
    }

    #[test]
    fn cubic_rotation_preserves_full_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 4;
        let mut h = SymmetricCubic::zeros(n);
        for k in 0..n {
            for i in k..n {
                for j in i..n {
                    h.set_orbit(k, i, j, rng.gen_range(-1.0..1.0));
                }
            }
        }
        let s = Bilinear::from_fn_symmetric(n, |_, _| rng.gen_range(-1.0..1.0));
        let e = sym_eigen(&s, 1e-12).unwrap().eigenvectors;
        let rotated = h.rotate(&e);
        // full symmetry survives the rotation exactly in structure
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let v = rotated.get(k, i, j);
                    assert!((v - rotated.get(i, k, j)).abs() < 1e-13);
                    assert!((v - rotated.get(j, i, k)).abs() < 1e-13);
                }
            }
        }
    }
}
