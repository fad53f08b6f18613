//! Hypothesis gates, residual systems and classification verdicts for a
//! submanifold point, together with scenario resolution.

pub mod generators;

use std::collections::BTreeMap;

use crate::ambient::{product_curvature, KaehlerCurvature, ProductModel};
use crate::error::{GeomError, Result};
use crate::submanifold::{
    commutativity_defect, gauss_intrinsic_with, intrinsic_from_fixture,
    mean_curvature_semiparallel_defect, semiparallel_defect, IntrinsicGeometry, SubmanifoldPoint,
};
use crate::tensor::{curvature_from_entries, gram_schmidt, DefectNorm, SymmetricCubic, Vector};
use crate::tolerances::Tolerances;

/// Which semiparallelism hypothesis the intrinsic-structure classifier gates on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassifyMode {
    /// Mean curvature vector semiparallel, point not minimal.
    MeanCurvatureSemiparallel,
    /// Second fundamental form semiparallel, point not totally geodesic.
    Semiparallel,
}

impl ClassifyMode {
    pub fn label(&self) -> &'static str {
        match self {
            ClassifyMode::MeanCurvatureSemiparallel => "mc-semiparallel",
            ClassifyMode::Semiparallel => "semiparallel",
        }
    }
}

/// Classification outcome. Structure conclusions are pointwise-consistent
/// statements: they certify the linear-algebraic shadow of the corresponding
/// local structure, not its integration.
#[derive(Clone, Debug, PartialEq)]
pub enum Conclusion {
    Flat,
    ProductType { c: f64 },
    ProductSplit { c1: f64, c2: Option<f64>, k: usize },
    EinsteinZero,
    Indeterminate,
    HypothesisViolation,
}

impl Conclusion {
    pub fn label(&self) -> &'static str {
        match self {
            Conclusion::Flat => "FLAT",
            Conclusion::ProductType { .. } => "PRODUCT_TYPE",
            Conclusion::ProductSplit { .. } => "PRODUCT_SPLIT",
            Conclusion::EinsteinZero => "EINSTEIN_ZERO",
            Conclusion::Indeterminate => "INDETERMINATE",
            Conclusion::HypothesisViolation => "HYPOTHESIS_VIOLATION",
        }
    }
}

/// A measured condition gate: `holds` iff `defect` is at or below the
/// configured tolerance.
#[derive(Clone, Copy, Debug)]
pub struct Flag {
    pub holds: bool,
    pub defect: f64,
}

impl Flag {
    fn gate(defect: f64, tol: f64) -> Self {
        Flag {
            holds: defect <= tol,
            defect,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HypothesisFlags {
    pub n_above_three: Flag,
    pub conformally_flat: Flag,
    pub semiparallel: Flag,
    pub mc_semiparallel: Flag,
    pub commutative: Flag,
    pub minimal: Flag,
    pub totally_geodesic: Flag,
}

impl HypothesisFlags {
    pub fn rows(&self) -> [(&'static str, Flag); 7] {
        [
            ("n>3", self.n_above_three),
            ("conformally_flat", self.conformally_flat),
            ("semiparallel", self.semiparallel),
            ("mc_semiparallel", self.mc_semiparallel),
            ("commutative", self.commutative),
            ("minimal", self.minimal),
            ("totally_geodesic", self.totally_geodesic),
        ]
    }
}

/// Full classification verdict with the measurements that justified it.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub mode: &'static str,
    pub flags: HypothesisFlags,
    pub conclusion: Conclusion,
    pub note: String,
    pub spectrum: Vec<f64>,
    pub residuals: BTreeMap<String, Vec<f64>>,
    pub fixture: bool,
}

/// A resolved point ready for classification. `fixture` marks instances whose
/// intrinsic curvature was supplied directly instead of through the Gauss
/// equation.
#[derive(Clone, Debug)]
pub struct Instance {
    pub point: SubmanifoldPoint,
    pub geometry: IntrinsicGeometry,
    pub fixture: bool,
    pub product: Option<ProductModel>,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.point.n()
    }
}

/// Measures all seven hypothesis gates of an instance.
pub fn hypothesis_flags(instance: &Instance, tol: &Tolerances) -> Result<HypothesisFlags> {
    let n = instance.n();
    let geom = &instance.geometry;
    let sp = semiparallel_defect(&instance.point, geom)?;
    let conformal = geom.conformal_defect().unwrap_or(f64::INFINITY);
    Ok(HypothesisFlags {
        n_above_three: Flag {
            holds: n > 3,
            defect: if n > 3 { 0.0 } else { (4 - n) as f64 },
        },
        conformally_flat: Flag::gate(conformal, tol.gate),
        semiparallel: Flag::gate(sp.max(), tol.gate),
        mc_semiparallel: Flag::gate(mean_curvature_semiparallel_defect(geom), tol.gate),
        commutative: Flag::gate(commutativity_defect(&instance.point), tol.gate),
        minimal: Flag::gate(geom.mean().length, tol.gate),
        totally_geodesic: Flag::gate(instance.point.cubic().defect_norm(), tol.gate),
    })
}

/// The residual system tying the Ricci spectrum to the mean curvature
/// direction in the Ricci eigenframe.
#[derive(Clone, Debug)]
pub struct QuasiEinsteinReport {
    /// (lambda_i + lambda_j - tau/(n-1)) * g(e_j, JH) for i != j, row-major
    /// n x n with zero diagonal (the diagonal carries no constraint).
    pub pair_residuals: Vec<f64>,
    pub max_pair_residual: f64,
    /// S(JH, JH).
    pub s_jh_jh: f64,
    /// At least n-1 eigenvalues coincide within the clustering tolerance.
    pub quasi_einstein: bool,
    pub minimal: bool,
    /// g(e_j, JH) in the eigenframe.
    pub jh_eigenframe: Vec<f64>,
}

pub fn quasi_einstein_residuals(
    instance: &Instance,
    tol: &Tolerances,
) -> Result<QuasiEinsteinReport> {
    let n = instance.n();
    if n <= 3 {
        return Err(GeomError::RequiresDimensionAboveThree {
            what: "quasi-Einstein residual system",
            n,
        });
    }
    let geom = &instance.geometry;
    let spec = geom.spectrum();
    let lambda = &spec.eigenvalues;
    let tau = geom.tau();
    let jh = &geom.mean().jh_tangent;
    let jh_eig: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|p| spec.eigenvectors.get(p, j) * jh[p]).sum())
        .collect();
    let trace_term = tau / (n as f64 - 1.0);
    let mut pair_residuals = vec![0.0; n * n];
    let mut max_pair: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let r = (lambda[i] + lambda[j] - trace_term) * jh_eig[j];
            pair_residuals[i * n + j] = r;
            max_pair = max_pair.max(r.abs());
        }
    }
    let s_jh_jh = (0..n).map(|j| lambda[j] * jh_eig[j] * jh_eig[j]).sum();
    Ok(QuasiEinsteinReport {
        pair_residuals,
        max_pair_residual: max_pair,
        s_jh_jh,
        quasi_einstein: has_quasi_einstein_spectrum(lambda, tol.cluster),
        minimal: geom.mean().length <= tol.gate,
        jh_eigenframe: jh_eig,
    })
}

/// At least n-1 of the sorted eigenvalues agree within `tol`.
pub fn has_quasi_einstein_spectrum(sorted: &[f64], tol: f64) -> bool {
    let n = sorted.len();
    if n < 2 {
        return true;
    }
    let first = sorted[n - 2] - sorted[0];
    let last = sorted[n - 1] - sorted[1];
    first <= tol || last <= tol
}

/// Gate quantities extracted from the second fundamental form in the Ricci
/// eigenframe, with the eigenvalue relations they force on a semiparallel
/// conformally flat point.
#[derive(Clone, Debug)]
pub struct GateEntry {
    pub i: usize,
    pub k: usize,
    /// g(A_{J e_i} e_i, e_k) in the eigenframe.
    pub gate: f64,
    /// lambda_i + lambda_k - tau/(n-1).
    pub eigenvalue_residual: f64,
    /// Max-abs of (lambda_i + lambda_k - tau/(n-1)) *
    /// (2 A_{J e_i} e_k + g(A_{J e_i} e_i, e_k) e_i - g(A_{J e_i} e_i, e_i) e_k).
    pub vector_residual: f64,
}

#[derive(Clone, Debug)]
pub struct DiagonalGateEntry {
    pub i: usize,
    /// g(A_{J e_i} e_i, e_i) in the eigenframe.
    pub gate: f64,
    /// |lambda_i| (the gate forces this eigenvalue to vanish).
    pub zero_defect: f64,
    /// Spread of the remaining eigenvalues.
    pub off_spread: f64,
}

#[derive(Clone, Debug)]
pub struct MinimalBranch {
    pub k: usize,
    pub zero_defect: f64,
    pub spread: f64,
}

#[derive(Clone, Debug)]
pub struct SpectrumGateReport {
    /// The implications only fire on semiparallel, conformally flat points.
    pub applicable: bool,
    pub semiparallel_defect: f64,
    pub conformal_defect: f64,
    pub pair_gates: Vec<GateEntry>,
    pub diagonal_gates: Vec<DiagonalGateEntry>,
    pub minimal: bool,
    pub totally_geodesic: bool,
    /// Best zero-eigenvalue split if the point is minimal but not totally
    /// geodesic.
    pub minimal_branch: Option<MinimalBranch>,
}

pub fn semiparallel_spectrum_gates(
    instance: &Instance,
    tol: &Tolerances,
) -> Result<SpectrumGateReport> {
    let n = instance.n();
    let geom = &instance.geometry;
    let spec = geom.spectrum();
    let lambda = &spec.eigenvalues;
    let tau = geom.tau();
    let trace_term = tau / (n as f64 - 1.0);
    let h_eig = instance.point.cubic().rotate(&spec.eigenvectors);
    let sp = semiparallel_defect(&instance.point, geom)?;
    let conformal = geom.conformal_defect().unwrap_or(f64::INFINITY);

    let mut pair_gates = Vec::new();
    for i in 0..n {
        for k in 0..n {
            if i == k {
                continue;
            }
            let gate = h_eig.get(i, i, k);
            let f = lambda[i] + lambda[k] - trace_term;
            let mut vec_res: f64 = 0.0;
            for p in 0..n {
                let mut comp = 2.0 * h_eig.get(i, p, k);
                if p == i {
                    comp += h_eig.get(i, i, k);
                }
                if p == k {
                    comp -= h_eig.get(i, i, i);
                }
                vec_res = vec_res.max((f * comp).abs());
            }
            pair_gates.push(GateEntry {
                i,
                k,
                gate,
                eigenvalue_residual: f,
                vector_residual: vec_res,
            });
        }
    }

    let mut diagonal_gates = Vec::new();
    for i in 0..n {
        let others: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| lambda[j]).collect();
        let spread = others.iter().fold(0.0f64, |m, &x| m.max(x))
            - others.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        diagonal_gates.push(DiagonalGateEntry {
            i,
            gate: h_eig.get(i, i, i),
            zero_defect: lambda[i].abs(),
            off_spread: spread,
        });
    }

    let minimal = geom.mean().length <= tol.gate;
    let totally_geodesic = instance.point.cubic().defect_norm() <= tol.gate;
    let minimal_branch = if minimal && !totally_geodesic {
        (0..n)
            .map(|k| {
                let others: Vec<f64> = (0..n).filter(|&j| j != k).map(|j| lambda[j]).collect();
                let spread = others.iter().fold(0.0f64, |m, &x| m.max(x))
                    - others.iter().fold(f64::INFINITY, |m, &x| m.min(x));
                MinimalBranch {
                    k,
                    zero_defect: lambda[k].abs(),
                    spread,
                }
            })
            .min_by(|a, b| {
                let fa = a.zero_defect.max(a.spread);
                let fb = b.zero_defect.max(b.spread);
                fa.partial_cmp(&fb).unwrap()
            })
    } else {
        None
    };

    Ok(SpectrumGateReport {
        applicable: sp.max() <= tol.gate && conformal <= tol.gate,
        semiparallel_defect: sp.max(),
        conformal_defect: conformal,
        pair_gates,
        diagonal_gates,
        minimal,
        totally_geodesic,
        minimal_branch,
    })
}

/// Looks for the spectrum shape {0, (n-2)c x (n-1)}: split at the largest
/// gap, require a singleton at zero and a tight nonzero cluster.
pub fn detect_product_type_spectrum(sorted: &[f64], tol_cluster: f64) -> Option<f64> {
    let n = sorted.len();
    if n < 3 {
        return None;
    }
    let mut split = 0;
    let mut gap = -1.0;
    for i in 0..n - 1 {
        let g = sorted[i + 1] - sorted[i];
        if g > gap {
            gap = g;
            split = i;
        }
    }
    let (low, high) = sorted.split_at(split + 1);
    let (single, cluster) = if low.len() == 1 {
        (low[0], high)
    } else if high.len() == 1 {
        (high[0], low)
    } else {
        return None;
    };
    if single.abs() > tol_cluster {
        return None;
    }
    let spread = cluster[cluster.len() - 1] - cluster[0];
    if spread > tol_cluster {
        return None;
    }
    let mean: f64 = cluster.iter().sum::<f64>() / cluster.len() as f64;
    let c = mean / (n as f64 - 2.0);
    if c.abs() <= tol_cluster {
        return None;
    }
    Some(c)
}

fn base_residuals(instance: &Instance, flags: &HypothesisFlags) -> BTreeMap<String, Vec<f64>> {
    let geom = &instance.geometry;
    let mut out = BTreeMap::new();
    out.insert("spectrum".into(), geom.spectrum().eigenvalues.clone());
    out.insert(
        "weyl_defect".into(),
        vec![geom.conformal_defect().unwrap_or(f64::INFINITY)],
    );
    out.insert(
        "semiparallel_defect".into(),
        vec![flags.semiparallel.defect],
    );
    out.insert(
        "mc_semiparallel_defect".into(),
        vec![flags.mc_semiparallel.defect],
    );
    out.insert("commutator_defect".into(), vec![flags.commutative.defect]);
    out.insert("mean_curvature_length".into(), vec![geom.mean().length]);
    out.insert("h_max".into(), vec![instance.point.cubic().defect_norm()]);
    out.insert("curvature_max".into(), vec![geom.r().defect_norm()]);
    out.insert("ricci_max".into(), vec![geom.ricci().defect_norm()]);
    out
}

/// Classifies the intrinsic structure of a conformally flat point whose
/// second fundamental form (or mean curvature vector, per `mode`) is
/// semiparallel. Failed gates yield `HypothesisViolation`; satisfied gates
/// yield the structure the spectrum certifies.
pub fn classify_intrinsic_structure(
    instance: &Instance,
    mode: ClassifyMode,
    tol: &Tolerances,
) -> Result<Verdict> {
    let n = instance.n();
    if n <= 3 {
        return Err(GeomError::RequiresDimensionAboveThree {
            what: "intrinsic structure classification",
            n,
        });
    }
    let geom = &instance.geometry;
    let flags = hypothesis_flags(instance, tol)?;
    let prop = quasi_einstein_residuals(instance, tol)?;

    let mut residuals = base_residuals(instance, &flags);
    residuals.insert("pair_residuals".into(), prop.pair_residuals.clone());
    residuals.insert("ricci_jh_jh".into(), vec![prop.s_jh_jh]);
    residuals.insert("jh_eigenframe".into(), prop.jh_eigenframe.clone());

    let mut violated: Vec<&str> = Vec::new();
    if !flags.conformally_flat.holds {
        violated.push("conformally_flat");
    }
    match mode {
        ClassifyMode::MeanCurvatureSemiparallel => {
            if !flags.mc_semiparallel.holds {
                violated.push("mc_semiparallel");
            }
            if flags.minimal.holds {
                violated.push("not_minimal");
            }
        }
        ClassifyMode::Semiparallel => {
            if !flags.semiparallel.holds {
                violated.push("semiparallel");
            }
            if flags.totally_geodesic.holds {
                violated.push("not_totally_geodesic");
            }
        }
    }

    let (conclusion, note) = if !violated.is_empty() {
        (
            Conclusion::HypothesisViolation,
            format!("violated gates: {}", violated.join(", ")),
        )
    } else if geom.r().defect_norm() <= tol.gate {
        (
            Conclusion::Flat,
            "pointwise-consistent with a flat metric".to_string(),
        )
    } else if let Some(c) = detect_product_type_spectrum(&geom.spectrum().eigenvalues, tol.cluster)
    {
        (
            Conclusion::ProductType { c },
            format!(
                "pointwise-consistent with a product of a constant-curvature factor (c = {c:.6e}) and a segment"
            ),
        )
    } else if geom.ricci().defect_norm() <= tol.gate {
        (
            Conclusion::EinsteinZero,
            "Ricci tensor vanishes while the curvature does not: S = 0 branch".to_string(),
        )
    } else {
        (
            Conclusion::Indeterminate,
            "hypotheses hold but no admissible structure was certified; potential counterexample"
                .to_string(),
        )
    };

    Ok(Verdict {
        mode: mode.label(),
        flags,
        conclusion,
        note,
        spectrum: geom.spectrum().eigenvalues.clone(),
        residuals,
        fixture: instance.fixture,
    })
}

/// Splitting analysis on a product-model ambient: checks commutativity and
/// semiparallelism, the restriction identity R = Rbar on the frame, the
/// orthogonal-triple identity R(X,Y,Z,X) = mu/8 g(X,X) g(FY,Z), classifies
/// every frame vector by its F-eigenvalue and measures the factor sectional
/// curvatures and per-factor totally-geodesic defects.
pub fn classify_product_splitting(instance: &Instance, tol: &Tolerances) -> Result<Verdict> {
    let model = instance
        .product
        .as_ref()
        .ok_or(GeomError::InvalidParameter {
            what: "product splitting requires a product-model ambient".to_string(),
        })?;
    let n = instance.n();
    if n <= 3 {
        return Err(GeomError::RequiresDimensionAboveThree {
            what: "product splitting classification",
            n,
        });
    }
    let geom = &instance.geometry;
    let flags = hypothesis_flags(instance, tol)?;
    let mut residuals = base_residuals(instance, &flags);

    let mu = model.mu();
    let g = model.space().metric();
    let f = model.involution();
    let frame = instance.point.frame();

    // R = Rbar restricted, forced by commuting shape operators.
    let rbar = instance.point.ambient().r().pullback(frame)?;
    let restriction_defect = geom.r().sub(&rbar).defect_norm();
    residuals.insert("gauss_restriction_defect".into(), vec![restriction_defect]);

    // Orthogonal-triple identity residual.
    let f_frame: Vec<Vector> = frame
        .iter()
        .map(|v| Vector::new(f.mul_vec(v.as_slice())))
        .collect();
    let mut triple_residual: f64 = 0.0;
    for a in 0..n {
        let gaa = g.eval(&frame[a], &frame[a]);
        for b in 0..n {
            for c in 0..n {
                if a == b || a == c || b == c {
                    continue;
                }
                let expected = mu / 8.0 * gaa * g.eval(&f_frame[b], &frame[c]);
                triple_residual = triple_residual.max((geom.r().get(a, b, c, a) - expected).abs());
            }
        }
    }
    residuals.insert("orthogonal_triple_residual".into(), vec![triple_residual]);

    // F-eigenvalue classification of the frame.
    let mut alignment = Vec::with_capacity(n);
    let mut in_first = Vec::with_capacity(n);
    for i in 0..n {
        let mut dplus: f64 = 0.0;
        let mut dminus: f64 = 0.0;
        for a in 0..2 * n {
            dplus = dplus.max((f_frame[i].get(a) - frame[i].get(a)).abs());
            dminus = dminus.max((f_frame[i].get(a) + frame[i].get(a)).abs());
        }
        alignment.push(dplus.min(dminus));
        in_first.push(dplus <= dminus);
    }
    residuals.insert("f_alignment".into(), alignment.clone());
    let k_found = in_first.iter().filter(|&&b| b).count();
    residuals.insert("k_found".into(), vec![k_found as f64]);

    let mut violated: Vec<&str> = Vec::new();
    if !flags.commutative.holds {
        violated.push("commutative");
    }
    if !flags.semiparallel.holds {
        violated.push("semiparallel");
    }
    if !violated.is_empty() {
        return Ok(Verdict {
            mode: "product-splitting",
            flags,
            conclusion: Conclusion::HypothesisViolation,
            note: format!("violated gates: {}", violated.join(", ")),
            spectrum: geom.spectrum().eigenvalues.clone(),
            residuals,
            fixture: instance.fixture,
        });
    }

    let misaligned = alignment.iter().any(|&d| d > tol.gate);
    if misaligned || k_found != model.k() {
        return Ok(Verdict {
            mode: "product-splitting",
            flags,
            conclusion: Conclusion::Indeterminate,
            note: format!(
                "frame is not aligned with the factor involution (k found {k_found}, model k {}); counterexample report",
                model.k()
            ),
            spectrum: geom.spectrum().eigenvalues.clone(),
            residuals,
            fixture: instance.fixture,
        });
    }

    // Factor sectional curvatures and totally geodesic defects.
    let mut sect1 = Vec::new();
    let mut sect2 = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let kij = geom.r().get(i, j, j, i);
            if in_first[i] && in_first[j] {
                sect1.push(kij);
            } else if !in_first[i] && !in_first[j] {
                sect2.push(kij);
            }
        }
    }
    let h = instance.point.cubic();
    let mut tg1: f64 = 0.0;
    let mut tg2: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for m in 0..n {
                let v = h.get(m, i, j).abs();
                if in_first[i] && in_first[j] {
                    tg1 = tg1.max(v);
                } else if !in_first[i] && !in_first[j] {
                    tg2 = tg2.max(v);
                }
            }
        }
    }
    residuals.insert("factor1_sectional".into(), sect1.clone());
    residuals.insert("factor2_sectional".into(), sect2.clone());
    residuals.insert("tg_factor1".into(), vec![tg1]);
    residuals.insert("tg_factor2".into(), vec![tg2]);

    let c1_target = mu / 4.0;
    let sect1_defect = sect1
        .iter()
        .fold(0.0f64, |m, &x| m.max((x - c1_target).abs()));
    let sect2_defect = sect2
        .iter()
        .fold(0.0f64, |m, &x| m.max((x + c1_target).abs()));
    let second_factor_checked = n - k_found > 1;

    let checks_pass = restriction_defect <= tol.gate
        && triple_residual <= tol.gate
        && sect1_defect <= tol.gate
        && (!second_factor_checked || sect2_defect <= tol.gate)
        && tg1 <= tol.gate
        && tg2 <= tol.gate;

    let (conclusion, note) = if checks_pass {
        let c1 = if sect1.is_empty() {
            c1_target
        } else {
            sect1.iter().sum::<f64>() / sect1.len() as f64
        };
        let c2 = if second_factor_checked {
            Some(sect2.iter().sum::<f64>() / sect2.len() as f64)
        } else {
            None
        };
        (
            Conclusion::ProductSplit {
                c1,
                c2,
                k: k_found,
            },
            format!(
                "pointwise-consistent with a totally geodesic product split, factor curvatures {c1:.6e}{}",
                match c2 {
                    Some(v) => format!(" and {v:.6e}"),
                    None => " (second factor is a single direction)".to_string(),
                }
            ),
        )
    } else {
        (
            Conclusion::Indeterminate,
            "splitting checks exceeded tolerance; counterexample report".to_string(),
        )
    };

    Ok(Verdict {
        mode: "product-splitting",
        flags,
        conclusion,
        note,
        spectrum: geom.spectrum().eigenvalues.clone(),
        residuals,
        fixture: instance.fixture,
    })
}

/// Ambient model requested by a scenario.
#[derive(Clone, Debug, PartialEq)]
pub enum AmbientSpec {
    Flat,
    ConstantHsc { mu: f64 },
    Product { k: usize, mu: f64 },
}

/// Tangent frame requested by a scenario. Explicit rows are orthonormalized
/// by stabilized Gram-Schmidt before validation.
#[derive(Clone, Debug, PartialEq)]
pub enum FrameSpec {
    Canonical,
    Explicit(Vec<Vec<f64>>),
}

/// Entry h[k][i][j] = value (0-based indices; symmetry closure applied).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicEntry {
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Entry R[a][b][c][d] = value of an intrinsic curvature fixture.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadEntry {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ToleranceOverrides {
    pub gate: Option<f64>,
    pub internal: Option<f64>,
}

/// A fully specified instance description, resolvable to an [`Instance`] or
/// a typed rejection.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub n: usize,
    pub ambient: AmbientSpec,
    pub frame: FrameSpec,
    pub h_entries: Vec<CubicEntry>,
    pub fixture_r: Option<Vec<QuadEntry>>,
    pub tolerances: ToleranceOverrides,
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn effective_tolerances(&self, base: &Tolerances) -> Tolerances {
        let mut t = *base;
        if let Some(g) = self.tolerances.gate {
            t.gate = g;
        }
        if let Some(i) = self.tolerances.internal {
            t.internal = i;
        }
        t
    }

    pub fn resolve(&self, tol: &Tolerances) -> Result<Instance> {
        let n = self.n;
        let (ambient, product) = match self.ambient {
            AmbientSpec::Flat => (KaehlerCurvature::flat(n)?, None),
            AmbientSpec::ConstantHsc { mu } => (KaehlerCurvature::constant_hsc(n, mu)?, None),
            AmbientSpec::Product { k, mu } => {
                let model = ProductModel::new(n, k, mu)?;
                (product_curvature(&model)?, Some(model))
            }
        };
        let frame = match &self.frame {
            FrameSpec::Canonical => (0..n).map(|i| Vector::basis(2 * n, i)).collect(),
            FrameSpec::Explicit(rows) => {
                if rows.len() != n {
                    return Err(GeomError::DimensionMismatch {
                        expected: n,
                        found: rows.len(),
                    });
                }
                let raw: Vec<Vector> = rows.iter().map(|r| Vector::new(r.clone())).collect();
                gram_schmidt(ambient.space().metric(), &raw)?
            }
        };
        let entries: Vec<(usize, usize, usize, f64)> = self
            .h_entries
            .iter()
            .map(|e| (e.k, e.i, e.j, e.value))
            .collect();
        let h = SymmetricCubic::from_entries(n, &entries)?;
        let point = SubmanifoldPoint::new(ambient, frame, h)?;
        let (geometry, fixture) = match &self.fixture_r {
            Some(entries) => {
                let quads: Vec<(usize, usize, usize, usize, f64)> = entries
                    .iter()
                    .map(|e| (e.a, e.b, e.c, e.d, e.value))
                    .collect();
                let r = curvature_from_entries(n, &quads, tol.internal)?;
                (intrinsic_from_fixture(&point, r, tol)?, true)
            }
            None => (gauss_intrinsic_with(&point, tol)?, false),
        };
        Ok(Instance {
            point,
            geometry,
            fixture,
            product,
        })
    }

    pub fn resolve_default(&self) -> Result<Instance> {
        self.resolve(&Tolerances::default())
    }
}

/// Classifies per ambient kind: product ambients run the splitting analysis,
/// everything else the intrinsic-structure classifier in the given mode.
pub fn classify_scenario(
    scenario: &Scenario,
    mode: ClassifyMode,
    base_tol: &Tolerances,
) -> Result<Verdict> {
    let tol = scenario.effective_tolerances(base_tol);
    let instance = scenario.resolve(&tol)?;
    if instance.product.is_some() {
        classify_product_splitting(&instance, &tol)
    } else {
        classify_intrinsic_structure(&instance, mode, &tol)
    }
}

#[cfg(test)]
mod tests {
    use super::generators::*;
    use super::*;
    use crate::submanifold::mean_curvature_semiparallel_defect;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn minimal_instances_have_zero_pair_residuals() {
        let scenario = gen_random_instance(
            4,
            3,
            &RandomOptions {
                traceless: true,
                ..RandomOptions::default()
            },
        )
        .unwrap();
        let inst = scenario.resolve(&tol()).unwrap();
        let report = quasi_einstein_residuals(&inst, &tol()).unwrap();
        assert!(report.minimal);
        assert!(report.max_pair_residual < 1e-13);
        assert!(report.s_jh_jh.abs() < 1e-26);
    }

    #[test]
    fn product_type_instance_satisfies_the_residual_system() {
        let inst = gen_product_type_instance(5, 1.0)
            .unwrap()
            .resolve(&tol())
            .unwrap();
        assert!(!inst.fixture);
        let report = quasi_einstein_residuals(&inst, &tol()).unwrap();
        assert!(report.max_pair_residual <= 1e-10);
        assert!(report.s_jh_jh.abs() <= 1e-10);
        assert!(report.quasi_einstein);
        assert!(!report.minimal);
    }

    #[test]
    fn distinct_spectrum_violates_the_residual_system() {
        let inst = gen_distinct_spectrum_fixture(5, 17)
            .unwrap()
            .resolve(&tol())
            .unwrap();
        assert!(inst.fixture);
        let report = quasi_einstein_residuals(&inst, &tol()).unwrap();
        assert!(report.max_pair_residual > 1e-6);
        assert!(!report.quasi_einstein);
        // equivalence under C = 0: nonzero residuals <=> nonzero R(e_i,e_j)JH
        assert!(mean_curvature_semiparallel_defect(&inst.geometry) > 1e-6);
        assert!(inst.geometry.conformal_defect().unwrap() <= 1e-10);
    }

    #[test]
    fn residual_system_tracks_mc_semiparallelism_both_ways() {
        // satisfying direction
        for c in [0.5, -1.5] {
            let inst = gen_product_type_instance(5, c)
                .unwrap()
                .resolve(&tol())
                .unwrap();
            let report = quasi_einstein_residuals(&inst, &tol()).unwrap();
            assert!(report.max_pair_residual <= 1e-9);
            assert!(mean_curvature_semiparallel_defect(&inst.geometry) <= 1e-9);
        }
        // violating direction
        for seed in [1u64, 2, 3] {
            let inst = gen_distinct_spectrum_fixture(4, seed)
                .unwrap()
                .resolve(&tol())
                .unwrap();
            let report = quasi_einstein_residuals(&inst, &tol()).unwrap();
            assert!(report.max_pair_residual > 1e-9);
            assert!(mean_curvature_semiparallel_defect(&inst.geometry) > 1e-9);
        }
    }

    #[test]
    fn classify_flat_instance() {
        let inst = gen_flat(4, 11).unwrap().resolve(&tol()).unwrap();
        let verdict =
            classify_intrinsic_structure(&inst, ClassifyMode::MeanCurvatureSemiparallel, &tol())
                .unwrap();
        assert_eq!(verdict.conclusion, Conclusion::Flat);
        assert!(verdict.flags.conformally_flat.holds);
        assert!(verdict.flags.mc_semiparallel.holds);
        assert!(!verdict.flags.minimal.holds);
        // the same instance classifies FLAT under the stronger hypothesis too
        let verdict2 =
            classify_intrinsic_structure(&inst, ClassifyMode::Semiparallel, &tol()).unwrap();
        assert_eq!(verdict2.conclusion, Conclusion::Flat);
    }

    #[test]
    fn classify_product_type_instance() {
        let inst = gen_product_type_instance(5, 1.0)
            .unwrap()
            .resolve(&tol())
            .unwrap();
        let verdict =
            classify_intrinsic_structure(&inst, ClassifyMode::MeanCurvatureSemiparallel, &tol())
                .unwrap();
        match verdict.conclusion {
            Conclusion::ProductType { c } => assert!((c - 1.0).abs() <= 1e-10),
            other => panic!("unexpected conclusion {other:?}"),
        }
        assert!(verdict.flags.conformally_flat.holds);
        assert!(verdict.flags.mc_semiparallel.holds);
        assert!(verdict.flags.semiparallel.holds);
        // eigenvalues (0, 3, 3, 3, 3)
        let want = [0.0, 3.0, 3.0, 3.0, 3.0];
        for (got, want) in verdict.spectrum.iter().zip(want) {
            assert!((got - want).abs() <= 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn product_type_negative_curvature_spectrum() {
        let inst = gen_product_type_instance(4, -2.0)
            .unwrap()
            .resolve(&tol())
            .unwrap();
        assert!(inst.fixture);
        let want = [-4.0, -4.0, -4.0, 0.0];
        for (got, want) in inst.geometry.spectrum().eigenvalues.iter().zip(want) {
            assert!((got - want).abs() <= 1e-10, "{got} vs {want}");
        }
        let verdict =
            classify_intrinsic_structure(&inst, ClassifyMode::MeanCurvatureSemiparallel, &tol())
                .unwrap();
        match verdict.conclusion {
            Conclusion::ProductType { c } => assert!((c + 2.0).abs() <= 1e-10),
            other => panic!("unexpected conclusion {other:?}"),
        }
    }

    #[test]
    fn hypothesis_violations_are_flagged() {
        // conformal flatness fails on a generic curvature
        let inst = gen_random_instance(4, 19, &RandomOptions::default())
            .unwrap()
            .resolve(&tol())
            .unwrap();
        let verdict =
            classify_intrinsic_structure(&inst, ClassifyMode::MeanCurvatureSemiparallel, &tol())
                .unwrap();
        assert_eq!(verdict.conclusion, Conclusion::HypothesisViolation);
        assert!(!verdict.flags.conformally_flat.holds);

        // minimal instance violates the non-minimality clause
        let minimal = gen_random_instance(
            4,
            19,
            &RandomOptions {
                traceless: true,
                commuting: true,
                ..RandomOptions::default()
            },
        )
        .unwrap()
        .resolve(&tol())
        .unwrap();
        let verdict =
            classify_intrinsic_structure(&minimal, ClassifyMode::MeanCurvatureSemiparallel, &tol())
                .unwrap();
        assert_eq!(verdict.conclusion, Conclusion::HypothesisViolation);
        assert!(verdict.note.contains("not_minimal"));

        // totally geodesic instance violates the second-form clause
        let tg = gen_totally_geodesic_product(5, 4, 2.0)
            .unwrap()
            .resolve(&tol())
            .unwrap();
        let verdict =
            classify_intrinsic_structure(&tg, ClassifyMode::Semiparallel, &tol()).unwrap();
        assert_eq!(verdict.conclusion, Conclusion::HypothesisViolation);
        assert!(verdict.note.contains("not_totally_geodesic"));
    }

    #[test]
    fn low_dimension_is_rejected() {
        let inst = gen_random_instance(3, 0, &RandomOptions::default())
            .unwrap()
            .resolve(&tol())
            .unwrap();
        assert!(matches!(
            classify_intrinsic_structure(&inst, ClassifyMode::Semiparallel, &tol()),
            Err(GeomError::RequiresDimensionAboveThree { .. })
        ));
        assert!(matches!(
            quasi_einstein_residuals(&inst, &tol()),
            Err(GeomError::RequiresDimensionAboveThree { .. })
        ));
    }

    #[test]
    fn product_splitting_end_to_end() {
        let inst = gen_totally_geodesic_product(5, 4, 2.0)
            .unwrap()
            .resolve(&tol())
            .unwrap();
        let verdict = classify_product_splitting(&inst, &tol()).unwrap();
        match verdict.conclusion {
            Conclusion::ProductSplit { c1, c2, k } => {
                assert!((c1 - 0.5).abs() <= 1e-10);
                assert!(
                    c2.is_none(),
                    "single second-factor direction: no curvature check"
                );
                assert_eq!(k, 4);
            }
            other => panic!("unexpected conclusion {other:?}"),
        }
        assert_eq!(verdict.residuals["commutator_defect"][0], 0.0);

        let inst = gen_totally_geodesic_product(4, 2, 1.0)
            .unwrap()
            .resolve(&tol())
            .unwrap();
        let verdict = classify_product_splitting(&inst, &tol()).unwrap();
        match verdict.conclusion {
            Conclusion::ProductSplit { c1, c2, k } => {
                assert!((c1 - 0.25).abs() <= 1e-10);
                assert!((c2.unwrap() + 0.25).abs() <= 1e-10);
                assert_eq!(k, 2);
            }
            other => panic!("unexpected conclusion {other:?}"),
        }
    }

    #[test]
    fn product_splitting_rejects_degenerate_models() {
        assert!(gen_totally_geodesic_product(5, 4, 0.0).is_err());
        assert!(gen_totally_geodesic_product(5, 0, 1.0).is_err());
        assert!(gen_totally_geodesic_product(5, 5, 1.0).is_err());
    }

    #[test]
    fn product_splitting_flags_misaligned_frames() {
        // a frame mixing the two factors is orthonormal and totally real but
        // not F-aligned
        let inv = 1.0 / 2.0f64.sqrt();
        let n = 4;
        let mut rows = vec![vec![0.0; 2 * n]; n];
        rows[0][0] = 1.0;
        rows[1][1] = inv;
        rows[1][2] = inv;
        rows[2][1] = inv;
        rows[2][2] = -inv;
        rows[3][3] = 1.0;
        let scenario = Scenario {
            name: "misaligned".to_string(),
            n,
            ambient: AmbientSpec::Product { k: 2, mu: 1.0 },
            frame: FrameSpec::Explicit(rows),
            h_entries: Vec::new(),
            fixture_r: None,
            tolerances: ToleranceOverrides::default(),
            seed: None,
        };
        let inst = scenario.resolve(&tol()).unwrap();
        let verdict = classify_product_splitting(&inst, &tol()).unwrap();
        assert_eq!(verdict.conclusion, Conclusion::Indeterminate);
        assert!(verdict.residuals["f_alignment"].iter().any(|&d| d > 0.5));
    }

    #[test]
    fn generators_are_deterministic() {
        let a = gen_random_instance(5, 42, &RandomOptions::default()).unwrap();
        let b = gen_random_instance(5, 42, &RandomOptions::default()).unwrap();
        assert_eq!(a, b);
        let c = gen_random_instance(5, 43, &RandomOptions::default()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generator_options_construct_what_they_claim() {
        let commuting = gen_random_instance(
            4,
            9,
            &RandomOptions {
                commuting: true,
                ..RandomOptions::default()
            },
        )
        .unwrap()
        .resolve(&tol())
        .unwrap();
        assert_eq!(
            crate::submanifold::commutativity_defect(&commuting.point),
            0.0
        );

        let traceless = gen_random_instance(
            4,
            9,
            &RandomOptions {
                traceless: true,
                ..RandomOptions::default()
            },
        )
        .unwrap()
        .resolve(&tol())
        .unwrap();
        assert!(traceless.geometry.mean().length < 1e-14);
    }

    #[test]
    fn verdicts_are_stable_under_scaling() {
        // rescaling h by t and the curvature by t^2 moves every residual but
        // flips no exact-zero gate
        for t in [1e-3, 1.0, 1e3] {
            let inst = gen_product_type_instance(5, 1.0 * t * t)
                .unwrap()
                .resolve(&tol())
                .unwrap();
            let verdict = classify_intrinsic_structure(
                &inst,
                ClassifyMode::MeanCurvatureSemiparallel,
                &tol(),
            )
            .unwrap();
            match verdict.conclusion {
                Conclusion::ProductType { c } => {
                    assert!((c - t * t).abs() <= 1e-8 * t * t.max(1.0))
                }
                other => panic!("t = {t}: unexpected conclusion {other:?}"),
            }

            // the violating fixture rescales multiplicatively: its nonzero
            // mc defect scales by t^3 and its exact-zero conformal gate
            // stays exactly satisfied, so it never classifies as FLAT or
            // PRODUCT_TYPE at any scale
            let violating = gen_distinct_spectrum_fixture(4, 7).unwrap();
            let base_defect =
                mean_curvature_semiparallel_defect(&violating.resolve(&tol()).unwrap().geometry);
            let mut scaled = violating.clone();
            for e in scaled.h_entries.iter_mut() {
                e.value *= t;
            }
            for e in scaled.fixture_r.as_mut().unwrap().iter_mut() {
                e.value *= t * t;
            }
            let inst = scaled.resolve(&tol()).unwrap();
            let defect = mean_curvature_semiparallel_defect(&inst.geometry);
            assert!(
                (defect / (base_defect * t * t * t) - 1.0).abs() < 1e-9,
                "t = {t}: defect {defect} vs base {base_defect}"
            );
            let verdict = classify_intrinsic_structure(
                &inst,
                ClassifyMode::MeanCurvatureSemiparallel,
                &tol(),
            )
            .unwrap();
            assert!(verdict.flags.conformally_flat.holds);
            assert!(!matches!(
                verdict.conclusion,
                Conclusion::Flat | Conclusion::ProductType { .. }
            ));
            if t >= 1.0 {
                assert_eq!(verdict.conclusion, Conclusion::HypothesisViolation);
            }
        }
    }

    #[test]
    fn generators_never_produce_indeterminate_verdicts() {
        let mut scenarios = vec![
            gen_flat(4, 0).unwrap(),
            gen_flat(5, 1).unwrap(),
            gen_product_type_instance(4, 2.0).unwrap(),
            gen_product_type_instance(5, -1.0).unwrap(),
            gen_product_type_instance(6, 1.0).unwrap(),
            gen_product_type_fixture(5, 1.5, 2.0).unwrap(),
        ];
        for seed in 0..5 {
            scenarios.push(
                gen_random_instance(
                    4,
                    seed,
                    &RandomOptions {
                        commuting: true,
                        ..RandomOptions::default()
                    },
                )
                .unwrap(),
            );
        }
        for scenario in scenarios {
            let inst = scenario.resolve(&tol()).unwrap();
            let verdict = classify_intrinsic_structure(
                &inst,
                ClassifyMode::MeanCurvatureSemiparallel,
                &tol(),
            )
            .unwrap();
            assert_ne!(
                verdict.conclusion,
                Conclusion::Indeterminate,
                "scenario {}",
                scenario.name
            );
        }
    }

    #[test]
    fn spectrum_gates_fire_on_constructed_instances() {
        // totally geodesic: all gates vanish
        let tg = gen_totally_geodesic_product(5, 4, 1.0)
            .unwrap()
            .resolve(&tol())
            .unwrap();
        let report = semiparallel_spectrum_gates(&tg, &tol()).unwrap();
        assert!(report.applicable);
        assert!(report.totally_geodesic);
        for e in &report.pair_gates {
            assert_eq!(e.gate, 0.0);
        }

        // gate instance: nonzero gates force the eigenvalue relation
        let inst = gen_spectrum_gate_instance(5, 1.5, 0.8, 1.6)
            .unwrap()
            .resolve(&tol())
            .unwrap();
        let report = semiparallel_spectrum_gates(&inst, &tol()).unwrap();
        assert!(
            report.applicable,
            "instance must be semiparallel and conformally flat"
        );
        let mut fired = 0;
        for e in &report.pair_gates {
            if e.gate.abs() > 1e-6 {
                fired += 1;
                assert!(
                    e.eigenvalue_residual.abs() <= 1e-9,
                    "gate at ({}, {}): residual {}",
                    e.i,
                    e.k,
                    e.eigenvalue_residual
                );
                assert!(e.vector_residual <= 1e-9);
            }
        }
        assert!(fired > 0, "at least one gate must fire");
        // the diagonal gate pins a zero eigenvalue
        let fired_diag: Vec<_> = report
            .diagonal_gates
            .iter()
            .filter(|e| e.gate.abs() > 1e-6)
            .collect();
        assert!(!fired_diag.is_empty());
        for e in fired_diag {
            assert!(e.zero_defect <= 1e-9);
            assert!(e.off_spread <= 1e-9);
        }

        // a generic random instance is not applicable
        let random = gen_random_instance(4, 33, &RandomOptions::default())
            .unwrap()
            .resolve(&tol())
            .unwrap();
        let report = semiparallel_spectrum_gates(&random, &tol()).unwrap();
        assert!(!report.applicable);
    }

    #[test]
    fn minimal_branch_reports_a_zero_split() {
        // minimal non-geodesic instance built from the gate pattern with a
        // traceless adjustment is hard to arrange; use a traceless random
        // instance and only check the report structure.
        let inst = gen_random_instance(
            5,
            21,
            &RandomOptions {
                traceless: true,
                ..RandomOptions::default()
            },
        )
        .unwrap()
        .resolve(&tol())
        .unwrap();
        let report = semiparallel_spectrum_gates(&inst, &tol()).unwrap();
        assert!(report.minimal);
        assert!(!report.totally_geodesic);
        assert!(report.minimal_branch.is_some());
    }

    #[test]
    fn scenario_tolerance_overrides_apply() {
        let mut scenario = gen_flat(4, 2).unwrap();
        scenario.tolerances.gate = Some(1e-3);
        let eff = scenario.effective_tolerances(&tol());
        assert_eq!(eff.gate, 1e-3);
        assert_eq!(eff.internal, tol().internal);
    }

    #[test]
    fn classify_scenario_dispatches_on_ambient_kind() {
        let flat = gen_flat(4, 3).unwrap();
        let verdict =
            classify_scenario(&flat, ClassifyMode::MeanCurvatureSemiparallel, &tol()).unwrap();
        assert_eq!(verdict.conclusion, Conclusion::Flat);

        let product = gen_totally_geodesic_product(5, 4, 2.0).unwrap();
        let verdict =
            classify_scenario(&product, ClassifyMode::MeanCurvatureSemiparallel, &tol()).unwrap();
        assert!(matches!(
            verdict.conclusion,
            Conclusion::ProductSplit { .. }
        ));
    }
}
