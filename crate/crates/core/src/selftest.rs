//! Built-in identity suites. Every suite checks an algebraic identity of the
//! crate against an independent evaluation path and reports its worst defect.
//!
//! The factor-sum suite also reports the defect of the sign-flipped cross
//! term as a negative control: the flipped variant must *fail* the oracle
//! comparison by a wide margin.

use crate::ambient::{
    bochner, bochner_tensor, direct_sum_curvature, holomorphic_sectional, product_curvature,
    product_curvature_tensor, AmbientSpace, CrossTermSign, KaehlerCurvature, ProductModel,
};
use crate::classify::generators::{
    gen_distinct_spectrum_fixture, gen_product_type_fixture, gen_product_type_instance,
    gen_random_instance, gen_totally_geodesic_product, RandomOptions,
};
use crate::classify::{
    classify_intrinsic_structure, classify_product_splitting, quasi_einstein_residuals,
    AmbientSpec, ClassifyMode, Conclusion, Instance,
};
use crate::submanifold::{gauss_curvature, semiparallel_defect, weyl_of};
use crate::tensor::{
    phi, psi, ricci, scalar_curvature, sym_eigen, Bilinear, DefectNorm, Matrix, QuadTensor, Vector,
};
use crate::tolerances::Tolerances;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Direction of a check: a defect bounded above, or a control bounded below.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub bound: f64,
    pub sense: Sense,
    pub ok: bool,
}

fn at_most(label: impl Into<String>, value: f64, bound: f64) -> Check {
    Check {
        label: label.into(),
        value,
        bound,
        sense: Sense::AtMost,
        ok: value <= bound,
    }
}

fn at_least(label: impl Into<String>, value: f64, bound: f64) -> Check {
    Check {
        label: label.into(),
        value,
        bound,
        sense: Sense::AtLeast,
        ok: value >= bound,
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub max_defect: f64,
    pub checks: Vec<Check>,
}

fn outcome(name: &'static str, checks: Vec<Check>) -> SuiteOutcome {
    let passed = checks.iter().all(|c| c.ok);
    let max_defect = checks
        .iter()
        .filter(|c| c.sense == Sense::AtMost)
        .fold(0.0f64, |m, c| m.max(c.value));
    SuiteOutcome {
        name,
        passed,
        max_defect,
        checks,
    }
}

pub const SUITE_NAMES: [&str; 10] = [
    "phi-psi",
    "eigensolver",
    "factor-sum-oracle",
    "bochner",
    "constant-curvature-calibration",
    "gauss-oracle",
    "semiparallel-dual-path",
    "quasi-einstein-forward",
    "weyl",
    "product-splitting",
];

/// Runs all suites whose name contains `filter` (all of them when `None`).
/// `flip_cross_sign` replaces the product curvature candidate with the
/// sign-flipped variant, which must make the factor-sum oracle suite fail.
pub fn run(filter: Option<&str>, flip_cross_sign: bool) -> Vec<SuiteOutcome> {
    let wanted = |name: &str| filter.is_none_or(|f| name.contains(f));
    let mut out = Vec::new();
    if wanted("phi-psi") {
        out.push(suite_phi_psi());
    }
    if wanted("eigensolver") {
        out.push(suite_eigensolver());
    }
    if wanted("factor-sum-oracle") {
        out.push(suite_factor_sum_oracle(flip_cross_sign));
    }
    if wanted("bochner") {
        out.push(suite_bochner());
    }
    if wanted("constant-curvature-calibration") {
        out.push(suite_calibration());
    }
    if wanted("gauss-oracle") {
        out.push(suite_gauss_oracle());
    }
    if wanted("semiparallel-dual-path") {
        out.push(suite_dual_path());
    }
    if wanted("quasi-einstein-forward") {
        out.push(suite_quasi_einstein_forward());
    }
    if wanted("weyl") {
        out.push(suite_weyl());
    }
    if wanted("product-splitting") {
        out.push(suite_product_splitting());
    }
    out
}

/// Reference evaluators kept independent of the implementation paths they
/// check: plain component loops, no staged contractions, no shared kernels.
pub mod oracle {
    use super::*;
    use crate::submanifold::SubmanifoldPoint;

    /// Naive frame restriction: one quadruple sum per output entry, iterating
    /// the nonzero entries of the ambient tensor.
    pub fn pullback_naive(r: &QuadTensor, frame: &[Vector]) -> QuadTensor {
        let d = r.dim();
        let m = frame.len();
        let mut nonzero = Vec::new();
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let v = r.get(a, b, c, e);
                        if v != 0.0 {
                            nonzero.push((a, b, c, e, v));
                        }
                    }
                }
            }
        }
        let mut out = QuadTensor::zeros(m);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let mut s = 0.0;
                        for &(a, b, c, e, v) in &nonzero {
                            s += v
                                * frame[i].get(a)
                                * frame[j].get(b)
                                * frame[k].get(c)
                                * frame[l].get(e);
                        }
                        out.set(i, j, k, l, s);
                    }
                }
            }
        }
        out
    }

    /// The Gauss-equation curvature by direct loops over the cubic entries.
    pub fn gauss_naive(p: &SubmanifoldPoint) -> QuadTensor {
        let n = p.n();
        let h = p.cubic();
        let mut out = pullback_naive(p.ambient().r(), p.frame());
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut bracket = 0.0;
                        for m in 0..n {
                            bracket +=
                                h.get(i, l, m) * h.get(j, m, k) - h.get(j, l, m) * h.get(i, m, k);
                        }
                        out.set(i, j, k, l, out.get(i, j, k, l) + bracket);
                    }
                }
            }
        }
        out
    }

    /// Identity-metric Ricci contraction by direct loops.
    pub fn ricci_naive(r: &QuadTensor) -> Bilinear {
        let n = r.dim();
        let mut raw = vec![0.0; n * n];
        for b in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for a in 0..n {
                    s += r.get(a, b, c, a);
                }
                raw[b * n + c] = s;
            }
        }
        Bilinear::symmetrized(n, &raw)
    }

    pub fn random_symmetric(dim: usize, rng: &mut ChaCha8Rng) -> Bilinear {
        Bilinear::from_fn_symmetric(dim, |_, _| rng.gen_range(-1.0..1.0))
    }

    /// Symmetrizes a random bilinear form against J: Q' = (Q + J^T Q J)/2,
    /// which is J-invariant because J^2 = -Id.
    pub fn random_j_invariant(space: &AmbientSpace, rng: &mut ChaCha8Rng) -> Bilinear {
        let d = space.dim();
        let q = random_symmetric(d, rng);
        let j = space.complex_structure();
        Bilinear::from_fn_symmetric(d, |a, b| {
            let mut pulled = 0.0;
            for p in 0..d {
                let jpa = j.get(p, a);
                if jpa == 0.0 {
                    continue;
                }
                for r in 0..d {
                    pulled += jpa * q.get(p, r) * j.get(r, b);
                }
            }
            0.5 * (q.get(a, b) + pulled)
        })
    }

    /// A random Kaehler-symmetric curvature tensor: a combination of
    /// (phi+psi) of a J-invariant form with factor-sum model tensors.
    pub fn random_kaehler_tensor(n: usize, rng: &mut ChaCha8Rng) -> QuadTensor {
        let space = AmbientSpace::standard(n).unwrap();
        let q = random_j_invariant(&space, rng);
        let g = space.metric();
        let j = space.complex_structure();
        let base = phi(g, &q).unwrap().add_scaled(1.0, &psi(g, j, &q).unwrap());
        let mut t = base.scale(rng.gen_range(-1.0..1.0));
        let mu = rng.gen_range(0.2..2.0);
        t = t.add_scaled(
            rng.gen_range(-1.0..1.0),
            direct_sum_curvature(n, n, mu).unwrap().r(),
        );
        if n >= 2 {
            let k = rng.gen_range(1..n);
            t = t.add_scaled(
                rng.gen_range(-1.0..1.0),
                direct_sum_curvature(n, k, mu).unwrap().r(),
            );
        }
        t
    }

    /// A random curvature-like tensor with no Kaehler structure: phi of a
    /// random form plus the commutator tensor of a random symmetric cubic.
    pub fn random_curvature_like(n: usize, rng: &mut ChaCha8Rng) -> QuadTensor {
        let id = Bilinear::identity(n);
        let q = random_symmetric(n, rng);
        let mut t = phi(&id, &q).unwrap().scale(rng.gen_range(-1.0..1.0));
        let mut h = crate::tensor::SymmetricCubic::zeros(n);
        for k in 0..n {
            for i in k..n {
                for j in i..n {
                    h.set_orbit(k, i, j, rng.gen_range(-1.0..1.0));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut bracket = 0.0;
                        for m in 0..n {
                            bracket +=
                                h.get(i, l, m) * h.get(j, m, k) - h.get(j, l, m) * h.get(i, m, k);
                        }
                        t.set(i, j, k, l, t.get(i, j, k, l) + bracket);
                    }
                }
            }
        }
        t.into_curvature_like(1e-12).unwrap()
    }
}

fn grid() -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for n in 2..=5usize {
        for k in 1..n {
            for mu in [-1.0, 1.0, 2.5] {
                out.push((n, k, mu));
            }
        }
    }
    out
}

/// 200 deterministic random instances over flat and product ambients,
/// n in {4,5,6}.
pub fn instance_grid(count: usize) -> Vec<Instance> {
    let tol = Tolerances::default();
    let mut out = Vec::with_capacity(count);
    for idx in 0..count {
        let n = 4 + idx % 3;
        let ambient = if idx % 2 == 0 {
            AmbientSpec::Flat
        } else {
            let k = 1 + (idx / 2) % (n - 1);
            let mu = [-1.0, 1.0, 2.5][idx % 3];
            AmbientSpec::Product { k, mu }
        };
        let options = RandomOptions {
            ambient,
            ..RandomOptions::default()
        };
        let scenario = gen_random_instance(n, idx as u64, &options).unwrap();
        out.push(scenario.resolve(&tol).unwrap());
    }
    out
}

fn suite_phi_psi() -> SuiteOutcome {
    let mut checks = Vec::new();
    let space = AmbientSpace::standard(2).unwrap();
    let g = space.metric();
    let j = space.complex_structure();

    let phi_g = phi(g, g).unwrap();
    checks.push(at_most(
        "phi(g)(e1,e2,e2,e1) = 2 on the identity metric",
        (phi_g.get(0, 1, 1, 0) - 2.0).abs(),
        0.0,
    ));
    let psi_g = psi(g, j, g).unwrap();
    checks.push(at_most(
        "psi(g)(e1,e2,e2,e1) = 0 for Je1 orthogonal to the plane",
        psi_g.get(0, 1, 1, 0).abs(),
        0.0,
    ));
    // Je1 = e3 in the standard space (0-based index 2).
    checks.push(at_most(
        "psi(g)(e1,Je1,Je1,e1) = 6",
        (psi_g.get(0, 2, 2, 0) - 6.0).abs(),
        0.0,
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut lin_defect: f64 = 0.0;
    let mut cl_defect: f64 = 0.0;
    for _ in 0..20 {
        let n = if rng.gen_bool(0.5) { 2 } else { 3 };
        let space = AmbientSpace::standard(n).unwrap();
        let g = space.metric();
        let j = space.complex_structure();
        let q1 = oracle::random_symmetric(2 * n, &mut rng);
        let q2 = oracle::random_symmetric(2 * n, &mut rng);
        let a = rng.gen_range(-2.0..2.0);
        let b = rng.gen_range(-2.0..2.0);
        let combo = q1.scale(a).add_scaled(b, &q2);
        let lhs_phi = phi(g, &combo).unwrap();
        let rhs_phi = phi(g, &q1)
            .unwrap()
            .scale(a)
            .add_scaled(b, &phi(g, &q2).unwrap());
        lin_defect = lin_defect.max(lhs_phi.sub(&rhs_phi).defect_norm());
        let lhs_psi = psi(g, j, &combo).unwrap();
        let rhs_psi = psi(g, j, &q1)
            .unwrap()
            .scale(a)
            .add_scaled(b, &psi(g, j, &q2).unwrap());
        lin_defect = lin_defect.max(lhs_psi.sub(&rhs_psi).defect_norm());

        let qj = oracle::random_j_invariant(&space, &mut rng);
        let sum = phi(g, &qj)
            .unwrap()
            .add_scaled(1.0, &psi(g, j, &qj).unwrap());
        cl_defect = cl_defect.max(sum.curvature_defects().max());
    }
    checks.push(at_most("linearity of phi and psi", lin_defect, 1e-14));
    checks.push(at_most(
        "(phi+psi)(Q) curvature-like for J-invariant Q",
        cl_defect,
        1e-12,
    ));
    outcome("phi-psi", checks)
}

fn suite_eigensolver() -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut rec_defect: f64 = 0.0;
    let mut orth_defect: f64 = 0.0;
    for n in [2usize, 3, 5, 8, 12] {
        for _ in 0..4 {
            let s = oracle::random_symmetric(n, &mut rng);
            let spec = sym_eigen(&s, 1e-12).unwrap();
            let e = &spec.eigenvectors;
            for r in 0..n {
                for c in 0..n {
                    let rec: f64 = (0..n)
                        .map(|i| e.get(r, i) * spec.eigenvalues[i] * e.get(c, i))
                        .sum();
                    rec_defect = rec_defect.max((rec - s.get(r, c)).abs());
                }
            }
            let gram = e.transpose().mul(e).sub(&Matrix::identity(n));
            orth_defect = orth_defect.max(gram.defect_norm());
        }
    }
    outcome(
        "eigensolver",
        vec![
            at_most("reconstruction E L E^T = S", rec_defect, 1e-10),
            at_most("eigenvector orthonormality", orth_defect, 1e-12),
        ],
    )
}

fn suite_factor_sum_oracle(flip_cross_sign: bool) -> SuiteOutcome {
    let mut checks = Vec::new();
    let candidate_sign = if flip_cross_sign {
        CrossTermSign::Minus
    } else {
        CrossTermSign::Plus
    };
    let mut match_defect: f64 = 0.0;
    let mut control_min = f64::INFINITY;
    let mut control_bound = f64::INFINITY;
    for (n, k, mu) in grid() {
        let model = ProductModel::new(n, k, mu).unwrap();
        let direct = direct_sum_curvature(n, k, mu).unwrap();
        let cand = product_curvature_tensor(&model, candidate_sign);
        match_defect = match_defect.max(cand.sub(direct.r()).defect_norm());
        let flipped = product_curvature_tensor(&model, CrossTermSign::Minus);
        let control = flipped.sub(direct.r()).defect_norm();
        control_min = control_min.min(control);
        control_bound = control_bound.min(0.1 * mu.abs());
    }
    checks.push(at_most(
        "ten-term bracket equals the factor-sum tensor",
        match_defect,
        1e-12,
    ));
    checks.push(at_least(
        "flipped cross term misses the oracle (negative control)",
        control_min,
        control_bound,
    ));
    outcome("factor-sum-oracle", checks)
}

fn suite_bochner() -> SuiteOutcome {
    let mut checks = Vec::new();
    let mut vanish: f64 = 0.0;
    for (n, k, mu) in grid() {
        let direct = direct_sum_curvature(n, k, mu).unwrap();
        vanish = vanish.max(bochner(&direct).unwrap().defect_norm());
        let model = ProductModel::new(n, k, mu).unwrap();
        let prod = product_curvature(&model).unwrap();
        vanish = vanish.max(bochner(&prod).unwrap().defect_norm());
    }
    checks.push(at_most(
        "Bochner tensor vanishes on factor-sum models",
        vanish,
        1e-10,
    ));

    let flat = KaehlerCurvature::flat(3).unwrap();
    checks.push(at_most(
        "Bochner of the flat space is zero",
        bochner(&flat).unwrap().defect_norm(),
        0.0,
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let mut trace_defect: f64 = 0.0;
    let mut idem_defect: f64 = 0.0;
    for case in 0..100 {
        let n = 2 + case % 3;
        let t = oracle::random_kaehler_tensor(n, &mut rng);
        let space = AmbientSpace::standard(n).unwrap();
        let kc = KaehlerCurvature::new(space.clone(), t).unwrap();
        let b = bochner(&kc).unwrap();
        let s = ricci(&b, space.metric()).unwrap();
        trace_defect = trace_defect.max(s.defect_norm());
        if case % 10 == 0 {
            let tau = scalar_curvature(&s, space.metric()).unwrap();
            let again = bochner_tensor(&b, &space, &s, tau).unwrap();
            idem_defect = idem_defect.max(again.sub(&b).defect_norm());
        }
    }
    checks.push(at_most(
        "Bochner output is Ricci-trace-free on random Kaehler tensors",
        trace_defect,
        1e-10,
    ));
    checks.push(at_most(
        "Bochner formula fixes trace-free tensors",
        idem_defect,
        1e-12,
    ));
    outcome("bochner", checks)
}

fn suite_calibration() -> SuiteOutcome {
    let mut checks = Vec::new();
    let mut hsc_defect: f64 = 0.0;
    let mut real_defect: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for mu in [-1.0, 1.0, 2.5] {
        for n in [2usize, 3, 4] {
            let model = ProductModel::single_factor(n, mu).unwrap();
            let kc = product_curvature(&model).unwrap();
            for _ in 0..4 {
                let x = Vector::new((0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect());
                let hsc = holomorphic_sectional(&kc, &x).unwrap();
                hsc_defect = hsc_defect.max((hsc - mu).abs());
            }
            // canonical totally real plane span(e_0, e_1)
            real_defect = real_defect.max((kc.r().get(0, 1, 1, 0) - mu / 4.0).abs());
        }
    }
    checks.push(at_most(
        "holomorphic sectional curvature equals mu on the single-factor model",
        hsc_defect,
        1e-12,
    ));
    checks.push(at_most(
        "totally real sectional curvature equals mu/4",
        real_defect,
        1e-12,
    ));

    let mut split_defect: f64 = 0.0;
    for mu in [-1.0, 2.0] {
        let kc = direct_sum_curvature(3, 2, mu).unwrap();
        let x1 = Vector::basis(6, 0);
        let x2 = Vector::basis(6, 2);
        split_defect = split_defect
            .max((holomorphic_sectional(&kc, &x1).unwrap() - mu).abs())
            .max((holomorphic_sectional(&kc, &x2).unwrap() + mu).abs());
    }
    checks.push(at_most(
        "factor holomorphic sectional curvatures are +mu and -mu",
        split_defect,
        1e-12,
    ));
    outcome("constant-curvature-calibration", checks)
}

fn suite_gauss_oracle() -> SuiteOutcome {
    let instances = instance_grid(200);
    let mut match_defect: f64 = 0.0;
    let mut validator_defect: f64 = 0.0;
    for inst in &instances {
        let direct = gauss_curvature(&inst.point).unwrap();
        let reference = oracle::gauss_naive(&inst.point);
        match_defect = match_defect.max(direct.sub(&reference).defect_norm());
        validator_defect = validator_defect.max(inst.geometry.r().curvature_defects().max());
    }
    outcome(
        "gauss-oracle",
        vec![
            at_most(
                "Gauss curvature matches the component-loop reference (200 instances)",
                match_defect,
                1e-14,
            ),
            at_most(
                "Gauss curvature passes the symmetry validator",
                validator_defect,
                1e-12,
            ),
        ],
    )
}

fn suite_dual_path() -> SuiteOutcome {
    let instances = instance_grid(200);
    let mut disagreement: f64 = 0.0;
    let mut nontrivial = 0usize;
    for inst in &instances {
        let sp = semiparallel_defect(&inst.point, &inst.geometry).unwrap();
        disagreement = disagreement.max((sp.via_operator_identity - sp.via_normal_curvature).abs());
        if sp.max() > 1e-6 {
            nontrivial += 1;
        }
    }
    outcome(
        "semiparallel-dual-path",
        vec![
            at_most(
                "operator-identity and normal-curvature paths agree (200 instances)",
                disagreement,
                1e-12,
            ),
            at_least(
                "generic instances have nonzero defect",
                nontrivial as f64,
                150.0,
            ),
        ],
    )
}

fn suite_quasi_einstein_forward() -> SuiteOutcome {
    let tol = Tolerances::default();
    let mut pair_max: f64 = 0.0;
    let mut sjh_max: f64 = 0.0;
    let mut mc_max: f64 = 0.0;
    let mut quasi_count = 0usize;
    let mut product_type_count = 0usize;
    for case in 0..100usize {
        let n = 4 + case % 3;
        let c = [1.0, -1.0, 2.0, -2.0][case % 4];
        let scenario = if case % 2 == 0 {
            gen_product_type_instance(n, c).unwrap()
        } else {
            let magnitude = 0.5 + 0.25 * (case % 7) as f64;
            gen_product_type_fixture(n, c, magnitude).unwrap()
        };
        let inst = scenario.resolve(&tol).unwrap();
        let prop = quasi_einstein_residuals(&inst, &tol).unwrap();
        pair_max = pair_max.max(prop.max_pair_residual);
        sjh_max = sjh_max.max(prop.s_jh_jh.abs());
        mc_max = mc_max.max(crate::submanifold::mean_curvature_semiparallel_defect(
            &inst.geometry,
        ));
        if prop.quasi_einstein {
            quasi_count += 1;
        }
        let verdict =
            classify_intrinsic_structure(&inst, ClassifyMode::MeanCurvatureSemiparallel, &tol)
                .unwrap();
        if let Conclusion::ProductType { c: found } = verdict.conclusion {
            if (found - c).abs() <= 1e-8 {
                product_type_count += 1;
            }
        }
    }
    let mut violation_count = 0usize;
    for case in 0..100usize {
        let n = 4 + case % 3;
        let scenario = gen_distinct_spectrum_fixture(n, 1000 + case as u64).unwrap();
        let inst = scenario.resolve(&tol).unwrap();
        let verdict =
            classify_intrinsic_structure(&inst, ClassifyMode::MeanCurvatureSemiparallel, &tol)
                .unwrap();
        if verdict.conclusion == Conclusion::HypothesisViolation {
            violation_count += 1;
        }
    }
    outcome(
        "quasi-einstein-forward",
        vec![
            at_most(
                "pair residuals on 100 conforming instances",
                pair_max,
                1e-10,
            ),
            at_most("S(JH,JH) on conforming instances", sjh_max, 1e-10),
            at_most("mean-curvature semiparallel defect", mc_max, 1e-10),
            at_least("quasi-Einstein verdicts", quasi_count as f64, 100.0),
            at_least(
                "PRODUCT_TYPE classifications with recovered c",
                product_type_count as f64,
                100.0,
            ),
            at_least(
                "violating fixtures flagged HYPOTHESIS_VIOLATION",
                violation_count as f64,
                100.0,
            ),
        ],
    )
}

fn suite_weyl() -> SuiteOutcome {
    let mut const_defect: f64 = 0.0;
    let mut product_defect: f64 = 0.0;
    for n in [4usize, 5, 6] {
        for c in [1.0, -1.0] {
            let id = Bilinear::identity(n);
            let r = phi(&id, &id).unwrap().scale(c / 2.0);
            let s = oracle::ricci_naive(&r);
            let tau = s.trace();
            const_defect = const_defect.max(weyl_of(&r, &s, tau).unwrap().defect_norm());

            let mut fixture = QuadTensor::zeros(n);
            for i in 1..n {
                for j in 1..n {
                    for k in 1..n {
                        for l in 1..n {
                            let v = c * (delta(i, l) * delta(j, k) - delta(i, k) * delta(j, l));
                            if v != 0.0 {
                                fixture.set(i, j, k, l, v);
                            }
                        }
                    }
                }
            }
            let fixture = fixture.into_curvature_like(1e-12).unwrap();
            let s = oracle::ricci_naive(&fixture);
            let tau = s.trace();
            product_defect = product_defect.max(weyl_of(&fixture, &s, tau).unwrap().defect_norm());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let mut trace_defect: f64 = 0.0;
    for case in 0..60 {
        let n = 4 + case % 3;
        let r = oracle::random_curvature_like(n, &mut rng);
        let s = oracle::ricci_naive(&r);
        let tau = s.trace();
        let c = weyl_of(&r, &s, tau).unwrap();
        trace_defect = trace_defect.max(oracle::ricci_naive(&c).defect_norm());
    }
    outcome(
        "weyl",
        vec![
            at_most(
                "Weyl vanishes on constant-curvature fixtures",
                const_defect,
                1e-10,
            ),
            at_most(
                "Weyl vanishes on constant-curvature-times-segment fixtures",
                product_defect,
                1e-10,
            ),
            at_most(
                "Weyl output is trace-free on random inputs",
                trace_defect,
                1e-10,
            ),
        ],
    )
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn suite_product_splitting() -> SuiteOutcome {
    let tol = Tolerances::default();
    let mut split_count = 0usize;
    let mut expected = 0usize;
    let mut c1_defect: f64 = 0.0;
    let mut c2_defect: f64 = 0.0;
    let mut commutator: f64 = 0.0;
    let mut triple: f64 = 0.0;
    let mut weyl_defect: f64 = 0.0;
    for (n, k, mu) in grid() {
        if n <= 3 {
            continue;
        }
        expected += 1;
        let scenario = gen_totally_geodesic_product(n, k, mu).unwrap();
        let inst = scenario.resolve(&tol).unwrap();
        let verdict = classify_product_splitting(&inst, &tol).unwrap();
        if let Conclusion::ProductSplit { c1, c2, k: found } = verdict.conclusion {
            if found == k {
                split_count += 1;
            }
            c1_defect = c1_defect.max((c1 - mu / 4.0).abs());
            if let Some(c2) = c2 {
                c2_defect = c2_defect.max((c2 + mu / 4.0).abs());
            }
        }
        commutator = commutator.max(verdict.residuals["commutator_defect"][0]);
        triple = triple.max(verdict.residuals["orthogonal_triple_residual"][0]);
        weyl_defect = weyl_defect.max(verdict.residuals["weyl_defect"][0]);
    }
    outcome(
        "product-splitting",
        vec![
            at_least(
                "PRODUCT_SPLIT verdicts over the model grid",
                split_count as f64,
                expected as f64,
            ),
            at_most("first factor curvature vs mu/4", c1_defect, 1e-10),
            at_most("second factor curvature vs -mu/4", c2_defect, 1e-10),
            at_most("commutativity defect", commutator, 0.0),
            at_most("orthogonal-triple identity residual", triple, 1e-10),
            at_most("Weyl defect of the split instances", weyl_defect, 1e-9),
        ],
    )
}
