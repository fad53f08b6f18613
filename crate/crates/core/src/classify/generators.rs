//! Deterministic scenario generators for the classifier and the self-test
//! suites. All randomness flows through a seeded ChaCha stream, so the same
//! seed always produces the same scenario.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AmbientSpec, CubicEntry, FrameSpec, QuadEntry, Scenario, ToleranceOverrides};
use crate::error::{GeomError, Result};
use crate::submanifold::conformally_flat_from_ricci;
use crate::tensor::{curvature_entries, Bilinear, QuadTensor, SymmetricCubic};

fn scenario(
    name: String,
    n: usize,
    ambient: AmbientSpec,
    h_entries: Vec<CubicEntry>,
    fixture_r: Option<Vec<QuadEntry>>,
    seed: Option<u64>,
) -> Scenario {
    Scenario {
        name,
        n,
        ambient,
        frame: FrameSpec::Canonical,
        h_entries,
        fixture_r,
        tolerances: ToleranceOverrides::default(),
        seed,
    }
}

fn check_n(n: usize, what: &str) -> Result<()> {
    if !(4..=12).contains(&n) {
        return Err(GeomError::InvalidParameter {
            what: format!("{what} requires 4 <= n <= 12 (got {n})"),
        });
    }
    Ok(())
}

/// Flat ambient with commuting (simultaneously diagonal) shape operators:
/// the Gauss equation gives R = 0 while the point stays neither minimal nor
/// totally geodesic.
pub fn gen_flat(n: usize, seed: u64) -> Result<Scenario> {
    check_n(n, "flat generator")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = Vec::with_capacity(n);
    for k in 0..n {
        let magnitude = 0.5 + rng.gen_range(0.0..1.0);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        h.push(CubicEntry {
            k,
            i: k,
            j: k,
            value: sign * magnitude,
        });
    }
    Ok(scenario(
        format!("flat n={n} seed={seed}"),
        n,
        AmbientSpec::Flat,
        h,
        None,
        Some(seed),
    ))
}

/// The second fundamental form pattern h[0][0][0] = beta, h[0][i][i] = alpha
/// (all else by symmetry closure). Its mean curvature satisfies JH ∝ e_0 and
/// the pattern is semiparallel against any curvature that is constant on
/// span(e_1..e_{n-1}) and zero on slots containing e_0.
fn ridge_cubic_entries(n: usize, alpha: f64, beta: f64) -> Vec<CubicEntry> {
    let mut h = vec![CubicEntry {
        k: 0,
        i: 0,
        j: 0,
        value: beta,
    }];
    for i in 1..n {
        h.push(CubicEntry {
            k: 0,
            i,
            j: i,
            value: alpha,
        });
    }
    h
}

/// Curvature fixture: constant curvature c on span(e_1..e_{n-1}), zero on
/// any slot containing e_0. Ricci spectrum {0, (n-2)c x (n-1)}.
fn product_type_fixture_entries(n: usize, c: f64) -> Vec<QuadEntry> {
    let mut entries = Vec::new();
    for i in 1..n {
        for j in i + 1..n {
            entries.push(QuadEntry {
                a: i,
                b: j,
                c: j,
                d: i,
                value: c,
            });
        }
    }
    entries
}

/// Realizes the spectrum {0, (n-2)c x (n-1)} with JH along the zero
/// eigenvector.
///
/// For c > 0 it is a genuine Gauss-equation instance over a flat ambient:
/// the commutators of the ridge pattern with alpha = sqrt(c) synthesize
/// exactly the wanted curvature. For c < 0 no real alpha exists and the
/// curvature is supplied as a flagged fixture. c = 0 degenerates to the flat
/// generator.
pub fn gen_product_type_instance(n: usize, c: f64) -> Result<Scenario> {
    check_n(n, "product-type generator")?;
    if c == 0.0 {
        return gen_flat(n, 0);
    }
    if c > 0.0 {
        let alpha = c.sqrt();
        Ok(scenario(
            format!("product-type n={n} c={c}"),
            n,
            AmbientSpec::Flat,
            ridge_cubic_entries(n, alpha, alpha),
            None,
            None,
        ))
    } else {
        gen_product_type_fixture(n, c, (-c).sqrt())
    }
}

/// Fixture variant of [`gen_product_type_instance`] with a configurable
/// mean-curvature magnitude |JH| = jh_magnitude.
pub fn gen_product_type_fixture(n: usize, c: f64, jh_magnitude: f64) -> Result<Scenario> {
    check_n(n, "product-type fixture generator")?;
    if c == 0.0 || jh_magnitude <= 0.0 {
        return Err(GeomError::InvalidParameter {
            what: format!("product-type fixture requires c != 0 and jh_magnitude > 0 (got c={c}, jh={jh_magnitude})"),
        });
    }
    Ok(scenario(
        format!("product-type-fixture n={n} c={c} jh={jh_magnitude}"),
        n,
        AmbientSpec::Flat,
        ridge_cubic_entries(n, jh_magnitude, jh_magnitude),
        Some(product_type_fixture_entries(n, c)),
        None,
    ))
}

/// Fixture whose spectrum has a single zero eigenvalue at e_0 and whose
/// second fundamental form has nonzero components g(A_{Je_i} e_i, e_0)
/// (gate entries), with distinct diagonal gate beta at e_0. Semiparallel and
/// conformally flat by construction, so the gate implications fire.
pub fn gen_spectrum_gate_instance(n: usize, c: f64, alpha: f64, beta: f64) -> Result<Scenario> {
    check_n(n, "spectrum-gate generator")?;
    if c == 0.0 || alpha == 0.0 {
        return Err(GeomError::InvalidParameter {
            what: "spectrum-gate instance requires c != 0 and alpha != 0".to_string(),
        });
    }
    Ok(scenario(
        format!("spectrum-gate n={n} c={c} alpha={alpha} beta={beta}"),
        n,
        AmbientSpec::Flat,
        ridge_cubic_entries(n, alpha, beta),
        Some(product_type_fixture_entries(n, c)),
        None,
    ))
}

/// Conformally flat fixture with pairwise distinct Ricci eigenvalues and a
/// generic mean curvature direction: such a point cannot have a semiparallel
/// mean curvature vector, so classification must flag a hypothesis violation.
pub fn gen_distinct_spectrum_fixture(n: usize, seed: u64) -> Result<Scenario> {
    check_n(n, "distinct-spectrum generator")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Bilinear::zeros(n);
    for i in 0..n {
        s.set_sym(i, i, (i + 1) as f64 + 0.1 * rng.gen_range(0.0..1.0));
    }
    let r = conformally_flat_from_ricci(&s)?;
    let fixture = quad_entries(&r);

    // Random symmetric cubic with every trace bounded away from zero, so the
    // mean curvature direction is generic.
    let mut cubic = SymmetricCubic::zeros(n);
    for k in 0..n {
        for i in k..n {
            for j in i..n {
                cubic.set_orbit(k, i, j, rng.gen_range(-1.0..1.0));
            }
        }
    }
    // h[k][k][k] is the only entry of trace_k it alone controls; push each
    // trace away from zero so no JH component degenerates.
    let traces = cubic.trace_vector();
    for k in 0..n {
        if traces[k].abs() < 0.5 {
            let target = if traces[k] >= 0.0 { 0.75 } else { -0.75 };
            cubic.set_orbit(k, k, k, cubic.get(k, k, k) + target - traces[k]);
        }
    }
    let h_entries = cubic_entries(&cubic);
    Ok(scenario(
        format!("distinct-spectrum n={n} seed={seed}"),
        n,
        AmbientSpec::Flat,
        h_entries,
        Some(fixture),
        Some(seed),
    ))
}

/// Totally geodesic point of a product model, frame split as k first-factor
/// and n-k second-factor totally real directions, h = 0.
pub fn gen_totally_geodesic_product(n: usize, k: usize, mu: f64) -> Result<Scenario> {
    if !(2..=12).contains(&n) {
        return Err(GeomError::InvalidParameter {
            what: format!("totally geodesic product requires 2 <= n <= 12 (got {n})"),
        });
    }
    if k < 1 || k >= n {
        return Err(GeomError::InvalidParameter {
            what: format!("factor dimension k = {k} must satisfy 1 <= k <= n-1 (n = {n})"),
        });
    }
    if mu == 0.0 {
        return Err(GeomError::InvalidParameter {
            what: "totally geodesic product requires mu != 0".to_string(),
        });
    }
    Ok(scenario(
        format!("totally-geodesic-product n={n} k={k} mu={mu}"),
        n,
        AmbientSpec::Product { k, mu },
        Vec::new(),
        None,
        None,
    ))
}

/// Options for [`gen_random_instance`].
#[derive(Clone, Debug)]
pub struct RandomOptions {
    pub ambient: AmbientSpec,
    /// Remove all traces of h, forcing H = 0 (a minimal point).
    pub traceless: bool,
    /// Keep only h[k][k][k] entries, making all shape operators diagonal.
    pub commuting: bool,
    /// Magnitude of the h entries.
    pub scale: f64,
}

impl Default for RandomOptions {
    fn default() -> Self {
        RandomOptions {
            ambient: AmbientSpec::Flat,
            traceless: false,
            commuting: false,
            scale: 1.0,
        }
    }
}

/// Deterministic pseudo-random instance: fully symmetric h with entries
/// uniform in [-scale, scale], one draw per sorted index triple.
pub fn gen_random_instance(n: usize, seed: u64, options: &RandomOptions) -> Result<Scenario> {
    if !(2..=12).contains(&n) {
        return Err(GeomError::InvalidParameter {
            what: format!("random generator requires 2 <= n <= 12 (got {n})"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cubic = SymmetricCubic::zeros(n);
    if options.commuting {
        for k in 0..n {
            cubic.set_orbit(k, k, k, options.scale * rng.gen_range(-1.0..1.0));
        }
    } else {
        for k in 0..n {
            for i in k..n {
                for j in i..n {
                    cubic.set_orbit(k, i, j, options.scale * rng.gen_range(-1.0..1.0));
                }
            }
        }
    }
    if options.traceless {
        cubic = remove_traces(&cubic);
    }
    Ok(scenario(
        format!("random n={n} seed={seed}"),
        n,
        options.ambient.clone(),
        cubic_entries(&cubic),
        None,
        Some(seed),
    ))
}

/// Projects a fully symmetric cubic onto its trace-free part:
/// h'[k][i][j] = h[k][i][j] - (a_k d_ij + a_i d_jk + a_j d_ki) with
/// a_m = trace_m / (n + 2).
fn remove_traces(h: &SymmetricCubic) -> SymmetricCubic {
    let n = h.dim();
    let a: Vec<f64> = h
        .trace_vector()
        .iter()
        .map(|t| t / (n as f64 + 2.0))
        .collect();
    let mut out = SymmetricCubic::zeros(n);
    for k in 0..n {
        for i in k..n {
            for j in i..n {
                let mut v = h.get(k, i, j);
                if i == j {
                    v -= a[k];
                }
                if j == k {
                    v -= a[i];
                }
                if k == i {
                    v -= a[j];
                }
                out.set_orbit(k, i, j, v);
            }
        }
    }
    out
}

/// Sparse entry list (sorted triples) of a symmetric cubic.
pub fn cubic_entries(h: &SymmetricCubic) -> Vec<CubicEntry> {
    let n = h.dim();
    let mut out = Vec::new();
    for k in 0..n {
        for i in k..n {
            for j in i..n {
                let v = h.get(k, i, j);
                if v != 0.0 {
                    out.push(CubicEntry { k, i, j, value: v });
                }
            }
        }
    }
    out
}

/// Canonical nonzero entries of a curvature tensor as fixture entries.
pub fn quad_entries(r: &QuadTensor) -> Vec<QuadEntry> {
    curvature_entries(r)
        .into_iter()
        .map(|(a, b, c, d, value)| QuadEntry { a, b, c, d, value })
        .collect()
}
