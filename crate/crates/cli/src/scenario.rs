//! The scenario file format: strict TOML with 1-based indices.
//!
//! ```toml
//! version = 1
//! name = "totally geodesic product"
//! frame = "canonical"
//!
//! [ambient]
//! kind = "product"     # flat | product | constant_hsc
//! n = 5
//! k = 4                # product only
//! mu = 2.0             # product and constant_hsc
//!
//! [[h]]
//! indices = [1, 1, 1]  # h[k][i][j], 1-based; symmetry closure applied
//! value = 0.5
//! ```
//!
//! Unknown fields are rejected, `version` must equal 1, and duplicate `h`
//! entries naming the same index orbit must agree exactly.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use kaehlerlab::classify::{
    AmbientSpec, CubicEntry, FrameSpec, QuadEntry, Scenario, ToleranceOverrides,
};

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub frame: FrameField,
    pub ambient: AmbientSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub h: Vec<CubicEntryLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<FixtureSection>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum FrameField {
    Named(String),
    Rows(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AmbientSection {
    pub kind: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub internal: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CubicEntryLine {
    /// 1-based [k, i, j].
    pub indices: [usize; 3],
    pub value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FixtureSection {
    pub r: Vec<QuadEntryLine>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QuadEntryLine {
    /// 1-based [a, b, c, d].
    pub indices: [usize; 4],
    pub value: f64,
}

/// Parses the strict scenario document, reporting parse errors with their
/// location and semantic errors with the offending field.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| anyhow!("parse error: {e}"))?;
    file_to_scenario(&file)
}

fn index_to_zero_based(idx: usize, n: usize, what: &str) -> Result<usize> {
    if idx < 1 || idx > n {
        bail!("{what} index {idx} out of range 1..={n}");
    }
    Ok(idx - 1)
}

pub fn file_to_scenario(file: &ScenarioFile) -> Result<Scenario> {
    if file.version != SCENARIO_VERSION {
        bail!(
            "unsupported scenario version {} (expected {SCENARIO_VERSION})",
            file.version
        );
    }
    let n = file.ambient.n;
    if !(1..=12).contains(&n) {
        bail!("ambient.n = {n} out of range 1..=12");
    }
    let ambient = match file.ambient.kind.as_str() {
        "flat" => {
            if file.ambient.k.is_some() || file.ambient.mu.is_some() {
                bail!("ambient.kind = \"flat\" takes no k or mu");
            }
            AmbientSpec::Flat
        }
        "constant_hsc" => {
            if file.ambient.k.is_some() {
                bail!("ambient.kind = \"constant_hsc\" takes no k");
            }
            let mu = file
                .ambient
                .mu
                .ok_or_else(|| anyhow!("ambient.kind = \"constant_hsc\" requires mu"))?;
            AmbientSpec::ConstantHsc { mu }
        }
        "product" => {
            let k = file
                .ambient
                .k
                .ok_or_else(|| anyhow!("ambient.kind = \"product\" requires k"))?;
            let mu = file
                .ambient
                .mu
                .ok_or_else(|| anyhow!("ambient.kind = \"product\" requires mu"))?;
            if k < 1 || k >= n {
                bail!("ambient.k = {k} out of range 1..={} for n = {n}", n - 1);
            }
            AmbientSpec::Product { k, mu }
        }
        other => bail!("unknown ambient.kind \"{other}\" (expected flat | product | constant_hsc)"),
    };

    let frame = match &file.frame {
        FrameField::Named(name) if name == "canonical" => FrameSpec::Canonical,
        FrameField::Named(other) => {
            bail!("unknown frame \"{other}\" (expected \"canonical\" or explicit rows)")
        }
        FrameField::Rows(rows) => {
            if rows.len() != n {
                bail!("frame has {} rows, expected n = {n}", rows.len());
            }
            for (i, row) in rows.iter().enumerate() {
                if row.len() != 2 * n {
                    bail!(
                        "frame row {} has {} coordinates, expected 2n = {}",
                        i + 1,
                        row.len(),
                        2 * n
                    );
                }
            }
            FrameSpec::Explicit(rows.clone())
        }
    };

    // duplicate orbits must agree exactly; report the triple 1-based
    let mut h_entries = Vec::with_capacity(file.h.len());
    let mut seen: Vec<(usize, usize, usize, f64)> = Vec::new();
    for line in &file.h {
        let [k, i, j] = line.indices;
        let (k0, i0, j0) = (
            index_to_zero_based(k, n, "h")?,
            index_to_zero_based(i, n, "h")?,
            index_to_zero_based(j, n, "h")?,
        );
        let mut key = [k0, i0, j0];
        key.sort_unstable();
        if let Some(&(a, b, c, v)) = seen.iter().find(|&&(a, b, c, _)| [a, b, c] == key) {
            if v != line.value {
                bail!(
                    "conflicting h entries for the index orbit of ({}, {}, {}): {} vs {}",
                    a + 1,
                    b + 1,
                    c + 1,
                    v,
                    line.value
                );
            }
            continue;
        }
        seen.push((key[0], key[1], key[2], line.value));
        h_entries.push(CubicEntry {
            k: k0,
            i: i0,
            j: j0,
            value: line.value,
        });
    }

    let fixture_r = match &file.fixture {
        None => None,
        Some(section) => {
            let mut entries = Vec::with_capacity(section.r.len());
            for line in &section.r {
                let [a, b, c, d] = line.indices;
                entries.push(QuadEntry {
                    a: index_to_zero_based(a, n, "fixture.r")?,
                    b: index_to_zero_based(b, n, "fixture.r")?,
                    c: index_to_zero_based(c, n, "fixture.r")?,
                    d: index_to_zero_based(d, n, "fixture.r")?,
                    value: line.value,
                });
            }
            Some(entries)
        }
    };

    Ok(Scenario {
        name: file.name.clone(),
        n,
        ambient,
        frame,
        h_entries,
        fixture_r,
        tolerances: ToleranceOverrides {
            gate: file.tolerances.as_ref().and_then(|t| t.gate),
            internal: file.tolerances.as_ref().and_then(|t| t.internal),
        },
        seed: file.seed,
    })
}

pub fn scenario_to_file(scenario: &Scenario) -> ScenarioFile {
    let ambient = match &scenario.ambient {
        AmbientSpec::Flat => AmbientSection {
            kind: "flat".to_string(),
            n: scenario.n,
            k: None,
            mu: None,
        },
        AmbientSpec::ConstantHsc { mu } => AmbientSection {
            kind: "constant_hsc".to_string(),
            n: scenario.n,
            k: None,
            mu: Some(*mu),
        },
        AmbientSpec::Product { k, mu } => AmbientSection {
            kind: "product".to_string(),
            n: scenario.n,
            k: Some(*k),
            mu: Some(*mu),
        },
    };
    let frame = match &scenario.frame {
        FrameSpec::Canonical => FrameField::Named("canonical".to_string()),
        FrameSpec::Explicit(rows) => FrameField::Rows(rows.clone()),
    };
    let h = scenario
        .h_entries
        .iter()
        .map(|e| CubicEntryLine {
            indices: [e.k + 1, e.i + 1, e.j + 1],
            value: e.value,
        })
        .collect();
    let fixture = scenario.fixture_r.as_ref().map(|entries| FixtureSection {
        r: entries
            .iter()
            .map(|e| QuadEntryLine {
                indices: [e.a + 1, e.b + 1, e.c + 1, e.d + 1],
                value: e.value,
            })
            .collect(),
    });
    let tolerances = if scenario.tolerances.gate.is_some() || scenario.tolerances.internal.is_some()
    {
        Some(ToleranceSection {
            gate: scenario.tolerances.gate,
            internal: scenario.tolerances.internal,
        })
    } else {
        None
    };
    ScenarioFile {
        version: SCENARIO_VERSION,
        name: scenario.name.clone(),
        seed: scenario.seed,
        frame,
        ambient,
        tolerances,
        h,
        fixture,
    }
}

pub fn render_scenario(scenario: &Scenario) -> Result<String> {
    toml::to_string(&scenario_to_file(scenario)).context("serializing scenario")
}
