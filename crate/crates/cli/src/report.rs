//! Report documents: a stable machine-readable JSON form (fixed field order,
//! shortest round-trip float formatting) and a human-readable text form.

use std::collections::BTreeMap;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use kaehlerlab::classify::{Conclusion, Verdict};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HypothesisLine {
    pub name: String,
    pub holds: bool,
    pub defect: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VerdictSection {
    pub conclusion: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub note: String,
}

/// The full classification record. `duration_ms` is informational; every
/// other field is deterministic for a given scenario and tool version.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub tool: String,
    pub scenario: String,
    pub scenario_hash: String,
    pub mode: String,
    pub fixture: bool,
    pub hypotheses: Vec<HypothesisLine>,
    pub verdict: VerdictSection,
    pub spectrum: Vec<f64>,
    pub residuals: BTreeMap<String, Vec<f64>>,
    pub duration_ms: u64,
}

pub fn tool_version() -> String {
    format!("kaehlerlab {}", env!("CARGO_PKG_VERSION"))
}

/// First 16 hex characters of the SHA-256 of the scenario document.
pub fn scenario_hash(input: &[u8]) -> String {
    let digest = Sha256::digest(input);
    let mut out = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

pub fn from_verdict(
    verdict: &Verdict,
    scenario_name: &str,
    hash: String,
    duration_ms: u64,
) -> ReportDocument {
    let (c, c1, c2, k) = match verdict.conclusion {
        Conclusion::ProductType { c } => (Some(c), None, None, None),
        Conclusion::ProductSplit { c1, c2, k } => (None, Some(c1), c2, Some(k)),
        _ => (None, None, None, None),
    };
    ReportDocument {
        tool: tool_version(),
        scenario: scenario_name.to_string(),
        scenario_hash: hash,
        mode: verdict.mode.to_string(),
        fixture: verdict.fixture,
        hypotheses: verdict
            .flags
            .rows()
            .iter()
            .map(|(name, flag)| HypothesisLine {
                name: name.to_string(),
                holds: flag.holds,
                defect: flag.defect,
            })
            .collect(),
        verdict: VerdictSection {
            conclusion: verdict.conclusion.label().to_string(),
            c,
            c1,
            c2,
            k,
            note: verdict.note.clone(),
        },
        spectrum: verdict.spectrum.clone(),
        residuals: verdict.residuals.clone(),
        duration_ms,
    }
}

pub fn to_json(report: &ReportDocument) -> Result<String> {
    serde_json::to_string_pretty(report).context("serializing report")
}

pub fn from_json(text: &str) -> Result<ReportDocument> {
    serde_json::from_str(text).context("parsing report")
}

pub fn render_text(report: &ReportDocument) -> String {
    let mut out = String::new();
    out.push_str(&format!("scenario: {}\n", report.scenario));
    out.push_str(&format!("hash: {}\n", report.scenario_hash));
    out.push_str(&format!("mode: {}\n", report.mode));
    out.push_str(&format!("fixture: {}\n", report.fixture));
    out.push_str("hypotheses:\n");
    for line in &report.hypotheses {
        out.push_str(&format!(
            "  {:<18} {:<8} defect {:.3e}\n",
            line.name,
            if line.holds { "holds" } else { "fails" },
            line.defect
        ));
    }
    let mut verdict = format!("verdict: {}", report.verdict.conclusion);
    if let Some(c) = report.verdict.c {
        verdict.push_str(&format!(" (c = {c})"));
    }
    if let Some(c1) = report.verdict.c1 {
        verdict.push_str(&format!(" (c1 = {c1}"));
        if let Some(c2) = report.verdict.c2 {
            verdict.push_str(&format!(", c2 = {c2}"));
        }
        if let Some(k) = report.verdict.k {
            verdict.push_str(&format!(", k = {k}"));
        }
        verdict.push(')');
    }
    out.push_str(&verdict);
    out.push('\n');
    out.push_str(&format!("note: {}\n", report.verdict.note));
    let spectrum: Vec<String> = report.spectrum.iter().map(|x| format!("{x:.6e}")).collect();
    out.push_str(&format!("spectrum: [{}]\n", spectrum.join(", ")));
    out.push_str("residuals:\n");
    for (name, values) in &report.residuals {
        if values.len() <= 4 {
            let rendered: Vec<String> = values.iter().map(|x| format!("{x:.3e}")).collect();
            out.push_str(&format!("  {:<28} {}\n", name, rendered.join(", ")));
        } else {
            let max = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            out.push_str(&format!(
                "  {:<28} max-abs {:.3e} ({} values)\n",
                name,
                max,
                values.len()
            ));
        }
    }
    out.push_str(&format!("duration: {} ms\n", report.duration_ms));
    out.push_str(&format!("tool: {}\n", report.tool));
    out
}
