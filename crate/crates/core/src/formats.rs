//! The `.model` document format and the analysis report.
//!
//! Documents are JSON with a fixed shape: a scenario block, a semiring
//! name, and sparse per-context tables keyed by context label (measurement
//! names joined by commas, sorted) and event key (single-character
//! outcome labels concatenated in the same order). Values are `"0"`/`"1"`
//! for Boolean tables and exact `"p/q"` strings otherwise. Omitted
//! events carry weight zero. Reports serialize to JSON and render to a
//! diff-stable plain-text table.

use crate::analysis::{ContextualityVerdict, FractionResult};
use crate::model::{DisturbanceWitness, EmpiricalModel, ModelError};
use crate::obstruction::Verdict;
use crate::scenario::{Scenario, ScenarioError};
use crate::semiring::{Semiring, SemiringError, Value};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format marker `{0}` (expected `{FORMAT_MARKER}`)")]
    BadFormatMarker(String),
    #[error("outcome label `{0}` must be a single character")]
    MultiCharOutcome(String),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub const FORMAT_MARKER: &str = "rctx-model/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioDoc {
    pub measurements: Vec<String>,
    pub contexts: Vec<Vec<String>>,
    pub outcomes: BTreeMap<String, Vec<String>>,
}

/// The on-disk shape of a model file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub semiring: String,
    pub scenario: ScenarioDoc,
    pub tables: BTreeMap<String, BTreeMap<String, String>>,
}

/// Parses and validates a model document, returning both the document
/// and the constructed model.
pub fn parse_model(text: &str) -> Result<(ModelDocument, EmpiricalModel), FormatError> {
    let doc: ModelDocument =
        serde_json::from_str(text).map_err(|e| FormatError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    let model = build_model(&doc)?;
    Ok((doc, model))
}

/// Builds the model a document describes.
pub fn build_model(doc: &ModelDocument) -> Result<EmpiricalModel, FormatError> {
    if doc.format != FORMAT_MARKER {
        return Err(FormatError::BadFormatMarker(doc.format.clone()));
    }
    for labels in doc.scenario.outcomes.values() {
        for label in labels {
            if label.chars().count() != 1 {
                return Err(FormatError::MultiCharOutcome(label.clone()));
            }
        }
    }
    let semiring = Semiring::from_name(&doc.semiring)?;
    let scenario = Scenario::new(
        doc.scenario.measurements.clone(),
        doc.scenario.contexts.clone(),
        doc.scenario.outcomes.clone(),
    )?;
    let mut keyed: BTreeMap<String, BTreeMap<String, Value>> = BTreeMap::new();
    for (context, events) in &doc.tables {
        let mut parsed = BTreeMap::new();
        for (key, text) in events {
            parsed.insert(key.clone(), semiring.parse(text)?);
        }
        keyed.insert(context.clone(), parsed);
    }
    Ok(EmpiricalModel::from_keyed_tables(scenario, semiring, &keyed)?)
}

/// Canonical document for a model: sparse tables, sorted keys.
pub fn document_of(model: &EmpiricalModel, name: Option<&str>, source: Option<&str>) -> ModelDocument {
    let scenario = model.scenario();
    let outcomes: BTreeMap<String, Vec<String>> = scenario
        .measurement_names()
        .iter()
        .enumerate()
        .map(|(m, n)| {
            (
                n.clone(),
                scenario
                    .allowed_outcomes(m)
                    .iter()
                    .map(|&o| scenario.outcome_labels()[o].clone())
                    .collect(),
            )
        })
        .collect();
    let contexts: Vec<Vec<String>> = scenario
        .contexts()
        .iter()
        .map(|ctx| {
            ctx.iter()
                .map(|&m| scenario.measurement_name(m).to_string())
                .collect()
        })
        .collect();
    let mut tables = BTreeMap::new();
    for i in 0..scenario.context_count() {
        let mut events = BTreeMap::new();
        for (event, value) in model.support_table(i) {
            events.insert(scenario.event_key(event), value.to_string());
        }
        tables.insert(scenario.context_label(i), events);
    }
    ModelDocument {
        format: FORMAT_MARKER.to_string(),
        name: name.map(str::to_string),
        source: source.map(str::to_string),
        semiring: model.semiring().name().to_string(),
        scenario: ScenarioDoc {
            measurements: scenario.measurement_names().to_vec(),
            contexts,
            outcomes,
        },
        tables,
    }
}

/// Canonical serialization: pretty JSON with a trailing newline.
/// Serializing a parsed document is idempotent because every map is
/// ordered.
pub fn serialize_model(doc: &ModelDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("documents always serialize");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SectionEntry {
    pub context: String,
    pub event: String,
    pub weight: String,
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DisturbanceEntry {
    pub context_a: String,
    pub context_b: String,
    pub event: String,
    pub weight_a: String,
    pub weight_b: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct VerdictBlock {
    pub contextual: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_section: Option<(String, String)>,
    pub sections: Vec<SectionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_variables: Option<Vec<(String, String)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FractionBlock {
    pub value: String,
    pub noncontextual_mass: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct OracleCheck {
    pub name: String,
    pub agrees: bool,
    pub detail: String,
}

/// The machine-readable analysis report. Field order and map ordering
/// are fixed, so identical inputs produce byte-identical output.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Report {
    pub model: String,
    pub semiring: String,
    pub valid: bool,
    pub nondisturbing: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disturbance: Option<DisturbanceEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generalized: Option<VerdictBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical: Option<VerdictBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraction: Option<FractionBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub oracle: Vec<OracleCheck>,
}

impl Report {
    pub fn new(model_name: &str, model: &EmpiricalModel) -> Report {
        Report {
            model: model_name.to_string(),
            semiring: model.semiring().name().to_string(),
            valid: true,
            nondisturbing: true,
            disturbance: None,
            generalized: None,
            classical: None,
            fraction: None,
            oracle: Vec::new(),
        }
    }

    pub fn set_disturbance(&mut self, model: &EmpiricalModel, witness: &DisturbanceWitness) {
        let s = model.scenario();
        self.nondisturbing = false;
        self.disturbance = Some(DisturbanceEntry {
            context_a: s.context_label(witness.context_a),
            context_b: s.context_label(witness.context_b),
            event: s.event_key(&witness.event),
            weight_a: witness.weight_a.to_string(),
            weight_b: witness.weight_b.to_string(),
        });
    }

    pub fn set_generalized(&mut self, model: &EmpiricalModel, verdict: &ContextualityVerdict) {
        self.generalized = Some(verdict_block(model, verdict));
    }

    pub fn set_classical(
        &mut self,
        model: &EmpiricalModel,
        sections: &[(usize, crate::scenario::Event, Verdict)],
    ) {
        let s = model.scenario();
        let entries: Vec<SectionEntry> = sections
            .iter()
            .map(|(ctx, event, verdict)| SectionEntry {
                context: s.context_label(*ctx),
                event: s.event_key(event),
                weight: model.weight(*ctx, event).to_string(),
                verdict: verdict_name(*verdict).to_string(),
            })
            .collect();
        let contextual = entries.iter().any(|e| e.verdict == "nontrivial");
        let witness = entries
            .iter()
            .find(|e| e.verdict == "nontrivial")
            .map(|e| (e.context.clone(), e.event.clone()));
        self.classical = Some(VerdictBlock {
            contextual,
            witness_section: witness,
            sections: entries,
            hidden_variables: None,
        });
    }

    pub fn set_fraction(&mut self, fraction: &FractionResult) {
        self.fraction = Some(FractionBlock {
            value: fraction.value.to_string(),
            noncontextual_mass: fraction.noncontextual_mass.to_string(),
        });
    }

    pub fn push_oracle(&mut self, name: &str, agrees: bool, detail: String) {
        self.oracle.push(OracleCheck {
            name: name.to_string(),
            agrees,
            detail,
        });
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports always serialize");
        text.push('\n');
        text
    }

    /// Plain-text rendering: one header, then aligned per-section rows
    /// in canonical order.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model: {}", self.model);
        let _ = writeln!(out, "semiring: {}", self.semiring);
        let _ = writeln!(
            out,
            "non-disturbing: {}",
            if self.nondisturbing { "yes" } else { "no" }
        );
        if let Some(d) = &self.disturbance {
            let _ = writeln!(
                out,
                "  disturbance witness: contexts {} / {} disagree at {} ({} vs {})",
                d.context_a, d.context_b, d.event, d.weight_a, d.weight_b
            );
            let _ = writeln!(out, "  analyses skipped");
            return out;
        }
        if let Some(block) = &self.generalized {
            let _ = writeln!(
                out,
                "generalized obstruction: {}",
                if block.contextual {
                    "contextual"
                } else {
                    "noncontextual"
                }
            );
            if let Some((ctx, event)) = &block.witness_section {
                let _ = writeln!(out, "  witness section: {ctx} -> {event}");
            }
            for e in &block.sections {
                let _ = writeln!(
                    out,
                    "  [generalized] {} -> {}  weight {}  {}", e.context, e.event, e.weight, e.verdict
                );
            }
            if let Some(hv) = &block.hidden_variables {
                let _ = writeln!(out, "  hidden variables over {} global sections:", hv.len());
                for (global, weight) in hv {
                    let _ = writeln!(out, "    {global}: {weight}");
                }
            }
        }
        if let Some(block) = &self.classical {
            let _ = writeln!(
                out,
                "classical obstruction: {}",
                if block.contextual {
                    "some section nontrivial"
                } else {
                    "all sections trivial"
                }
            );
            for e in &block.sections {
                let _ = writeln!(
                    out,
                    "  [classical] {} -> {}  weight {}  {}", e.context, e.event, e.weight, e.verdict
                );
            }
        }
        if let Some(f) = &self.fraction {
            let _ = writeln!(out, "contextual fraction: {}", f.value);
            let _ = writeln!(out, "  noncontextual mass: {}", f.noncontextual_mass);
        }
        if !self.oracle.is_empty() {
            let _ = writeln!(out, "oracle cross-checks:");
            for check in &self.oracle {
                let _ = writeln!(
                    out,
                    "  {}: {} ({})",
                    check.name,
                    if check.agrees { "agree" } else { "MISMATCH" },
                    check.detail
                );
            }
        }
        out
    }
}

fn verdict_block(model: &EmpiricalModel, verdict: &ContextualityVerdict) -> VerdictBlock {
    let s = model.scenario();
    VerdictBlock {
        contextual: verdict.contextual,
        witness_section: verdict
            .witness_section
            .as_ref()
            .map(|(ctx, event)| (s.context_label(*ctx), s.event_key(event))),
        sections: verdict
            .sections
            .iter()
            .map(|r| SectionEntry {
                context: s.context_label(r.context),
                event: s.event_key(&r.event),
                weight: r.weight.to_string(),
                verdict: verdict_name(r.verdict).to_string(),
            })
            .collect(),
        hidden_variables: verdict.hidden_variables.as_ref().map(|d| {
            d.weights
                .iter()
                .map(|(g, w)| (s.event_key(g), w.to_string()))
                .collect()
        }),
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Trivial => "trivial",
        Verdict::Nontrivial => "nontrivial",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis;
    use crate::model::presets;

    const MINIMAL: &str = r#"{
  "format": "rctx-model/1",
  "semiring": "boolean",
  "scenario": {
    "measurements": ["a", "b", "c", "d"],
    "contexts": [["a", "b"], ["b", "c"], ["c", "d"], ["d", "a"]],
    "outcomes": {"a": ["0", "1"], "b": ["0", "1"], "c": ["0", "1"], "d": ["0", "1"]}
  },
  "tables": {
    "a,b": {"00": "1", "11": "1"},
    "b,c": {"00": "1", "11": "1"},
    "c,d": {"00": "1", "11": "1"},
    "a,d": {"00": "1", "01": "1", "10": "1", "11": "1"}
  }
}"#;

    #[test]
    fn parses_the_correlated_cycle_document() {
        let (_, model) = parse_model(MINIMAL).unwrap();
        assert_eq!(model, presets::correlated_cycle_boolean());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_model("{ not json").unwrap_err();
        match err {
            FormatError::Syntax { line, column, .. } => {
                assert_eq!(line, 1);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn overweight_table_fails_normalization_with_location() {
        let rational = MINIMAL
            .replace("\"boolean\"", "\"nonneg-rational\"")
            .replace(
                r#""a,b": {"00": "1", "11": "1"}"#,
                r#""a,b": {"00": "3/2", "11": "1/2"}"#,
            )
            .replace(
                r#""b,c": {"00": "1", "11": "1"}"#,
                r#""b,c": {"00": "1/2", "11": "1/2"}"#,
            )
            .replace(
                r#""c,d": {"00": "1", "11": "1"}"#,
                r#""c,d": {"00": "1/2", "11": "1/2"}"#,
            )
            .replace(
                r#""a,d": {"00": "1", "01": "1", "10": "1", "11": "1"}"#,
                r#""a,d": {"00": "1/4", "01": "1/4", "10": "1/4", "11": "1/4"}"#,
            );
        let err = parse_model(&rational).unwrap_err();
        match err {
            FormatError::Model(ModelError::Normalization { context, sum }) => {
                assert_eq!(context, "a,b");
                assert_eq!(sum, "2");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sparse_and_explicit_zero_documents_agree() {
        let explicit = MINIMAL.replace(
            r#""a,b": {"00": "1", "11": "1"}"#,
            r#""a,b": {"00": "1", "01": "0", "10": "0", "11": "1"}"#,
        );
        let (_, sparse) = parse_model(MINIMAL).unwrap();
        let (_, full) = parse_model(&explicit).unwrap();
        assert_eq!(sparse, full);
    }

    #[test]
    fn document_round_trip_is_canonical() {
        let (doc, model) = parse_model(MINIMAL).unwrap();
        let text = serialize_model(&doc);
        let (doc2, model2) = parse_model(&text).unwrap();
        assert_eq!(doc, doc2);
        assert_eq!(model, model2);
        assert_eq!(text, serialize_model(&doc2));
        // Regenerating the document from the model matches too.
        let regenerated = document_of(&model, None, None);
        assert_eq!(regenerated.tables, doc.tables);
    }

    #[test]
    fn report_rendering_is_deterministic() {
        let model = presets::correlated_cycle_boolean();
        let verdict = analysis::is_r_contextual(&model).unwrap();
        let mut report = Report::new("table1", &model);
        report.set_generalized(&model, &verdict);
        let a = report.render_text();
        let b = report.render_text();
        assert_eq!(a, b);
        assert!(a.contains("generalized obstruction: contextual"));
        assert!(a.contains("witness section: a,d -> 01"));
        let json = report.to_json();
        let parsed: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, report);
    }

    #[test]
    fn disturbing_reports_skip_analyses() {
        use std::collections::BTreeMap;
        let s = crate::scenario::presets::four_cycle();
        let b = Semiring::boolean();
        let mut tables = vec![BTreeMap::new(), BTreeMap::new(), BTreeMap::new(), BTreeMap::new()];
        for (label, key) in [("a,b", "00"), ("b,c", "10"), ("c,d", "00"), ("a,d", "00")] {
            let i = s.context_by_label(label).unwrap();
            tables[i].insert(s.event_from_key(s.context(i), key).unwrap(), b.one());
        }
        let model = EmpiricalModel::new(s, b, tables).unwrap();
        let witness = model.disturbance_witness().unwrap();
        let mut report = Report::new("disturbing", &model);
        report.set_disturbance(&model, &witness);
        let text = report.render_text();
        assert!(text.contains("non-disturbing: no"));
        assert!(text.contains("analyses skipped"));
    }
}
