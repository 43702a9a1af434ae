//! The built-in model corpus and its frozen expectations.
//!
//! Expectations are derived by the brute-force oracles (never entered
//! by hand) through [`derive_expectation`] and committed to
//! `corpus/expectations.json`; the `corpus` subcommand replays every
//! entry against the frozen values.

use rctx_core::analysis;
use rctx_core::formats;
use rctx_core::model::EmpiricalModel;
use rctx_core::linalg;
use rctx_core::obstruction::{self, Verdict};
use rctx_core::semiring::{Semiring, SemiringKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Expectation {
    pub name: String,
    pub file: String,
    /// How the expected values were obtained.
    pub basis: String,
    pub nondisturbing: bool,
    pub contextual: bool,
    pub decomposable: bool,
    /// Sections with nontrivial generalized obstruction, as
    /// (context label, event key) pairs in canonical order.
    pub generalized_nontrivial: Vec<(String, String)>,
    pub classical_ring: String,
    pub classical_nontrivial: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraction: Option<String>,
}

pub struct CorpusEntry {
    pub name: &'static str,
    pub file: &'static str,
    pub text: &'static str,
}

pub const ENTRIES: &[CorpusEntry] = &[
    CorpusEntry {
        name: "correlated-cycle",
        file: "correlated-cycle.model",
        text: include_str!("../corpus/correlated-cycle.model"),
    },
    CorpusEntry {
        name: "correlated-cycle-uniform",
        file: "correlated-cycle-uniform.model",
        text: include_str!("../corpus/correlated-cycle-uniform.model"),
    },
    CorpusEntry {
        name: "prbox",
        file: "prbox.model",
        text: include_str!("../corpus/prbox.model"),
    },
    CorpusEntry {
        name: "prbox-support",
        file: "prbox-support.model",
        text: include_str!("../corpus/prbox-support.model"),
    },
    CorpusEntry {
        name: "hardy",
        file: "hardy.model",
        text: include_str!("../corpus/hardy.model"),
    },
    CorpusEntry {
        name: "deterministic",
        file: "deterministic.model",
        text: include_str!("../corpus/deterministic.model"),
    },
    CorpusEntry {
        name: "fully-mixed",
        file: "fully-mixed.model",
        text: include_str!("../corpus/fully-mixed.model"),
    },
    CorpusEntry {
        name: "prbox-noise-half",
        file: "prbox-noise-half.model",
        text: include_str!("../corpus/prbox-noise-half.model"),
    },
    CorpusEntry {
        name: "prbox-noise-3q",
        file: "prbox-noise-3q.model",
        text: include_str!("../corpus/prbox-noise-3q.model"),
    },
];

const EXPECTATIONS_JSON: &str = include_str!("../corpus/expectations.json");

pub fn expectations() -> Vec<Expectation> {
    serde_json::from_str(EXPECTATIONS_JSON).expect("embedded expectations parse")
}

pub fn entry_model(entry: &CorpusEntry) -> EmpiricalModel {
    let (_, model) = formats::parse_model(entry.text).expect("embedded corpus files parse");
    model
}

/// The ring used for the classical sweep of a model: the completion
/// when one exists, the integers for Boolean tables.
pub fn classical_ring(model: &EmpiricalModel) -> Semiring {
    match model.semiring().kind() {
        SemiringKind::Boolean => Semiring::integer(),
        _ => model
            .semiring()
            .ring_completion()
            .expect("non-boolean shipped semirings are cancellative"),
    }
}

/// Computes an entry's expectation from the brute-force oracles and the
/// exact LP (fractions are dual-certified inside the solver).
pub fn derive_expectation(entry: &CorpusEntry, basis: &str) -> Expectation {
    let model = entry_model(entry);
    let scenario = model.scenario();
    let nerve = scenario.nerve(2);
    let nondisturbing = model.is_nondisturbing();

    let mut generalized_nontrivial = Vec::new();
    for (ctx, event) in model.supported_sections() {
        let trivial = analysis::brute_force_section_oracle(&model, ctx, &event)
            .expect("oracle runs on corpus models");
        if !trivial {
            generalized_nontrivial.push((scenario.context_label(ctx), scenario.event_key(&event)));
        }
    }
    let contextual = !generalized_nontrivial.is_empty();
    let decomposable =
        analysis::brute_force_noncontextual_oracle(&model).expect("oracle runs on corpus models");

    let ring = classical_ring(&model);
    let mut classical_nontrivial = Vec::new();
    for (ctx, event) in model.supported_sections() {
        let result = obstruction::classical_obstruction(&model, ctx, &event, &ring, &nerve)
            .expect("classical sweep runs on corpus models");
        if !result.is_trivial() {
            classical_nontrivial.push((scenario.context_label(ctx), scenario.event_key(&event)));
        }
    }

    let fraction = match model.semiring().kind() {
        SemiringKind::NonnegRational => Some(
            analysis::contextual_fraction(&model)
                .expect("fraction runs on rational corpus models")
                .value
                .to_string(),
        ),
        _ => None,
    };

    Expectation {
        name: entry.name.to_string(),
        file: entry.file.to_string(),
        basis: basis.to_string(),
        nondisturbing,
        contextual,
        decomposable,
        generalized_nontrivial,
        classical_ring: ring.name().to_string(),
        classical_nontrivial,
        fraction,
    }
}

/// Replays one entry against its expectation, returning itemized
/// differences (empty means the entry matches).
pub fn check_entry(entry: &CorpusEntry, expected: &Expectation) -> Vec<String> {
    let mut diffs = Vec::new();
    let model = match formats::parse_model(entry.text) {
        Ok((_, m)) => m,
        Err(e) => return vec![format!("parse failed: {e}")],
    };
    let scenario = model.scenario();
    let nerve = scenario.nerve(2);

    let nondisturbing = model.is_nondisturbing();
    if nondisturbing != expected.nondisturbing {
        diffs.push(format!(
            "nondisturbing: got {nondisturbing}, expected {}",
            expected.nondisturbing
        ));
    }

    let verdict = match analysis::is_r_contextual(&model) {
        Ok(v) => v,
        Err(e) => {
            diffs.push(format!("sweep failed: {e}"));
            return diffs;
        }
    };
    if verdict.contextual != expected.contextual {
        diffs.push(format!(
            "contextual: got {}, expected {}",
            verdict.contextual, expected.contextual
        ));
    }
    let nontrivial: Vec<(String, String)> = verdict
        .sections
        .iter()
        .filter(|s| s.verdict == Verdict::Nontrivial)
        .map(|s| (scenario.context_label(s.context), scenario.event_key(&s.event)))
        .collect();
    if nontrivial != expected.generalized_nontrivial {
        diffs.push(format!(
            "generalized nontrivial sections: got {nontrivial:?}, expected {:?}",
            expected.generalized_nontrivial
        ));
    }

    // Per-section oracle agreement is part of the regression.
    for section in &verdict.sections {
        match analysis::brute_force_section_oracle(&model, section.context, &section.event) {
            Ok(oracle) => {
                if oracle != (section.verdict == Verdict::Trivial) {
                    diffs.push(format!(
                        "oracle mismatch at {} -> {}",
                        scenario.context_label(section.context),
                        scenario.event_key(&section.event)
                    ));
                }
            }
            Err(e) => diffs.push(format!("oracle failed: {e}")),
        }
    }

    match analysis::noncontextual_decompose(&model) {
        Ok(d) => {
            let decomposable = d.is_some();
            if decomposable != expected.decomposable {
                diffs.push(format!(
                    "decomposable: got {decomposable}, expected {}",
                    expected.decomposable
                ));
            }
            if let Some(dist) = d {
                if !analysis::decomposition_reproduces_model(&model, &dist) {
                    diffs.push("decomposition does not reproduce the tables".to_string());
                }
            }
        }
        Err(e) => diffs.push(format!("decomposition failed: {e}")),
    }

    let ring = classical_ring(&model);
    if ring.name() != expected.classical_ring {
        diffs.push(format!(
            "classical ring: got {}, expected {}",
            ring.name(),
            expected.classical_ring
        ));
    }
    let mut classical_nontrivial = Vec::new();
    for (ctx, event) in model.supported_sections() {
        match obstruction::classical_obstruction(&model, ctx, &event, &ring, &nerve) {
            Ok(r) => {
                if !r.is_trivial() {
                    classical_nontrivial
                        .push((scenario.context_label(ctx), scenario.event_key(&event)));
                }
            }
            Err(e) => diffs.push(format!("classical sweep failed: {e}")),
        }
    }
    if classical_nontrivial != expected.classical_nontrivial {
        diffs.push(format!(
            "classical nontrivial sections: got {classical_nontrivial:?}, expected {:?}",
            expected.classical_nontrivial
        ));
    }

    match (&expected.fraction, model.semiring().kind()) {
        (Some(want), SemiringKind::NonnegRational) => {
            match analysis::contextual_fraction(&model) {
                Ok(f) => {
                    let got = f.value.to_string();
                    if &got != want {
                        diffs.push(format!("fraction: got {got}, expected {want}"));
                    }
                    // Exactness of the bound certificate.
                    let recomputed: num::BigRational = linalg::qi(1) - &f.noncontextual_mass;
                    if recomputed != f.value {
                        diffs.push("fraction bookkeeping mismatch".to_string());
                    }
                }
                Err(e) => diffs.push(format!("fraction failed: {e}")),
            }
        }
        (Some(_), _) => diffs.push("fraction expected for a non-rational model".to_string()),
        (None, _) => {}
    }

    diffs
}
