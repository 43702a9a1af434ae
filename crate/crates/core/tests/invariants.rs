//! Property tests for the structural invariants: sheaf functoriality,
//! the cocycle/non-disturbance equivalence, and format round-trips.

use proptest::prelude::*;
use rctx_core::analysis::{self, ScenarioShape};
use rctx_core::cochain::{self, FreeVector};
use rctx_core::formats;
use rctx_core::model::EmpiricalModel;
use rctx_core::scenario::{presets, Event};
use rctx_core::semiring::{Semiring, Value};
use std::collections::BTreeMap;

/// A random normalized rational table on every context of a scenario,
/// with no coupling between contexts (so disturbance is common).
fn uncoupled_model(scenario: rctx_core::scenario::Scenario, cells: &[u32]) -> EmpiricalModel {
    let q = Semiring::nonneg_rational();
    let mut tables = Vec::new();
    let mut cursor = 0usize;
    for i in 0..scenario.context_count() {
        let events = scenario.context_events(i);
        let mut numerators: Vec<i64> = events
            .iter()
            .map(|_| {
                let v = cells.get(cursor).copied().unwrap_or(1) % 5;
                cursor += 1;
                v as i64
            })
            .collect();
        if numerators.iter().all(|&n| n == 0) {
            numerators[0] = 1;
        }
        let total: i64 = numerators.iter().sum();
        let table: BTreeMap<Event, Value> = events
            .into_iter()
            .zip(&numerators)
            .filter(|(_, &n)| n != 0)
            .map(|(e, &n)| (e, Value::ratio(n, total)))
            .collect();
        tables.push(table);
    }
    EmpiricalModel::new(scenario, q, tables).expect("normalized by construction")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The model-as-cochain is a degree-0 cocycle exactly when the model
    /// is non-disturbing, whether or not the tables were coupled.
    #[test]
    fn model_cochain_is_cocycle_iff_nondisturbing(cells in proptest::collection::vec(0u32..5, 16)) {
        let model = uncoupled_model(presets::four_cycle(), &cells);
        let nerve = model.scenario().nerve(2);
        let cocycle = cochain::is_cocycle(
            model.scenario(),
            &nerve,
            &model.to_cochain(&nerve),
            model.semiring(),
        ).unwrap();
        prop_assert_eq!(cocycle, model.is_nondisturbing());
    }

    /// Pushing a free vector along nested restrictions composes.
    #[test]
    fn push_composes_along_nested_domains(cells in proptest::collection::vec(0u32..7, 8)) {
        let scenario = presets::shared_triple();
        let q = Semiring::nonneg_rational();
        let ctx = scenario.context(0).to_vec(); // three measurements
        let events = scenario.events(&ctx);
        let v = FreeVector::from_terms(
            ctx.clone(),
            events.into_iter().zip(&cells).map(|(e, &n)| (e, Value::ratio(n as i64, 7))),
            &q,
        );
        let mid = ctx[..2].to_vec();
        let small = ctx[..1].to_vec();
        let two_step = v.push_to(&mid, &q).unwrap().push_to(&small, &q).unwrap();
        let one_step = v.push_to(&small, &q).unwrap();
        prop_assert_eq!(two_step, one_step);
    }

    /// Marginalizing through an intermediate subset equals marginalizing
    /// directly.
    #[test]
    fn marginalization_is_functorial(cells in proptest::collection::vec(0u32..5, 24)) {
        let model = uncoupled_model(presets::shared_triple(), &cells);
        let scenario = model.scenario();
        for i in 0..scenario.context_count() {
            let ctx = scenario.context(i).to_vec();
            let mid = ctx[..2].to_vec();
            let small = ctx[..1].to_vec();
            let direct = model.marginalize(i, &small).unwrap();
            let via_mid = model.marginalize(i, &mid).unwrap();
            let mut folded: BTreeMap<Event, Value> = BTreeMap::new();
            for (e, w) in &via_mid.weights {
                let r = e.restrict(&small).unwrap();
                let entry = match folded.remove(&r) {
                    Some(x) => model.semiring().add(&x, w),
                    None => w.clone(),
                };
                folded.insert(r, entry);
            }
            folded.retain(|_, v| !model.semiring().is_zero(v));
            prop_assert_eq!(&direct.weights, &folded);
        }
    }

    /// Serialize/parse is the identity on generated models.
    #[test]
    fn document_round_trip(seed in 0u64..500, four_cycle in any::<bool>(), boolean in any::<bool>()) {
        let shape = if four_cycle { ScenarioShape::FourCycle } else { ScenarioShape::Triangle };
        let model = if boolean {
            analysis::random_nondisturbing_boolean(shape, seed)
        } else {
            analysis::random_nondisturbing_rational(shape, seed, 12)
        };
        let doc = formats::document_of(&model, Some("round-trip"), None);
        let text = formats::serialize_model(&doc);
        let (doc2, model2) = formats::parse_model(&text).unwrap();
        prop_assert_eq!(doc, doc2);
        prop_assert_eq!(model, model2);
    }

    /// Boolean collapse preserves support and non-disturbance.
    #[test]
    fn collapse_preserves_support(seed in 0u64..200) {
        let model = analysis::random_nondisturbing_rational(ScenarioShape::FourCycle, seed, 12);
        let collapsed = analysis::possibilistic_collapse(&model);
        prop_assert!(collapsed.is_nondisturbing());
        for i in 0..model.scenario().context_count() {
            let a: Vec<&Event> = model.support(i).collect();
            let b: Vec<&Event> = collapsed.support(i).collect();
            prop_assert_eq!(a, b);
        }
    }
}
