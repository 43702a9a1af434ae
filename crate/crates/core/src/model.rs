//! R-empirical models: per-context exact measure tables over joint
//! outcomes, with marginalization, the non-disturbance check, the
//! incidence matrix against global assignments, and the translation of
//! a model into a degree-0 cochain.

use crate::cochain::{Cochain, FreeVector};
use crate::scenario::{
    Event, MeasurementId, Nerve, Scenario, ScenarioError, TooLarge, DEFAULT_ENUMERATION_CUTOFF,
};
use crate::semiring::{Semiring, Value};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("context `{context}` sums to {sum}, expected 1")]
    Normalization { context: String, sum: String },
    #[error("event `{event}` is not a joint event of context `{context}`")]
    UnknownEvent { context: String, event: String },
    #[error("value `{value}` is not an element of semiring `{semiring}`")]
    ForeignValue { semiring: String, value: String },
    #[error("table refers to unknown context `{0}`")]
    UnknownContext(String),
    #[error("missing table for context `{0}`")]
    MissingContext(String),
    #[error(transparent)]
    TooLarge(#[from] TooLarge),
    #[error("target is not a subset of the context")]
    NotSubcontext,
}

/// A normalized R-measure on the joint events of a measurement subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    pub domain: Vec<MeasurementId>,
    pub weights: BTreeMap<Event, Value>,
}

impl Measure {
    pub fn weight(&self, event: &Event, semiring: &Semiring) -> Value {
        self.weights
            .get(event)
            .cloned()
            .unwrap_or_else(|| semiring.zero())
    }
}

/// First disagreement found between two context marginals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisturbanceWitness {
    pub context_a: usize,
    pub context_b: usize,
    pub event: Event,
    pub weight_a: Value,
    pub weight_b: Value,
}

/// The 0/1 matrix pairing (context, joint event) rows with global
/// assignment columns: an entry is set when the column restricts to the
/// row's event.
#[derive(Debug, Clone)]
pub struct IncidenceMatrix {
    pub rows: Vec<(usize, Event)>,
    pub columns: Vec<Event>,
    entries: Vec<bool>, // row-major
}

impl IncidenceMatrix {
    pub fn entry(&self, row: usize, col: usize) -> bool {
        self.entries[row * self.columns.len() + col]
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn entry_value(&self, row: usize, col: usize, semiring: &Semiring) -> Value {
        if self.entry(row, col) {
            semiring.one()
        } else {
            semiring.zero()
        }
    }
}

/// An empirical model: a validated measure table per maximal context.
/// Tables are sparse; absent events carry weight zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalModel {
    scenario: Scenario,
    semiring: Semiring,
    tables: Vec<BTreeMap<Event, Value>>,
}

impl EmpiricalModel {
    /// Validates per-context tables indexed by canonical context order.
    pub fn new(
        scenario: Scenario,
        semiring: Semiring,
        tables: Vec<BTreeMap<Event, Value>>,
    ) -> Result<EmpiricalModel, ModelError> {
        if tables.len() != scenario.context_count() {
            let missing = tables.len().min(scenario.context_count());
            return Err(ModelError::MissingContext(
                scenario.context_label(missing.min(scenario.context_count() - 1)),
            ));
        }
        let mut clean: Vec<BTreeMap<Event, Value>> = Vec::with_capacity(tables.len());
        for (i, table) in tables.into_iter().enumerate() {
            let context = scenario.context(i).to_vec();
            let mut entries: BTreeMap<Event, Value> = BTreeMap::new();
            for (event, value) in table {
                if event.domain() != context.as_slice() {
                    return Err(ModelError::UnknownEvent {
                        context: scenario.context_label(i),
                        event: format!("{event:?}"),
                    });
                }
                for (&m, &o) in event.domain().iter().zip(event.outcomes()) {
                    if !scenario.allowed_outcomes(m).contains(&o) {
                        return Err(ModelError::UnknownEvent {
                            context: scenario.context_label(i),
                            event: scenario.event_key(&event),
                        });
                    }
                }
                if !semiring.contains(&value) {
                    return Err(ModelError::ForeignValue {
                        semiring: semiring.name().to_string(),
                        value: value.to_string(),
                    });
                }
                if !semiring.is_zero(&value) {
                    entries.insert(event, value);
                }
            }
            let sum = semiring.sum(entries.values());
            if !semiring.is_one(&sum) {
                return Err(ModelError::Normalization {
                    context: scenario.context_label(i),
                    sum: sum.to_string(),
                });
            }
            clean.push(entries);
        }
        Ok(EmpiricalModel {
            scenario,
            semiring,
            tables: clean,
        })
    }

    /// Builds a model from tables keyed by context label and event key,
    /// the shape used by the file format.
    pub fn from_keyed_tables(
        scenario: Scenario,
        semiring: Semiring,
        keyed: &BTreeMap<String, BTreeMap<String, Value>>,
    ) -> Result<EmpiricalModel, ModelError> {
        let mut tables: Vec<BTreeMap<Event, Value>> =
            vec![BTreeMap::new(); scenario.context_count()];
        for (label, events) in keyed {
            let ctx = scenario
                .context_by_label(label)
                .ok_or_else(|| ModelError::UnknownContext(label.clone()))?;
            for (key, value) in events {
                let event = scenario.event_from_key(scenario.context(ctx), key)?;
                tables[ctx].insert(event, value.clone());
            }
        }
        for (i, table) in tables.iter().enumerate() {
            if table.is_empty() {
                return Err(ModelError::MissingContext(scenario.context_label(i)));
            }
        }
        EmpiricalModel::new(scenario, semiring, tables)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn semiring(&self) -> &Semiring {
        &self.semiring
    }

    /// Table weight of an event in a context; zero when absent.
    pub fn weight(&self, context: usize, event: &Event) -> Value {
        self.tables[context]
            .get(event)
            .cloned()
            .unwrap_or_else(|| self.semiring.zero())
    }

    /// Supported events of a context (nonzero weight), in canonical order.
    pub fn support(&self, context: usize) -> impl Iterator<Item = &Event> {
        self.tables[context].keys()
    }

    pub fn support_table(&self, context: usize) -> &BTreeMap<Event, Value> {
        &self.tables[context]
    }

    /// All (context, supported event) pairs in canonical order.
    pub fn supported_sections(&self) -> Vec<(usize, Event)> {
        (0..self.scenario.context_count())
            .flat_map(|i| self.tables[i].keys().cloned().map(move |e| (i, e)))
            .collect()
    }

    /// Supported events of an intersection: pushes of supported context
    /// events. Well-defined across containing contexts for
    /// non-disturbing models; computed from the given context.
    pub fn pushed_support(&self, context: usize, target: &[MeasurementId]) -> Vec<Event> {
        let mut out: Vec<Event> = self.tables[context]
            .keys()
            .map(|e| e.restrict(target).expect("target within context"))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Marginal measure of context `context` on a subset of it.
    pub fn marginalize(
        &self,
        context: usize,
        target: &[MeasurementId],
    ) -> Result<Measure, ModelError> {
        let ctx = self.scenario.context(context);
        if !target.iter().all(|m| ctx.binary_search(m).is_ok()) {
            return Err(ModelError::NotSubcontext);
        }
        let mut weights: BTreeMap<Event, Value> = BTreeMap::new();
        for (event, value) in &self.tables[context] {
            let restricted = event.restrict(target)?;
            let entry = match weights.remove(&restricted) {
                Some(existing) => self.semiring.add(&existing, value),
                None => value.clone(),
            };
            weights.insert(restricted, entry);
        }
        weights.retain(|_, v| !self.semiring.is_zero(v));
        Ok(Measure {
            domain: target.to_vec(),
            weights,
        })
    }

    /// First pair of contexts whose marginals disagree on their
    /// intersection, if any. `None` means the model is non-disturbing.
    pub fn disturbance_witness(&self) -> Option<DisturbanceWitness> {
        let n = self.scenario.context_count();
        for i in 0..n {
            for j in (i + 1)..n {
                let inter = self.scenario.context_intersection(i, j);
                if inter.is_empty() {
                    continue;
                }
                let mi = self.marginalize(i, &inter).expect("intersection is a subset");
                let mj = self.marginalize(j, &inter).expect("intersection is a subset");
                for event in self.scenario.events(&inter) {
                    let wi = mi.weight(&event, &self.semiring);
                    let wj = mj.weight(&event, &self.semiring);
                    if wi != wj {
                        return Some(DisturbanceWitness {
                            context_a: i,
                            context_b: j,
                            event,
                            weight_a: wi,
                            weight_b: wj,
                        });
                    }
                }
            }
        }
        None
    }

    pub fn is_nondisturbing(&self) -> bool {
        self.disturbance_witness().is_none()
    }

    /// The section μ(s)·[s] of the free semimodule on the context's
    /// events; the only sections the obstruction framework probes.
    pub fn support_section(&self, context: usize, event: &Event) -> FreeVector {
        FreeVector::singleton(event.clone(), self.weight(context, event), &self.semiring)
    }

    /// The model as a degree-0 cochain: each context's full measure
    /// vector. Non-disturbance is exactly this cochain being a cocycle.
    pub fn to_cochain(&self, nerve: &Nerve) -> Cochain {
        let values: Vec<FreeVector> = (0..self.scenario.context_count())
            .map(|i| {
                FreeVector::from_terms(
                    self.scenario.context(i).to_vec(),
                    self.tables[i].iter().map(|(e, v)| (e.clone(), v.clone())),
                    &self.semiring,
                )
            })
            .collect();
        Cochain::new(nerve, 0, values).expect("one value per context")
    }

    pub fn global_sections(&self, cutoff: u128) -> Result<Vec<Event>, ModelError> {
        Ok(self.scenario.global_events(cutoff)?)
    }

    /// Incidence matrix with rows in (context, lexicographic event)
    /// order over full event lists and columns in canonical global
    /// assignment order.
    pub fn incidence_matrix(&self, cutoff: u128) -> Result<IncidenceMatrix, ModelError> {
        let columns = self.scenario.global_events(cutoff)?;
        let mut rows = Vec::new();
        for i in 0..self.scenario.context_count() {
            for event in self.scenario.context_events(i) {
                rows.push((i, event));
            }
        }
        let mut entries = Vec::with_capacity(rows.len() * columns.len());
        for (ctx, event) in &rows {
            let domain = self.scenario.context(*ctx);
            for global in &columns {
                entries.push(&global.restrict(domain).expect("global covers context") == event);
            }
        }
        Ok(IncidenceMatrix {
            rows,
            columns,
            entries,
        })
    }

    /// The right-hand side vector aligned with the incidence rows: every
    /// table entry, zeros included.
    pub fn table_vector(&self, matrix: &IncidenceMatrix) -> Vec<Value> {
        matrix
            .rows
            .iter()
            .map(|(ctx, event)| self.weight(*ctx, event))
            .collect()
    }

    /// Same scenario and support, Boolean semiring: entry 1 exactly
    /// where the weight is nonzero. Always a valid Boolean model.
    pub fn possibilistic_collapse(&self) -> EmpiricalModel {
        let b = Semiring::boolean();
        let tables: Vec<BTreeMap<Event, Value>> = self
            .tables
            .iter()
            .map(|t| t.keys().map(|e| (e.clone(), b.one())).collect())
            .collect();
        EmpiricalModel::new(self.scenario.clone(), b, tables)
            .expect("support of a normalized model is normalized over the booleans")
    }
}

pub fn default_cutoff() -> u128 {
    DEFAULT_ENUMERATION_CUTOFF
}

/// Builders for the models exercised across tests, benches, and docs.
pub mod presets {
    use super::*;
    use crate::scenario::presets as scenarios;

    fn table_from(
        scenario: &Scenario,
        _semiring: &Semiring,
        rows: &[(&str, &[(&str, Value)])],
    ) -> Vec<BTreeMap<Event, Value>> {
        let mut tables = vec![BTreeMap::new(); scenario.context_count()];
        for (label, entries) in rows {
            let ctx = scenario.context_by_label(label).expect("known context");
            for (key, value) in entries.iter() {
                let event = scenario
                    .event_from_key(scenario.context(ctx), key)
                    .expect("valid event key");
                tables[ctx].insert(event, value.clone());
            }
        }
        tables
    }

    /// The Boolean 4-cycle model with three perfectly correlated
    /// contexts and one full-support context (labelled a,d here).
    pub fn correlated_cycle_boolean() -> EmpiricalModel {
        let s = scenarios::four_cycle();
        let b = Semiring::boolean();
        let one = b.one();
        let tables = table_from(
            &s,
            &b,
            &[
                ("a,b", &[("00", one.clone()), ("11", one.clone())]),
                ("b,c", &[("00", one.clone()), ("11", one.clone())]),
                ("c,d", &[("00", one.clone()), ("11", one.clone())]),
                (
                    "a,d",
                    &[
                        ("00", one.clone()),
                        ("01", one.clone()),
                        ("10", one.clone()),
                        ("11", one),
                    ],
                ),
            ],
        );
        EmpiricalModel::new(s, b, tables).expect("valid model")
    }

    /// Same support with uniform rational weights.
    pub fn correlated_cycle_rational() -> EmpiricalModel {
        let s = scenarios::four_cycle();
        let q = Semiring::nonneg_rational();
        let half = Value::ratio(1, 2);
        let quarter = Value::ratio(1, 4);
        let tables = table_from(
            &s,
            &q,
            &[
                ("a,b", &[("00", half.clone()), ("11", half.clone())]),
                ("b,c", &[("00", half.clone()), ("11", half.clone())]),
                ("c,d", &[("00", half.clone()), ("11", half)]),
                (
                    "a,d",
                    &[
                        ("00", quarter.clone()),
                        ("01", quarter.clone()),
                        ("10", quarter.clone()),
                        ("11", quarter),
                    ],
                ),
            ],
        );
        EmpiricalModel::new(s, q, tables).expect("valid model")
    }

    /// PR box on the Bell-labelled cycle: perfect correlation except in
    /// the a2,b2 context, which anticorrelates.
    pub fn pr_box() -> EmpiricalModel {
        let s = scenarios::bell_cycle();
        let q = Semiring::nonneg_rational();
        let half = Value::ratio(1, 2);
        let tables = table_from(
            &s,
            &q,
            &[
                ("a1,b1", &[("00", half.clone()), ("11", half.clone())]),
                ("a1,b2", &[("00", half.clone()), ("11", half.clone())]),
                ("a2,b1", &[("00", half.clone()), ("11", half.clone())]),
                ("a2,b2", &[("01", half.clone()), ("10", half)]),
            ],
        );
        EmpiricalModel::new(s, q, tables).expect("valid model")
    }

    /// Deterministic model: every context gives the all-zeros event.
    pub fn deterministic() -> EmpiricalModel {
        let s = scenarios::four_cycle();
        let q = Semiring::nonneg_rational();
        let one = q.one();
        let tables = table_from(
            &s,
            &q,
            &[
                ("a,b", &[("00", one.clone())]),
                ("b,c", &[("00", one.clone())]),
                ("c,d", &[("00", one.clone())]),
                ("a,d", &[("00", one)]),
            ],
        );
        EmpiricalModel::new(s, q, tables).expect("valid model")
    }

    /// Fully mixed model: uniform weights everywhere.
    pub fn fully_mixed() -> EmpiricalModel {
        let s = scenarios::bell_cycle();
        let q = Semiring::nonneg_rational();
        let quarter = Value::ratio(1, 4);
        let all: Vec<(&str, Value)> = vec![
            ("00", quarter.clone()),
            ("01", quarter.clone()),
            ("10", quarter.clone()),
            ("11", quarter),
        ];
        let tables = table_from(
            &s,
            &q,
            &[
                ("a1,b1", &all),
                ("a1,b2", &all),
                ("a2,b1", &all),
                ("a2,b2", &all),
            ],
        );
        EmpiricalModel::new(s, q, tables).expect("valid model")
    }

    /// Equal mixture of the PR box and the fully mixed model. This sits
    /// exactly on the noncontextual polytope boundary.
    pub fn pr_mixed_half() -> EmpiricalModel {
        mix(&pr_box(), &fully_mixed(), Value::ratio(1, 2))
    }

    /// Three-quarter PR box, one-quarter fully mixed: strictly outside
    /// the noncontextual polytope with contextual fraction one half.
    pub fn pr_mixed_three_quarters() -> EmpiricalModel {
        mix(&pr_box(), &fully_mixed(), Value::ratio(3, 4))
    }

    /// Pointwise convex mixture `t·a + (1-t)·b` of two rational models
    /// over the same scenario.
    pub fn mix(a: &EmpiricalModel, b: &EmpiricalModel, t: Value) -> EmpiricalModel {
        assert_eq!(a.scenario(), b.scenario());
        let q = a.semiring().clone();
        let t = t.to_rational();
        let one_minus = num::BigRational::from_integer(1.into()) - &t;
        let mut tables = Vec::new();
        for i in 0..a.scenario().context_count() {
            let mut table: BTreeMap<Event, Value> = BTreeMap::new();
            for event in a.scenario().context_events(i) {
                let wa = a.weight(i, &event).to_rational();
                let wb = b.weight(i, &event).to_rational();
                let w = Value::Rat(&t * wa + &one_minus * wb);
                if !q.is_zero(&w) {
                    table.insert(event, w);
                }
            }
            tables.push(table);
        }
        EmpiricalModel::new(a.scenario().clone(), q, tables).expect("mixtures stay normalized")
    }
}
