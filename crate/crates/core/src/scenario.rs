//! Measurement scenarios, joint events, and the nerve of the context
//! cover.
//!
//! A scenario is a finite set of measurements covered by maximal
//! contexts, with a finite outcome set per measurement. Contexts are
//! kept in a canonical order (lexicographic by sorted measurement
//! names); the ordered nerve is built from strictly increasing context
//! tuples with nonempty intersection.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub type MeasurementId = usize;
pub type OutcomeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("no measurements given")]
    NoMeasurements,
    #[error("no contexts given")]
    NoContexts,
    #[error("measurement `{0}` belongs to no context")]
    Coverage(String),
    #[error("context `{inner}` is contained in context `{outer}`")]
    Maximality { inner: String, outer: String },
    #[error("measurement `{0}` has an empty outcome set")]
    EmptyOutcome(String),
    #[error("unknown measurement `{0}`")]
    UnknownMeasurement(String),
    #[error("outcome `{outcome}` is not allowed for measurement `{measurement}`")]
    UnknownOutcome { measurement: String, outcome: String },
    #[error("target measurement set is not a subset of the event domain")]
    NotSubset,
    #[error("event key `{key}` does not match domain `{domain}`")]
    BadEventKey { key: String, domain: String },
}

/// A joint outcome assignment on a set of measurements.
///
/// The domain is strictly increasing; the `outcomes` vector is parallel
/// to it. Ordering is lexicographic on (domain, outcomes), which gives
/// the canonical dense basis order used everywhere.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Event {
    domain: Vec<MeasurementId>,
    outcomes: Vec<OutcomeId>,
}

impl Event {
    pub fn new(domain: Vec<MeasurementId>, outcomes: Vec<OutcomeId>) -> Event {
        assert_eq!(domain.len(), outcomes.len(), "domain/outcome length mismatch");
        assert!(
            domain.windows(2).all(|w| w[0] < w[1]),
            "event domain must be strictly increasing"
        );
        Event { domain, outcomes }
    }

    pub fn domain(&self) -> &[MeasurementId] {
        &self.domain
    }

    pub fn outcomes(&self) -> &[OutcomeId] {
        &self.outcomes
    }

    pub fn outcome_for(&self, m: MeasurementId) -> Option<OutcomeId> {
        self.domain
            .binary_search(&m)
            .ok()
            .map(|i| self.outcomes[i])
    }

    /// Restriction to a subset of the domain.
    pub fn restrict(&self, target: &[MeasurementId]) -> Result<Event, ScenarioError> {
        let mut outcomes = Vec::with_capacity(target.len());
        for &m in target {
            match self.outcome_for(m) {
                Some(o) => outcomes.push(o),
                None => return Err(ScenarioError::NotSubset),
            }
        }
        Ok(Event::new(target.to_vec(), outcomes))
    }
}

/// An ordered nerve simplex: strictly increasing context indices with a
/// nonempty common intersection.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    contexts: Vec<usize>,
    intersection: Vec<MeasurementId>,
}

impl Simplex {
    pub fn contexts(&self) -> &[usize] {
        &self.contexts
    }

    pub fn intersection(&self) -> &[MeasurementId] {
        &self.intersection
    }

    pub fn dim(&self) -> usize {
        self.contexts.len() - 1
    }
}

/// All simplices of the nerve up to a dimension bound, grouped by
/// dimension. Dimension 0 is the cover itself, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nerve {
    per_dim: Vec<Vec<Simplex>>,
}

impl Nerve {
    pub fn max_dim(&self) -> usize {
        self.per_dim.len() - 1
    }

    pub fn simplices(&self, q: usize) -> &[Simplex] {
        self.per_dim.get(q).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Index of a simplex (given by its context tuple) within its
    /// dimension, if present.
    pub fn index_of(&self, q: usize, contexts: &[usize]) -> Option<usize> {
        self.simplices(q)
            .binary_search_by(|s| s.contexts.as_slice().cmp(contexts))
            .ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    /// Measurement names, sorted; `MeasurementId` indexes this.
    measurements: Vec<String>,
    /// Global outcome labels O (sorted union of the per-measurement sets).
    outcome_labels: Vec<String>,
    /// Per measurement, the allowed outcomes as indices into `outcome_labels`.
    allowed: Vec<Vec<OutcomeId>>,
    /// Maximal contexts as sorted measurement-id sets, in canonical order.
    contexts: Vec<Vec<MeasurementId>>,
}

impl Scenario {
    /// Validates and canonicalizes a scenario.
    pub fn new(
        measurements: Vec<String>,
        contexts: Vec<Vec<String>>,
        outcomes: BTreeMap<String, Vec<String>>,
    ) -> Result<Scenario, ScenarioError> {
        if measurements.is_empty() {
            return Err(ScenarioError::NoMeasurements);
        }
        if contexts.is_empty() {
            return Err(ScenarioError::NoContexts);
        }
        let mut names: Vec<String> = measurements;
        names.sort();
        names.dedup();

        let index_of = |name: &str| -> Result<MeasurementId, ScenarioError> {
            names
                .binary_search_by(|n| n.as_str().cmp(name))
                .map_err(|_| ScenarioError::UnknownMeasurement(name.to_string()))
        };

        // Global outcome set: sorted union of the per-measurement labels.
        let mut label_set: BTreeSet<String> = BTreeSet::new();
        for name in &names {
            let labels = outcomes
                .get(name)
                .ok_or_else(|| ScenarioError::EmptyOutcome(name.clone()))?;
            if labels.is_empty() {
                return Err(ScenarioError::EmptyOutcome(name.clone()));
            }
            label_set.extend(labels.iter().cloned());
        }
        let outcome_labels: Vec<String> = label_set.into_iter().collect();
        let mut allowed: Vec<Vec<OutcomeId>> = Vec::with_capacity(names.len());
        for name in &names {
            let mut ids: Vec<OutcomeId> = outcomes[name]
                .iter()
                .map(|l| outcome_labels.binary_search(l).expect("label in union"))
                .collect();
            ids.sort_unstable();
            ids.dedup();
            allowed.push(ids);
        }

        let mut ctx_ids: Vec<Vec<MeasurementId>> = Vec::with_capacity(contexts.len());
        for ctx in &contexts {
            let mut ids: Vec<MeasurementId> = ctx
                .iter()
                .map(|name| index_of(name))
                .collect::<Result<_, _>>()?;
            ids.sort_unstable();
            ids.dedup();
            ctx_ids.push(ids);
        }
        ctx_ids.sort();

        // Antichain check; duplicates surface as mutual containment.
        for i in 0..ctx_ids.len() {
            for j in 0..ctx_ids.len() {
                if i != j && is_subset(&ctx_ids[i], &ctx_ids[j]) {
                    return Err(ScenarioError::Maximality {
                        inner: label_of(&ctx_ids[i], &names),
                        outer: label_of(&ctx_ids[j], &names),
                    });
                }
            }
        }

        // Coverage.
        for (id, name) in names.iter().enumerate() {
            if !ctx_ids.iter().any(|c| c.binary_search(&id).is_ok()) {
                return Err(ScenarioError::Coverage(name.clone()));
            }
        }

        Ok(Scenario {
            measurements: names,
            outcome_labels,
            allowed,
            contexts: ctx_ids,
        })
    }

    pub fn measurement_count(&self) -> usize {
        self.measurements.len()
    }

    pub fn measurement_name(&self, m: MeasurementId) -> &str {
        &self.measurements[m]
    }

    pub fn measurement_id(&self, name: &str) -> Result<MeasurementId, ScenarioError> {
        self.measurements
            .binary_search_by(|n| n.as_str().cmp(name))
            .map_err(|_| ScenarioError::UnknownMeasurement(name.to_string()))
    }

    pub fn measurement_names(&self) -> &[String] {
        &self.measurements
    }

    pub fn outcome_labels(&self) -> &[String] {
        &self.outcome_labels
    }

    pub fn allowed_outcomes(&self, m: MeasurementId) -> &[OutcomeId] {
        &self.allowed[m]
    }

    pub fn context_count(&self) -> usize {
        self.contexts.len()
    }

    pub fn context(&self, i: usize) -> &[MeasurementId] {
        &self.contexts[i]
    }

    pub fn contexts(&self) -> &[Vec<MeasurementId>] {
        &self.contexts
    }

    /// Canonical display label of a measurement set, e.g. `a,b`.
    pub fn set_label(&self, set: &[MeasurementId]) -> String {
        set.iter()
            .map(|&m| self.measurements[m].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn context_label(&self, i: usize) -> String {
        self.set_label(&self.contexts[i])
    }

    pub fn context_by_label(&self, label: &str) -> Option<usize> {
        (0..self.contexts.len()).find(|&i| self.context_label(i) == label)
    }

    /// Sorted intersection of two contexts.
    pub fn context_intersection(&self, i: usize, j: usize) -> Vec<MeasurementId> {
        intersect(&self.contexts[i], &self.contexts[j])
    }

    /// All joint events on a measurement set, in lexicographic order.
    pub fn events(&self, domain: &[MeasurementId]) -> Vec<Event> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(domain.len());
        self.enumerate_events(domain, &mut current, &mut out);
        out
    }

    fn enumerate_events(
        &self,
        domain: &[MeasurementId],
        current: &mut Vec<OutcomeId>,
        out: &mut Vec<Event>,
    ) {
        if current.len() == domain.len() {
            out.push(Event::new(domain.to_vec(), current.clone()));
            return;
        }
        let m = domain[current.len()];
        for &o in &self.allowed[m] {
            current.push(o);
            self.enumerate_events(domain, current, out);
            current.pop();
        }
    }

    pub fn context_events(&self, i: usize) -> Vec<Event> {
        self.events(&self.contexts[i])
    }

    /// Number of joint events on a domain, without enumerating.
    pub fn event_count(&self, domain: &[MeasurementId]) -> u128 {
        domain
            .iter()
            .map(|&m| self.allowed[m].len() as u128)
            .product()
    }

    /// Renders an event as an outcome string in domain order, e.g. `01`.
    pub fn event_key(&self, event: &Event) -> String {
        event
            .outcomes()
            .iter()
            .map(|&o| self.outcome_labels[o].as_str())
            .collect()
    }

    /// Parses an outcome string against a domain. Requires single-character
    /// outcome labels, which the file format enforces.
    pub fn event_from_key(
        &self,
        domain: &[MeasurementId],
        key: &str,
    ) -> Result<Event, ScenarioError> {
        let chars: Vec<String> = key.chars().map(|c| c.to_string()).collect();
        if chars.len() != domain.len() {
            return Err(ScenarioError::BadEventKey {
                key: key.to_string(),
                domain: self.set_label(domain),
            });
        }
        let mut outcomes = Vec::with_capacity(domain.len());
        for (&m, label) in domain.iter().zip(&chars) {
            let id = self
                .outcome_labels
                .binary_search(label)
                .map_err(|_| ScenarioError::UnknownOutcome {
                    measurement: self.measurements[m].clone(),
                    outcome: label.clone(),
                })?;
            if !self.allowed[m].contains(&id) {
                return Err(ScenarioError::UnknownOutcome {
                    measurement: self.measurements[m].clone(),
                    outcome: label.clone(),
                });
            }
            outcomes.push(id);
        }
        Ok(Event::new(domain.to_vec(), outcomes))
    }

    /// The ordered nerve up to dimension `max_q`.
    pub fn nerve(&self, max_q: usize) -> Nerve {
        let n = self.contexts.len();
        let mut per_dim: Vec<Vec<Simplex>> = Vec::new();
        for q in 0..=max_q.min(n.saturating_sub(1)) {
            let mut layer = Vec::new();
            let mut tuple = Vec::with_capacity(q + 1);
            collect_tuples(self, q + 1, 0, &mut tuple, &mut layer);
            per_dim.push(layer);
        }
        if per_dim.is_empty() {
            per_dim.push(Vec::new());
        }
        Nerve { per_dim }
    }

    /// Omits the k-th context of a simplex, recomputing the intersection.
    pub fn face(&self, simplex: &Simplex, k: usize) -> Simplex {
        assert!(k <= simplex.dim(), "face index out of range");
        let mut contexts = simplex.contexts().to_vec();
        contexts.remove(k);
        let intersection = contexts
            .iter()
            .skip(1)
            .fold(self.contexts[contexts[0]].clone(), |acc, &c| {
                intersect(&acc, &self.contexts[c])
            });
        Simplex {
            contexts,
            intersection,
        }
    }

    /// True when the intersection graph of the cover is connected. The
    /// obstruction theorems assume this.
    pub fn cover_is_connected(&self) -> bool {
        let n = self.contexts.len();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            #[allow(clippy::needless_range_loop)]
            for j in 0..n {
                if !seen[j] && !intersect(&self.contexts[i], &self.contexts[j]).is_empty() {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// All global assignments X -> O in canonical order, guarded by a
    /// size cutoff.
    pub fn global_events(&self, cutoff: u128) -> Result<Vec<Event>, TooLarge> {
        let domain: Vec<MeasurementId> = (0..self.measurements.len()).collect();
        let count = self.event_count(&domain);
        if count > cutoff {
            return Err(TooLarge { count, cutoff });
        }
        Ok(self.events(&domain))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("enumeration of {count} assignments exceeds the cutoff {cutoff}")]
pub struct TooLarge {
    pub count: u128,
    pub cutoff: u128,
}

pub const DEFAULT_ENUMERATION_CUTOFF: u128 = 1 << 20;

fn collect_tuples(
    scenario: &Scenario,
    len: usize,
    start: usize,
    tuple: &mut Vec<usize>,
    out: &mut Vec<Simplex>,
) {
    if tuple.len() == len {
        let intersection = tuple
            .iter()
            .skip(1)
            .fold(scenario.contexts[tuple[0]].clone(), |acc, &c| {
                intersect(&acc, &scenario.contexts[c])
            });
        if !intersection.is_empty() {
            out.push(Simplex {
                contexts: tuple.clone(),
                intersection,
            });
        }
        return;
    }
    for i in start..scenario.contexts.len() {
        tuple.push(i);
        collect_tuples(scenario, len, i + 1, tuple, out);
        tuple.pop();
    }
}

fn intersect(a: &[MeasurementId], b: &[MeasurementId]) -> Vec<MeasurementId> {
    a.iter().filter(|m| b.binary_search(m).is_ok()).copied().collect()
}

fn label_of(set: &[MeasurementId], names: &[String]) -> String {
    set.iter()
        .map(|&m| names[m].as_str())
        .collect::<Vec<_>>()
        .join(",")
}

fn is_subset(a: &[MeasurementId], b: &[MeasurementId]) -> bool {
    a.iter().all(|m| b.binary_search(m).is_ok())
}

/// Convenience constructors for the scenarios used throughout the test
/// and bench suites.
pub mod presets {
    use super::*;

    fn binary_outcomes(names: &[&str]) -> BTreeMap<String, Vec<String>> {
        names
            .iter()
            .map(|n| (n.to_string(), vec!["0".to_string(), "1".to_string()]))
            .collect()
    }

    /// Four measurements in a cycle: contexts ab, bc, cd, ad.
    pub fn four_cycle() -> Scenario {
        let names = ["a", "b", "c", "d"];
        Scenario::new(
            names.iter().map(|s| s.to_string()).collect(),
            vec![
                vec!["a".into(), "b".into()],
                vec!["b".into(), "c".into()],
                vec!["c".into(), "d".into()],
                vec!["d".into(), "a".into()],
            ],
            binary_outcomes(&names),
        )
        .expect("valid scenario")
    }

    /// Bell-style labels: contexts {a1,b1}, {a1,b2}, {a2,b1}, {a2,b2}.
    pub fn bell_cycle() -> Scenario {
        let names = ["a1", "a2", "b1", "b2"];
        Scenario::new(
            names.iter().map(|s| s.to_string()).collect(),
            vec![
                vec!["a1".into(), "b1".into()],
                vec!["a1".into(), "b2".into()],
                vec!["a2".into(), "b1".into()],
                vec!["a2".into(), "b2".into()],
            ],
            binary_outcomes(&names),
        )
        .expect("valid scenario")
    }

    /// Three pairwise overlapping contexts: ab, bc, ac.
    pub fn triangle() -> Scenario {
        let names = ["a", "b", "c"];
        Scenario::new(
            names.iter().map(|s| s.to_string()).collect(),
            vec![
                vec!["a".into(), "b".into()],
                vec!["b".into(), "c".into()],
                vec!["a".into(), "c".into()],
            ],
            binary_outcomes(&names),
        )
        .expect("valid scenario")
    }

    /// Three contexts sharing one common measurement, so the nerve has a
    /// 2-simplex: abx, bcx, acx.
    pub fn shared_triple() -> Scenario {
        let names = ["a", "b", "c", "x"];
        Scenario::new(
            names.iter().map(|s| s.to_string()).collect(),
            vec![
                vec!["a".into(), "b".into(), "x".into()],
                vec!["b".into(), "c".into(), "x".into()],
                vec!["a".into(), "c".into(), "x".into()],
            ],
            binary_outcomes(&names),
        )
        .expect("valid scenario")
    }

    /// Single context over one measurement with one outcome.
    pub fn singleton() -> Scenario {
        Scenario::new(
            vec!["a".into()],
            vec![vec!["a".into()]],
            [("a".to_string(), vec!["0".to_string()])].into_iter().collect(),
        )
        .expect("valid scenario")
    }

    /// Two disjoint contexts: ab and cd.
    pub fn disjoint_pair() -> Scenario {
        let names = ["a", "b", "c", "d"];
        Scenario::new(
            names.iter().map(|s| s.to_string()).collect(),
            vec![
                vec!["a".into(), "b".into()],
                vec!["c".into(), "d".into()],
            ],
            binary_outcomes(&names),
        )
        .expect("valid scenario")
    }
}
