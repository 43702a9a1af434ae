//! Top-level contextuality verdicts and quantifiers: the per-section
//! obstruction sweep, hidden-variable decompositions, the contextual
//! fraction by exact LP, signed realizations, and seeded random model
//! generation for property sweeps.
//!
//! Per-section queries are independent pure computations; the sweeps
//! fan out through rayon when the `parallel` feature is on, and the
//! `_seq` variants always run on one thread.

use crate::exec;
use crate::linalg;
use crate::lp;
use crate::model::{default_cutoff, DisturbanceWitness, EmpiricalModel, IncidenceMatrix, ModelError};
use crate::obstruction::{self, ObstructionError, ObstructionResult, Verdict};
use crate::scenario::{Event, Scenario};
use crate::semiring::{Semiring, SemiringError, SemiringKind, Value};
use num::{BigRational, One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("model is disturbing: contexts {a} and {b} disagree on a marginal", a = .0.context_a, b = .0.context_b)]
    Disturbing(Box<DisturbanceWitness>),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Obstruction(#[from] ObstructionError),
    #[error("linear program failed: {0:?}")]
    Lp(lp::LpError),
}

impl From<lp::LpError> for AnalysisError {
    fn from(e: lp::LpError) -> Self {
        AnalysisError::Lp(e)
    }
}

/// One section of the per-model obstruction table.
#[derive(Debug, Clone)]
pub struct SectionReport {
    pub context: usize,
    pub event: Event,
    pub weight: Value,
    pub verdict: Verdict,
}

/// A hidden-variable distribution over global assignments.
#[derive(Debug, Clone)]
pub struct Distribution {
    pub weights: Vec<(Event, Value)>,
}

#[derive(Debug, Clone)]
pub struct ContextualityVerdict {
    pub semiring: String,
    pub contextual: bool,
    /// First obstructed section, when contextual.
    pub witness_section: Option<(usize, Event)>,
    /// A hidden-variable distribution, when one exists.
    pub hidden_variables: Option<Distribution>,
    pub sections: Vec<SectionReport>,
}

/// Contextual fraction data: value = 1 - (maximal noncontextual mass).
#[derive(Debug, Clone)]
pub struct FractionResult {
    pub value: BigRational,
    pub noncontextual_mass: BigRational,
    pub subdistribution: Vec<(Event, BigRational)>,
    /// Dual prices certifying optimality of the LP solve.
    pub dual_certificate: Vec<BigRational>,
}

fn require_nondisturbing(model: &EmpiricalModel) -> Result<(), AnalysisError> {
    match model.disturbance_witness() {
        Some(w) => Err(AnalysisError::Disturbing(Box::new(w))),
        None => Ok(()),
    }
}

fn section_sweep<F>(model: &EmpiricalModel, map: F) -> Result<Vec<SectionReport>, AnalysisError>
where
    F: Fn(Vec<(usize, Event)>) -> Vec<Result<ObstructionResult, ObstructionError>>,
{
    let sections = model.supported_sections();
    let weights: Vec<Value> = sections
        .iter()
        .map(|(ctx, e)| model.weight(*ctx, e))
        .collect();
    let results = map(sections.clone());
    let mut reports = Vec::with_capacity(results.len());
    for (((ctx, event), weight), result) in sections.into_iter().zip(weights).zip(results) {
        reports.push(SectionReport {
            context: ctx,
            event,
            weight,
            verdict: result?.verdict,
        });
    }
    Ok(reports)
}

fn verdict_from_reports(
    model: &EmpiricalModel,
    sections: Vec<SectionReport>,
) -> Result<ContextualityVerdict, AnalysisError> {
    let witness_section = sections
        .iter()
        .find(|r| r.verdict == Verdict::Nontrivial)
        .map(|r| (r.context, r.event.clone()));
    let contextual = witness_section.is_some();
    let hidden_variables = if contextual {
        None
    } else {
        noncontextual_decompose(model)?
    };
    Ok(ContextualityVerdict {
        semiring: model.semiring().name().to_string(),
        contextual,
        witness_section,
        hidden_variables,
        sections,
    })
}

/// Sweeps every supported section with the generalized obstruction;
/// contextual exactly when some section is obstructed. Parallel when
/// the `parallel` feature is enabled.
pub fn is_r_contextual(model: &EmpiricalModel) -> Result<ContextualityVerdict, AnalysisError> {
    require_nondisturbing(model)?;
    let nerve = model.scenario().nerve(2);
    let sections = section_sweep(model, |sections| {
        exec::map_collect(sections, |(ctx, event)| {
            obstruction::generalized_obstruction(model, ctx, &event, &nerve)
        })
    })?;
    verdict_from_reports(model, sections)
}

/// Sequential lane of [`is_r_contextual`]; identical output.
pub fn is_r_contextual_seq(model: &EmpiricalModel) -> Result<ContextualityVerdict, AnalysisError> {
    require_nondisturbing(model)?;
    let nerve = model.scenario().nerve(2);
    let sections = section_sweep(model, |sections| {
        exec::map_collect_seq(sections, |(ctx, event)| {
            obstruction::generalized_obstruction(model, ctx, &event, &nerve)
        })
    })?;
    verdict_from_reports(model, sections)
}

/// Verdicts for a batch of models, fanned out in parallel.
pub fn contextuality_sweep(
    models: &[EmpiricalModel],
) -> Vec<Result<ContextualityVerdict, AnalysisError>> {
    exec::map_collect(models.iter().collect(), is_r_contextual)
}

/// Sequential batch lane; identical output ordering.
pub fn contextuality_sweep_seq(
    models: &[EmpiricalModel],
) -> Vec<Result<ContextualityVerdict, AnalysisError>> {
    exec::map_collect_seq(models.iter().collect(), is_r_contextual_seq)
}

/// Hidden-variable decomposition M·b = p with b >= 0, Σb = 1, over the
/// global assignments; `None` when no such measure exists. Boolean
/// models reduce to the trace of the support-consistent globals.
pub fn noncontextual_decompose(
    model: &EmpiricalModel,
) -> Result<Option<Distribution>, AnalysisError> {
    require_nondisturbing(model)?;
    match model.semiring().kind() {
        SemiringKind::Boolean => boolean_decompose(model),
        SemiringKind::NonnegRational => {
            let fraction = contextual_fraction(model)?;
            if fraction.value.is_zero() {
                let globals = model.global_sections(default_cutoff())?;
                let weights = globals
                    .into_iter()
                    .zip(fraction.subdistribution.iter())
                    .filter(|(_, (_, w))| !w.is_zero())
                    .map(|(g, (_, w))| (g, Value::Rat(w.clone())))
                    .collect();
                Ok(Some(Distribution { weights }))
            } else {
                Ok(None)
            }
        }
        _ => Err(SemiringError::NotSemifield(model.semiring().name().to_string()).into()),
    }
}

/// Boolean decomposition: the support equals the trace of a set of
/// support-consistent globals iff it equals the trace of all of them.
fn boolean_decompose(model: &EmpiricalModel) -> Result<Option<Distribution>, AnalysisError> {
    let scenario = model.scenario();
    let semiring = model.semiring();
    let globals = model.global_sections(default_cutoff())?;
    let consistent: Vec<Event> = globals
        .into_iter()
        .filter(|g| {
            (0..scenario.context_count()).all(|k| {
                let r = g.restrict(scenario.context(k)).expect("global covers context");
                !semiring.is_zero(&model.weight(k, &r))
            })
        })
        .collect();
    // Coverage: every supported event must lie on a consistent global.
    for (ctx, event) in model.supported_sections() {
        let covered = consistent.iter().any(|g| {
            g.restrict(scenario.context(ctx)).expect("global covers context") == event
        });
        if !covered {
            return Ok(None);
        }
    }
    if consistent.is_empty() {
        return Ok(None);
    }
    let weights = consistent
        .into_iter()
        .map(|g| (g, semiring.one()))
        .collect();
    Ok(Some(Distribution { weights }))
}

/// Verifies a decomposition reproduces every table entry exactly.
pub fn decomposition_reproduces_model(
    model: &EmpiricalModel,
    distribution: &Distribution,
) -> bool {
    let scenario = model.scenario();
    let semiring = model.semiring();
    for ctx in 0..scenario.context_count() {
        for event in scenario.context_events(ctx) {
            let total = semiring.sum(
                distribution
                    .weights
                    .iter()
                    .filter(|(g, _)| {
                        g.restrict(scenario.context(ctx)).expect("global covers context") == event
                    })
                    .map(|(_, w)| w),
            );
            if total != model.weight(ctx, &event) {
                return false;
            }
        }
    }
    // Total mass is the unit.
    semiring.is_one(&semiring.sum(distribution.weights.iter().map(|(_, w)| w)))
}

/// Contextual fraction by exact LP: maximize the mass of a
/// subdistribution b with M·b <= p, b >= 0; the fraction is 1 - Σb.
pub fn contextual_fraction(model: &EmpiricalModel) -> Result<FractionResult, AnalysisError> {
    require_nondisturbing(model)?;
    if model.semiring().kind() != SemiringKind::NonnegRational {
        return Err(SemiringError::NotSemifield(model.semiring().name().to_string()).into());
    }
    let matrix = model.incidence_matrix(default_cutoff())?;
    let p = model.table_vector(&matrix);
    let cols = matrix.column_count();
    let a: Vec<Vec<BigRational>> = (0..matrix.row_count())
        .map(|r| {
            (0..cols)
                .map(|c| {
                    if matrix.entry(r, c) {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let b: Vec<BigRational> = p.iter().map(Value::to_rational).collect();
    let c = vec![BigRational::one(); cols];
    let optimum = lp::maximize(&c, &a, &b)?;

    let noncontextual_mass = optimum.objective.clone();
    let value = BigRational::one() - &noncontextual_mass;
    let subdistribution = matrix
        .columns
        .iter()
        .cloned()
        .zip(optimum.x.iter().cloned())
        .collect();
    Ok(FractionResult {
        value,
        noncontextual_mass,
        subdistribution,
        dual_certificate: optimum.duals,
    })
}

/// Solves M·b = p exactly over the rationals with no sign constraint.
/// Succeeds for every non-disturbing model; the solution is the
/// first-pivot particular solution with free parameters set to zero.
pub fn signed_realization(
    model: &EmpiricalModel,
) -> Result<Vec<(Event, BigRational)>, AnalysisError> {
    require_nondisturbing(model)?;
    let matrix = model.incidence_matrix(default_cutoff())?;
    let p = model.table_vector(&matrix);
    let a = incidence_as_rational(&matrix);
    let rhs: Vec<BigRational> = p.iter().map(Value::to_rational).collect();
    let solution = linalg::gauss_solve(&a, &rhs)
        .expect("non-disturbing models always admit signed realizations");
    // Exact residual check.
    for (row, want) in a.iter().zip(&rhs) {
        let got: BigRational = row.iter().zip(&solution).map(|(m, x)| m * x).sum();
        assert_eq!(&got, want, "residual must vanish exactly");
    }
    Ok(matrix.columns.iter().cloned().zip(solution).collect())
}

fn incidence_as_rational(matrix: &IncidenceMatrix) -> Vec<Vec<BigRational>> {
    (0..matrix.row_count())
        .map(|r| {
            (0..matrix.column_count())
                .map(|c| {
                    if matrix.entry(r, c) {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Support-level collapse to the Boolean semiring, revalidated.
pub fn possibilistic_collapse(model: &EmpiricalModel) -> EmpiricalModel {
    let collapsed = model.possibilistic_collapse();
    debug_assert!(collapsed.is_nondisturbing() || !model.is_nondisturbing());
    collapsed
}

/// Independent brute-force extendability oracle for one section: over
/// the Booleans an exhaustive scan of all support-subset families, over
/// the rationals a Gaussian/Fourier–Motzkin decision of the pinned
/// system. No code is shared with the production decision paths.
pub fn brute_force_section_oracle(
    model: &EmpiricalModel,
    base: usize,
    event: &Event,
) -> Result<bool, AnalysisError> {
    require_nondisturbing(model)?;
    match model.semiring().kind() {
        SemiringKind::Boolean => Ok(boolean_family_enumeration(model, base, event)),
        SemiringKind::NonnegRational => {
            let matrix = model.incidence_matrix(default_cutoff())?;
            let p = model.table_vector(&matrix);
            let mut rows = incidence_as_rational(&matrix);
            let mut rhs: Vec<BigRational> = p.iter().map(Value::to_rational).collect();
            let base_domain = model.scenario().context(base);
            rows.push(
                matrix
                    .columns
                    .iter()
                    .map(|g| {
                        if &g.restrict(base_domain).expect("global covers context") == event {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect(),
            );
            rhs.push(model.weight(base, event).to_rational());
            Ok(linalg::nonneg_solution_exists(&rows, &rhs))
        }
        _ => Err(SemiringError::NotSemifield(model.semiring().name().to_string()).into()),
    }
}

/// Plain enumeration over every family of nonempty support subsets,
/// pinned at the base: no ordering heuristics, no forward checking.
fn boolean_family_enumeration(model: &EmpiricalModel, base: usize, event: &Event) -> bool {
    let scenario = model.scenario();
    let n = scenario.context_count();
    let supports: Vec<Vec<Event>> = (0..n).map(|i| model.support(i).cloned().collect()).collect();
    let pinned_bit = match supports[base].iter().position(|s| s == event) {
        Some(b) => b,
        None => return false,
    };

    let compatible = |i: usize, mi: u32, j: usize, mj: u32| -> bool {
        let overlap = scenario.context_intersection(i, j);
        if overlap.is_empty() {
            return true;
        }
        let restrict_set = |ctx: usize, mask: u32| -> Vec<Event> {
            let mut out: Vec<Event> = supports[ctx]
                .iter()
                .enumerate()
                .filter(|(t, _)| mask & (1 << *t) != 0)
                .map(|(_, e)| e.restrict(&overlap).expect("overlap within context"))
                .collect();
            out.sort();
            out.dedup();
            out
        };
        restrict_set(i, mi) == restrict_set(j, mj)
    };

    let mut masks = vec![0u32; n];
    fn rec(
        n: usize,
        idx: usize,
        base: usize,
        pinned: u32,
        supports: &[Vec<Event>],
        masks: &mut Vec<u32>,
        compatible: &dyn Fn(usize, u32, usize, u32) -> bool,
    ) -> bool {
        if idx == n {
            return true;
        }
        let options: Vec<u32> = if idx == base {
            vec![pinned]
        } else {
            (1..(1u32 << supports[idx].len())).collect()
        };
        for mask in options {
            if (0..idx).all(|j| compatible(j, masks[j], idx, mask)) {
                masks[idx] = mask;
                if rec(n, idx + 1, base, pinned, supports, masks, compatible) {
                    return true;
                }
            }
        }
        false
    }
    rec(n, 0, base, 1 << pinned_bit, &supports, &mut masks, &compatible)
}

/// Brute-force noncontextuality oracle: factorizability over the global
/// assignments decided without the simplex (subset scan over the
/// Booleans, Gaussian + Fourier–Motzkin over the rationals).
pub fn brute_force_noncontextual_oracle(model: &EmpiricalModel) -> Result<bool, AnalysisError> {
    require_nondisturbing(model)?;
    match model.semiring().kind() {
        SemiringKind::Boolean => Ok(boolean_decompose(model)?.is_some()),
        SemiringKind::NonnegRational => {
            let matrix = model.incidence_matrix(default_cutoff())?;
            let p = model.table_vector(&matrix);
            let rows = incidence_as_rational(&matrix);
            let rhs: Vec<BigRational> = p.iter().map(Value::to_rational).collect();
            Ok(linalg::nonneg_solution_exists(&rows, &rhs))
        }
        _ => Err(SemiringError::NotSemifield(model.semiring().name().to_string()).into()),
    }
}

/// Which preset scenario shape a generated model lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioShape {
    FourCycle,
    Triangle,
}

impl ScenarioShape {
    pub fn build(self) -> Scenario {
        match self {
            ScenarioShape::FourCycle => crate::scenario::presets::four_cycle(),
            ScenarioShape::Triangle => crate::scenario::presets::triangle(),
        }
    }
}

/// Seeded generator of exactly non-disturbing rational models on cycle
/// scenarios: single-measurement marginals are drawn once, then every
/// context picks a joint table with those marginals. All denominators
/// divide `denominator`.
pub fn random_nondisturbing_rational(
    shape: ScenarioShape,
    seed: u64,
    denominator: i64,
) -> EmpiricalModel {
    let scenario = shape.build();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = denominator;
    // Marginal numerators: probability that each measurement yields "1".
    let marginals: Vec<i64> = (0..scenario.measurement_count())
        .map(|_| rng.gen_range(0..=d))
        .collect();
    let mut tables: Vec<BTreeMap<Event, Value>> = Vec::new();
    for i in 0..scenario.context_count() {
        let ctx = scenario.context(i);
        assert_eq!(ctx.len(), 2, "generator covers binary cycle contexts");
        let (x, y) = (ctx[0], ctx[1]);
        let (px, py) = (marginals[x], marginals[y]);
        // Joint P(x=1, y=1) numerator t within the Fréchet bounds.
        let lo = 0.max(px + py - d);
        let hi = px.min(py);
        let t = rng.gen_range(lo..=hi);
        let cells = [
            ("00", d - px - py + t),
            ("01", py - t),
            ("10", px - t),
            ("11", t),
        ];
        let mut table = BTreeMap::new();
        for (key, num) in cells {
            if num != 0 {
                let event = scenario.event_from_key(ctx, key).expect("binary event");
                table.insert(event, Value::ratio(num, d));
            }
        }
        tables.push(table);
    }
    EmpiricalModel::new(scenario, Semiring::nonneg_rational(), tables)
        .expect("generated tables are normalized and exact")
}

/// Seeded generator of non-disturbing Boolean models: a nonempty
/// allowed-outcome set per measurement, then per context a support with
/// exactly those projections.
pub fn random_nondisturbing_boolean(shape: ScenarioShape, seed: u64) -> EmpiricalModel {
    let scenario = shape.build();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = Semiring::boolean();
    let allowed: Vec<Vec<usize>> = (0..scenario.measurement_count())
        .map(|_| match rng.gen_range(0..3) {
            0 => vec![0],
            1 => vec![1],
            _ => vec![0, 1],
        })
        .collect();
    let mut tables: Vec<BTreeMap<Event, Value>> = Vec::new();
    for i in 0..scenario.context_count() {
        let ctx = scenario.context(i);
        let (x, y) = (ctx[0], ctx[1]);
        // Candidate supports: subsets of allowed[x] × allowed[y] whose
        // projections are exactly the allowed sets.
        let events: Vec<(usize, usize)> = allowed[x]
            .iter()
            .flat_map(|&ox| allowed[y].iter().map(move |&oy| (ox, oy)))
            .collect();
        let full = (1u32 << events.len()) - 1;
        let candidates: Vec<u32> = (1..=full)
            .filter(|mask| {
                let mut seen_x = [false; 2];
                let mut seen_y = [false; 2];
                for (t, (ox, oy)) in events.iter().enumerate() {
                    if mask & (1 << t) != 0 {
                        seen_x[*ox] = true;
                        seen_y[*oy] = true;
                    }
                }
                allowed[x].iter().all(|&o| seen_x[o]) && allowed[y].iter().all(|&o| seen_y[o])
            })
            .collect();
        let mask = candidates[rng.gen_range(0..candidates.len())];
        let mut table = BTreeMap::new();
        for (t, (ox, oy)) in events.iter().enumerate() {
            if mask & (1 << t) != 0 {
                let event = Event::new(vec![x, y], vec![*ox, *oy]);
                table.insert(event, b.one());
            }
        }
        tables.push(table);
    }
    let model = EmpiricalModel::new(scenario, b, tables).expect("projections are normalized");
    debug_assert!(model.is_nondisturbing());
    model
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets;
    use num::Signed;

    #[test]
    fn correlated_cycle_is_boolean_contextual_at_the_diagonal() {
        let m = presets::correlated_cycle_boolean();
        let v = is_r_contextual(&m).unwrap();
        assert!(v.contextual);
        let (ctx, event) = v.witness_section.unwrap();
        assert_eq!(m.scenario().context_label(ctx), "a,d");
        assert_eq!(m.scenario().event_key(&event), "01");
        assert!(v.hidden_variables.is_none());
    }

    #[test]
    fn parallel_and_sequential_sweeps_agree() {
        for m in [
            presets::correlated_cycle_boolean(),
            presets::pr_box(),
            presets::deterministic(),
        ] {
            let a = is_r_contextual(&m).unwrap();
            let b = is_r_contextual_seq(&m).unwrap();
            assert_eq!(a.contextual, b.contextual);
            assert_eq!(a.witness_section, b.witness_section);
            let av: Vec<_> = a.sections.iter().map(|s| s.verdict).collect();
            let bv: Vec<_> = b.sections.iter().map(|s| s.verdict).collect();
            assert_eq!(av, bv);
        }
    }

    #[test]
    fn deterministic_model_decomposes_to_a_point_mass() {
        let m = presets::deterministic();
        let v = is_r_contextual(&m).unwrap();
        assert!(!v.contextual);
        let hv = v.hidden_variables.unwrap();
        assert_eq!(hv.weights.len(), 1);
        let (global, weight) = &hv.weights[0];
        assert_eq!(m.scenario().event_key(global), "0000");
        assert_eq!(weight, &m.semiring().one());
        assert!(decomposition_reproduces_model(&m, &hv));
    }

    #[test]
    fn fully_mixed_model_decomposes() {
        let m = presets::fully_mixed();
        let d = noncontextual_decompose(&m).unwrap().unwrap();
        assert!(decomposition_reproduces_model(&m, &d));
    }

    #[test]
    fn correlated_cycle_boolean_has_no_decomposition() {
        let m = presets::correlated_cycle_boolean();
        assert!(noncontextual_decompose(&m).unwrap().is_none());
    }

    #[test]
    fn contextual_fraction_anchors() {
        assert_eq!(
            contextual_fraction(&presets::deterministic()).unwrap().value,
            BigRational::zero()
        );
        assert_eq!(
            contextual_fraction(&presets::pr_box()).unwrap().value,
            BigRational::one()
        );
        // The equal mixture lies on the noncontextual boundary; the
        // fraction becomes strictly positive only past visibility 1/2,
        // growing as 2v - 1.
        assert_eq!(
            contextual_fraction(&presets::pr_mixed_half()).unwrap().value,
            BigRational::zero()
        );
        assert_eq!(
            contextual_fraction(&presets::pr_mixed_three_quarters())
                .unwrap()
                .value,
            linalg::q(1, 2)
        );
        assert_eq!(
            contextual_fraction(&presets::correlated_cycle_rational())
                .unwrap()
                .value,
            linalg::q(1, 2)
        );
    }

    #[test]
    fn fraction_is_piecewise_linear_along_the_pr_noise_segment() {
        // CF(v·PR + (1-v)·mixed) = max(0, 2v - 1), checked at exact
        // rational visibilities on both sides of the kink.
        for (num, den, want) in [
            (1i64, 4i64, BigRational::zero()),
            (1, 2, BigRational::zero()),
            (5, 8, linalg::q(1, 4)),
            (3, 4, linalg::q(1, 2)),
            (7, 8, linalg::q(3, 4)),
            (1, 1, BigRational::one()),
        ] {
            let m = presets::mix(
                &presets::pr_box(),
                &presets::fully_mixed(),
                Value::ratio(num, den),
            );
            assert_eq!(contextual_fraction(&m).unwrap().value, want, "v = {num}/{den}");
        }
    }

    #[test]
    fn fraction_subdistribution_is_dominated_by_the_model() {
        let m = presets::pr_mixed_half();
        let f = contextual_fraction(&m).unwrap();
        let total: BigRational = f.subdistribution.iter().map(|(_, w)| w.clone()).sum();
        assert_eq!(total, f.noncontextual_mass);
        // M·b <= p componentwise.
        let s = m.scenario();
        for ctx in 0..s.context_count() {
            for event in s.context_events(ctx) {
                let routed: BigRational = f
                    .subdistribution
                    .iter()
                    .filter(|(g, _)| {
                        g.restrict(s.context(ctx)).expect("global covers context") == event
                    })
                    .map(|(_, w)| w.clone())
                    .sum();
                assert!(routed <= m.weight(ctx, &event).to_rational());
            }
        }
    }

    #[test]
    fn signed_realization_of_the_pr_box_needs_negative_weights() {
        let m = presets::pr_box();
        let b = signed_realization(&m).unwrap();
        assert!(b.iter().any(|(_, w)| w.is_negative()));
    }

    #[test]
    fn signed_realization_of_the_deterministic_model_is_the_point_mass() {
        let m = presets::deterministic();
        let b = signed_realization(&m).unwrap();
        let nonzero: Vec<_> = b.iter().filter(|(_, w)| !w.is_zero()).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(m.scenario().event_key(&nonzero[0].0), "0000");
        assert_eq!(nonzero[0].1, BigRational::one());
    }

    #[test]
    fn oracle_agrees_with_the_sweep_on_presets() {
        for m in [
            presets::correlated_cycle_boolean(),
            presets::pr_box().possibilistic_collapse(),
            presets::deterministic().possibilistic_collapse(),
        ] {
            let nerve = m.scenario().nerve(2);
            for (ctx, event) in m.supported_sections() {
                let implementation =
                    obstruction::generalized_obstruction(&m, ctx, &event, &nerve)
                        .unwrap()
                        .is_trivial();
                let oracle = brute_force_section_oracle(&m, ctx, &event).unwrap();
                assert_eq!(implementation, oracle);
            }
        }
    }

    #[test]
    fn rational_oracle_agrees_on_presets() {
        for m in [presets::pr_box(), presets::deterministic(), presets::fully_mixed()] {
            let nerve = m.scenario().nerve(2);
            for (ctx, event) in m.supported_sections() {
                let implementation =
                    obstruction::generalized_obstruction(&m, ctx, &event, &nerve)
                        .unwrap()
                        .is_trivial();
                let oracle = brute_force_section_oracle(&m, ctx, &event).unwrap();
                assert_eq!(implementation, oracle);
            }
        }
    }

    #[test]
    fn random_rational_models_are_nondisturbing_and_reproducible() {
        for seed in 0..20 {
            let a = random_nondisturbing_rational(ScenarioShape::FourCycle, seed, 12);
            let b = random_nondisturbing_rational(ScenarioShape::FourCycle, seed, 12);
            assert_eq!(a, b, "seeded generation must be reproducible");
            assert!(a.is_nondisturbing());
            let t = random_nondisturbing_rational(ScenarioShape::Triangle, seed, 12);
            assert!(t.is_nondisturbing());
        }
    }

    #[test]
    fn random_boolean_models_are_nondisturbing_and_reproducible() {
        for seed in 0..20 {
            let a = random_nondisturbing_boolean(ScenarioShape::FourCycle, seed);
            let b = random_nondisturbing_boolean(ScenarioShape::FourCycle, seed);
            assert_eq!(a, b);
            assert!(a.is_nondisturbing());
            let t = random_nondisturbing_boolean(ScenarioShape::Triangle, seed);
            assert!(t.is_nondisturbing());
        }
    }

    #[test]
    fn collapse_of_a_noisy_pr_box_is_boolean_noncontextual() {
        // Full support after collapse, hence a Boolean decomposition,
        // even though the rational model is contextual.
        let m = presets::pr_mixed_three_quarters();
        assert!(is_r_contextual(&m).unwrap().contextual);
        let collapsed = possibilistic_collapse(&m);
        let v = is_r_contextual(&collapsed).unwrap();
        assert!(!v.contextual);
        assert!(v.hidden_variables.is_some());
    }

    #[test]
    fn boolean_contextual_implies_rational_contextual_on_matching_support() {
        // The correlated cycle pair shares its support pattern.
        let boolean = presets::correlated_cycle_boolean();
        let rational = presets::correlated_cycle_rational();
        let vb = is_r_contextual(&boolean).unwrap();
        let vr = is_r_contextual(&rational).unwrap();
        assert!(vb.contextual);
        assert!(vr.contextual);
    }
}
