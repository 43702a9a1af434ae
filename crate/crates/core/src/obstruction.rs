//! Obstructions to extending a local section to a compatible family.
//!
//! Two computations live here. The classical one works with ring
//! coefficients on the support basis: the coboundary z of a canonical
//! extension is tested for exactness against mass-zero 0-cochains, so
//! negative coefficients may cancel around the cover and mask genuinely
//! contextual behaviour. The generalized one never leaves the semifield
//! the model is defined over: a section is unobstructed exactly when a
//! compatible family of nonnegative vectors pinned to that section
//! exists within the model, decided by backtracking search over Boolean
//! supports and by exact pinned LP over the rationals. The difference
//! cochain (d⁺c, d⁻c) of the canonical extension, with its row
//! R-stochastic witnesses, is attached to every verdict.

use crate::cochain::{
    self, Cochain, CochainError, DifferenceCochain, FreeVector, RelativeMask, RowStochastic,
};
use crate::linalg;
use crate::lp;
use crate::model::{DisturbanceWitness, EmpiricalModel, ModelError};
use crate::scenario::{Event, Nerve};
use crate::semiring::{Semiring, SemiringError, SemiringKind, Value};
use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ObstructionError {
    #[error("model is disturbing: contexts {a} and {b} disagree on a marginal", a = .0.context_a, b = .0.context_b)]
    Disturbing(Box<DisturbanceWitness>),
    #[error("no supported section of context `{0}` agrees with the base section")]
    NoAgreeingSection(String),
    #[error("event has zero measure in context `{0}`")]
    ZeroMeasureEvent(String),
    #[error("the context cover is not connected")]
    DisconnectedCover,
    #[error("ring `{ring}` cannot carry the model value `{value}` exactly")]
    RingMismatch { ring: String, value: String },
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("linear program failed: {0:?}")]
    Lp(lp::LpError),
}

impl From<lp::LpError> for ObstructionError {
    fn from(e: lp::LpError) -> Self {
        ObstructionError::Lp(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Trivial,
    Nontrivial,
}

/// Evidence for a nontrivial verdict.
#[derive(Debug, Clone)]
pub enum Certificate {
    /// Boolean search space exhausted; `nodes` candidates visited.
    ExhaustedSearch { nodes: u64 },
    /// Farkas dual vector for the infeasible pinned LP system.
    FarkasDual(Vec<BigRational>),
    /// The ring linear system z = du has no solution.
    NoRingSolution,
}

#[derive(Debug, Clone)]
pub enum ObstructionWitness {
    /// A compatible family, one vector per context in canonical order.
    Family(Vec<FreeVector>),
    Infeasible(Certificate),
}

#[derive(Debug, Clone)]
pub struct ObstructionResult {
    pub base_context: usize,
    pub base_section: FreeVector,
    pub verdict: Verdict,
    pub witness: ObstructionWitness,
    /// Difference data of the canonical extension.
    pub difference: DifferenceCochain,
}

impl ObstructionResult {
    pub fn is_trivial(&self) -> bool {
        self.verdict == Verdict::Trivial
    }
}

fn require_nondisturbing(model: &EmpiricalModel) -> Result<(), ObstructionError> {
    match model.disturbance_witness() {
        Some(w) => Err(ObstructionError::Disturbing(Box::new(w))),
        None => Ok(()),
    }
}

fn require_connected(model: &EmpiricalModel) -> Result<(), ObstructionError> {
    if model.scenario().cover_is_connected() {
        Ok(())
    } else {
        Err(ObstructionError::DisconnectedCover)
    }
}

fn require_supported(
    model: &EmpiricalModel,
    base: usize,
    event: &Event,
) -> Result<Value, ObstructionError> {
    let weight = model.weight(base, event);
    if model.semiring().is_zero(&weight) {
        return Err(ObstructionError::ZeroMeasureEvent(
            model.scenario().context_label(base),
        ));
    }
    Ok(weight)
}

/// Canonical extension of the section μ(event)·[event]: for every other
/// context, the lexicographically least supported event agreeing with
/// `event` on the intersection with the base context, carrying the same
/// coefficient. Deterministic; the verdict of any obstruction built on
/// top does not depend on the choice.
pub fn extend_section(
    model: &EmpiricalModel,
    base: usize,
    event: &Event,
    nerve: &Nerve,
) -> Result<Cochain, ObstructionError> {
    require_nondisturbing(model)?;
    let weight = require_supported(model, base, event)?;
    let scenario = model.scenario();
    let semiring = model.semiring();
    let mut values = Vec::with_capacity(scenario.context_count());
    for k in 0..scenario.context_count() {
        if k == base {
            values.push(FreeVector::singleton(event.clone(), weight.clone(), semiring));
            continue;
        }
        let overlap = scenario.context_intersection(base, k);
        let target = if overlap.is_empty() {
            None
        } else {
            Some(event.restrict(&overlap).expect("overlap within base"))
        };
        let agreeing = model.support(k).find(|s| match &target {
            None => true,
            Some(t) => &s.restrict(&overlap).expect("overlap within context") == t,
        });
        match agreeing {
            Some(s) => values.push(FreeVector::singleton(s.clone(), weight.clone(), semiring)),
            None => {
                return Err(ObstructionError::NoAgreeingSection(
                    scenario.context_label(k),
                ))
            }
        }
    }
    Ok(Cochain::new(nerve, 0, values)?)
}

/// Difference cochain of a degree-0 cochain over a semifield: the pair
/// (d⁺c, d⁻c) plus, per 1-simplex, the canonical row R-stochastic
/// operator g with (d⁺c)·g = d⁻c. The identity witnesses agreeing
/// pairs; a rank-one operator witnesses pairs of equal nonzero mass;
/// remaining corner cases carry no matrix, the pair itself representing
/// the class.
pub fn difference_of(
    model: &EmpiricalModel,
    c: &Cochain,
    nerve: &Nerve,
) -> Result<DifferenceCochain, ObstructionError> {
    let semiring = model.semiring();
    if !semiring.has_division() {
        return Err(SemiringError::NotSemifield(semiring.name().to_string()).into());
    }
    let scenario = model.scenario();
    let plus = cochain::coboundary_plus(scenario, nerve, c, semiring)?;
    let minus = cochain::coboundary_minus(scenario, nerve, c, semiring)?;
    let mut witnesses = Vec::new();
    for (simplex, (p, m)) in nerve
        .simplices(c.degree() + 1)
        .iter()
        .zip(plus.values().iter().zip(minus.values()))
    {
        let basis = scenario.events(simplex.intersection());
        if p == m {
            witnesses.push(Some(RowStochastic::identity(basis, semiring)));
            continue;
        }
        let mass_p = p.mass(semiring);
        let mass_m = m.mass(semiring);
        if !semiring.is_zero(&mass_p) && mass_p == mass_m {
            let g = RowStochastic::rank_one(basis, m, &mass_p, semiring)?;
            debug_assert!(g.is_row_stochastic(semiring));
            debug_assert_eq!(&g.apply(p, semiring), m);
            witnesses.push(Some(g));
        } else {
            witnesses.push(None);
        }
    }
    Ok(DifferenceCochain {
        base: c.clone(),
        plus,
        minus,
        witnesses,
    })
}

/// Classical ring-coefficient obstruction of a supported section.
///
/// Builds the canonical extension c, its coboundary z = d⁰c, verifies z
/// lies in the complex relative to the base context, and decides
/// whether z = d⁰u for a 0-cochain u of mass-zero vectors on the
/// support basis. Solvable means trivial, and c - u is a compatible
/// witness family whose base component equals the section up to a
/// mass-zero correction (the "Z" shapes that negative coefficients
/// enable).
pub fn classical_obstruction(
    model: &EmpiricalModel,
    base: usize,
    event: &Event,
    ring: &Semiring,
    nerve: &Nerve,
) -> Result<ObstructionResult, ObstructionError> {
    if !ring.has_negation() {
        return Err(SemiringError::NoNegation(ring.name().to_string()).into());
    }
    require_connected(model)?;
    require_nondisturbing(model)?;
    let scenario = model.scenario();

    let extension = extend_section(model, base, event, nerve)?;
    let ring_extension = embed_cochain(&extension, model.semiring(), ring, nerve)?;
    let z = cochain::coboundary_ring(scenario, nerve, &ring_extension, ring)?;
    let relative = cochain::relative_member(scenario, nerve, &z, RelativeMask { base }, ring)?;
    assert!(relative, "coboundary of an agreeing extension must be relative");

    // Variable layout: one coordinate per supported event per context.
    let mut offsets = Vec::with_capacity(scenario.context_count());
    let mut total = 0usize;
    let supports: Vec<Vec<Event>> = (0..scenario.context_count())
        .map(|i| model.support(i).cloned().collect())
        .collect();
    for support in &supports {
        offsets.push(total);
        total += support.len();
    }

    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut rhs: Vec<BigRational> = Vec::new();

    // Augmentation constraints: every u_j has zero total mass.
    for (j, support) in supports.iter().enumerate() {
        let mut row = vec![BigRational::zero(); total];
        for t in 0..support.len() {
            row[offsets[j] + t] = BigRational::one();
        }
        rows.push(row);
        rhs.push(BigRational::zero());
    }

    // Coboundary rows: (d⁰u)(σ) = z(σ) componentwise on the pushed
    // support basis of each 1-simplex.
    for (simplex, z_value) in nerve.simplices(1).iter().zip(z.values()) {
        let i = simplex.contexts()[0];
        let j = simplex.contexts()[1];
        let overlap = simplex.intersection();
        let mut basis: Vec<Event> = model.pushed_support(i, overlap);
        for e in model.pushed_support(j, overlap) {
            if !basis.contains(&e) {
                basis.push(e);
            }
        }
        basis.sort();
        for w in &basis {
            let mut row = vec![BigRational::zero(); total];
            for (t, s) in supports[j].iter().enumerate() {
                if &s.restrict(overlap).expect("overlap within context") == w {
                    row[offsets[j] + t] += BigRational::one();
                }
            }
            for (t, s) in supports[i].iter().enumerate() {
                if &s.restrict(overlap).expect("overlap within context") == w {
                    row[offsets[i] + t] -= BigRational::one();
                }
            }
            rows.push(row);
            rhs.push(z_value.coeff(w, ring).to_rational());
        }
        // z is supported on pushed supports by construction.
        debug_assert!(z_value.coeffs().keys().all(|e| basis.contains(e)));
    }

    let solution = match ring.kind() {
        SemiringKind::Integer => {
            let int_rows: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|r| r.iter().map(|q| rational_to_int(q, ring)).collect::<Result<_, _>>())
                .collect::<Result<_, _>>()?;
            let int_rhs: Vec<BigInt> = rhs
                .iter()
                .map(|q| rational_to_int(q, ring))
                .collect::<Result<_, _>>()?;
            linalg::solve_integer(&int_rows, &int_rhs)
                .map(|xs| xs.into_iter().map(Value::Int).collect::<Vec<_>>())
        }
        SemiringKind::Rational => linalg::gauss_solve(&rows, &rhs)
            .map(|xs| xs.into_iter().map(Value::Rat).collect::<Vec<_>>()),
        _ => unreachable!("negation-capable rings are integer or rational"),
    };

    let difference = difference_data(model, &extension, nerve)?;
    let base_section = extension.value(base).clone();

    match solution {
        Some(u_flat) => {
            // Witness family r = c - u.
            let mut family = Vec::with_capacity(scenario.context_count());
            for (j, support) in supports.iter().enumerate() {
                let u_j = FreeVector::from_terms(
                    scenario.context(j).to_vec(),
                    support
                        .iter()
                        .cloned()
                        .zip(u_flat[offsets[j]..offsets[j] + support.len()].iter().cloned()),
                    ring,
                );
                let c_j = ring_extension.value(j);
                family.push(c_j.sub(&u_j, ring)?);
            }
            let family_cochain = Cochain::new(nerve, 0, family.clone())?;
            assert!(
                cochain::is_cocycle(scenario, nerve, &family_cochain, ring)?,
                "witness family must be compatible"
            );
            let embedded_base = embed_vector(&base_section, model.semiring(), ring)?;
            let correction = family[base].sub(&embedded_base, ring)?;
            assert!(
                ring.is_zero(&correction.mass(ring)),
                "base correction must have zero mass"
            );
            Ok(ObstructionResult {
                base_context: base,
                base_section,
                verdict: Verdict::Trivial,
                witness: ObstructionWitness::Family(family),
                difference,
            })
        }
        None => Ok(ObstructionResult {
            base_context: base,
            base_section,
            verdict: Verdict::Nontrivial,
            witness: ObstructionWitness::Infeasible(Certificate::NoRingSolution),
            difference,
        }),
    }
}

fn rational_to_int(q: &BigRational, ring: &Semiring) -> Result<BigInt, ObstructionError> {
    if q.denom().is_one() {
        Ok(q.numer().clone())
    } else {
        Err(ObstructionError::RingMismatch {
            ring: ring.name().to_string(),
            value: q.to_string(),
        })
    }
}

fn embed_cochain(
    c: &Cochain,
    from: &Semiring,
    to: &Semiring,
    nerve: &Nerve,
) -> Result<Cochain, ObstructionError> {
    let values: Vec<FreeVector> = c
        .values()
        .iter()
        .map(|v| embed_vector(v, from, to))
        .collect::<Result<_, _>>()?;
    Ok(Cochain::new(nerve, c.degree(), values)?)
}

fn embed_vector(
    v: &FreeVector,
    from: &Semiring,
    to: &Semiring,
) -> Result<FreeVector, ObstructionError> {
    let terms: Vec<(Event, Value)> = v
        .coeffs()
        .iter()
        .map(|(e, c)| {
            let q = c.to_rational();
            let value = match to.kind() {
                SemiringKind::Integer => Value::Int(rational_to_int(&q, to)?),
                SemiringKind::Rational | SemiringKind::NonnegRational => Value::Rat(q),
                _ => {
                    return Err(ObstructionError::RingMismatch {
                        ring: to.name().to_string(),
                        value: c.to_string(),
                    })
                }
            };
            Ok((e.clone(), value))
        })
        .collect::<Result<_, _>>()?;
    let _ = from;
    Ok(FreeVector::from_terms(v.domain().to_vec(), terms, to))
}

fn difference_data(
    model: &EmpiricalModel,
    extension: &Cochain,
    nerve: &Nerve,
) -> Result<DifferenceCochain, ObstructionError> {
    if model.semiring().has_division() {
        difference_of(model, extension, nerve)
    } else {
        // Ring-only call paths (integer-coefficient models) still carry
        // the raw coboundary pair, without stochastic witnesses.
        let plus = cochain::coboundary_plus(model.scenario(), nerve, extension, model.semiring())?;
        let minus =
            cochain::coboundary_minus(model.scenario(), nerve, extension, model.semiring())?;
        let witnesses = vec![None; nerve.simplices(extension.degree() + 1).len()];
        Ok(DifferenceCochain {
            base: extension.clone(),
            plus,
            minus,
            witnesses,
        })
    }
}

/// Generalized obstruction over the model's own semifield.
///
/// Trivial exactly when the section extends to a compatible family that
/// the model itself supports: over the Booleans, a family of support
/// subsets pinned to {event} with agreeing possibilistic marginals;
/// over the nonnegative rationals, a global hidden-variable measure
/// reproducing every table and routing exactly μ(event) through the
/// event (the pinned LP M·b = p, Σ_{g ⊃ event} b_g = μ(event), b ≥ 0).
pub fn generalized_obstruction(
    model: &EmpiricalModel,
    base: usize,
    event: &Event,
    nerve: &Nerve,
) -> Result<ObstructionResult, ObstructionError> {
    let semiring = model.semiring();
    if !semiring.has_division() {
        return Err(SemiringError::NotSemifield(semiring.name().to_string()).into());
    }
    require_connected(model)?;
    require_nondisturbing(model)?;
    let weight = require_supported(model, base, event)?;

    let extension = extend_section(model, base, event, nerve)?;
    let difference = difference_of(model, &extension, nerve)?;
    let base_section = FreeVector::singleton(event.clone(), weight.clone(), semiring);

    let (verdict, witness) = match semiring.kind() {
        SemiringKind::Boolean => boolean_family_search(model, base, event),
        SemiringKind::NonnegRational => pinned_lp(model, base, event, &weight)?,
        _ => {
            return Err(SemiringError::NotSemifield(semiring.name().to_string()).into());
        }
    };

    if let ObstructionWitness::Family(family) = &witness {
        let family_cochain = Cochain::new(nerve, 0, family.clone())?;
        assert!(
            cochain::is_cocycle(model.scenario(), nerve, &family_cochain, semiring)?,
            "witness family must be compatible"
        );
        assert_eq!(family[base], base_section, "family must pin the section");
    }

    Ok(ObstructionResult {
        base_context: base,
        base_section,
        verdict,
        witness,
        difference,
    })
}

/// Backtracking search for a compatible family of support subsets with
/// the base context pinned to {event}. Contexts are visited in BFS
/// order from the base so marginal constraints propagate early.
fn boolean_family_search(
    model: &EmpiricalModel,
    base: usize,
    event: &Event,
) -> (Verdict, ObstructionWitness) {
    let scenario = model.scenario();
    let semiring = model.semiring();
    let n = scenario.context_count();
    let supports: Vec<Vec<Event>> = (0..n).map(|i| model.support(i).cloned().collect()).collect();

    // Projection tables: for each unordered context pair with nonempty
    // intersection, map each supported event to an index over the
    // intersection's events.
    let mut overlap_events: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; n]; n];
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let overlap = scenario.context_intersection(i, j);
            if overlap.is_empty() {
                continue;
            }
            let targets = scenario.events(&overlap);
            let proj = supports[i]
                .iter()
                .map(|s| {
                    let r = s.restrict(&overlap).expect("overlap within context");
                    targets.iter().position(|t| t == &r).expect("event enumerated")
                })
                .collect();
            overlap_events[i][j] = Some(proj);
        }
    }
    let marginal = |ctx: usize, other: usize, mask: u32| -> u32 {
        let proj = overlap_events[ctx][other].as_ref().expect("projection built");
        let mut out = 0u32;
        for (t, target) in proj.iter().enumerate() {
            if mask & (1 << t) != 0 {
                out |= 1 << target;
            }
        }
        out
    };

    // BFS order over the intersection graph, starting at the base.
    let mut order = vec![base];
    let mut seen = vec![false; n];
    seen[base] = true;
    let mut head = 0;
    while head < order.len() {
        let i = order[head];
        head += 1;
        for j in 0..n {
            if !seen[j] && overlap_events[i][j].is_some() {
                seen[j] = true;
                order.push(j);
            }
        }
    }
    debug_assert_eq!(order.len(), n, "cover connectivity checked earlier");

    let pinned_bit = supports[base]
        .iter()
        .position(|s| s == event)
        .expect("event is supported");

    let mut chosen: Vec<u32> = vec![0; n];
    let mut nodes = 0u64;

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        order: &[usize],
        depth: usize,
        supports: &[Vec<Event>],
        overlap_events: &[Vec<Option<Vec<usize>>>],
        marginal: &dyn Fn(usize, usize, u32) -> u32,
        pinned: (usize, u32),
        chosen: &mut Vec<u32>,
        nodes: &mut u64,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let ctx = order[depth];
        let candidates: Vec<u32> = if ctx == pinned.0 {
            vec![pinned.1]
        } else {
            (1..(1u32 << supports[ctx].len())).collect()
        };
        'cand: for mask in candidates {
            *nodes += 1;
            for &prev in &order[..depth] {
                if overlap_events[ctx][prev].is_some()
                    && marginal(ctx, prev, mask) != marginal(prev, ctx, chosen[prev])
                {
                    continue 'cand;
                }
            }
            chosen[ctx] = mask;
            if dfs(
                order,
                depth + 1,
                supports,
                overlap_events,
                marginal,
                pinned,
                chosen,
                nodes,
            ) {
                return true;
            }
        }
        false
    }

    let found = dfs(
        &order,
        0,
        &supports,
        &overlap_events,
        &marginal,
        (base, 1 << pinned_bit),
        &mut chosen,
        &mut nodes,
    );

    if found {
        let family: Vec<FreeVector> = (0..n)
            .map(|i| {
                FreeVector::from_terms(
                    scenario.context(i).to_vec(),
                    supports[i]
                        .iter()
                        .enumerate()
                        .filter(|(t, _)| chosen[i] & (1 << *t) != 0)
                        .map(|(_, e)| (e.clone(), semiring.one())),
                    semiring,
                )
            })
            .collect();
        (Verdict::Trivial, ObstructionWitness::Family(family))
    } else {
        (
            Verdict::Nontrivial,
            ObstructionWitness::Infeasible(Certificate::ExhaustedSearch { nodes }),
        )
    }
}

/// Pinned LP over global assignments: M·b = p with b >= 0, plus the
/// explicit row fixing the mass routed through the section's event.
fn pinned_lp(
    model: &EmpiricalModel,
    base: usize,
    event: &Event,
    weight: &Value,
) -> Result<(Verdict, ObstructionWitness), ObstructionError> {
    let scenario = model.scenario();
    let semiring = model.semiring();
    let matrix = model.incidence_matrix(crate::model::default_cutoff())?;
    let p = model.table_vector(&matrix);

    let cols = matrix.column_count();
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(matrix.row_count() + 1);
    let mut rhs: Vec<BigRational> = Vec::with_capacity(matrix.row_count() + 1);
    for (r, value) in p.iter().enumerate() {
        rows.push(
            (0..cols)
                .map(|c| {
                    if matrix.entry(r, c) {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect(),
        );
        rhs.push(value.to_rational());
    }
    // The pin row: globals restricting to the event carry exactly its
    // measure. Implied by the block above; stated so the system is the
    // one the verdict is defined by.
    let base_domain = scenario.context(base);
    let through: Vec<bool> = matrix
        .columns
        .iter()
        .map(|g| &g.restrict(base_domain).expect("global covers context") == event)
        .collect();
    rows.push(
        through
            .iter()
            .map(|&t| if t { BigRational::one() } else { BigRational::zero() })
            .collect(),
    );
    rhs.push(weight.to_rational());

    match lp::feasibility(&rows, &rhs)? {
        lp::Feasibility::Feasible(b) => {
            // Family from the slice of b routed through the event.
            let family: Vec<FreeVector> = (0..scenario.context_count())
                .map(|k| {
                    let domain = scenario.context(k).to_vec();
                    FreeVector::from_terms(
                        domain.clone(),
                        matrix
                            .columns
                            .iter()
                            .zip(&b)
                            .zip(&through)
                            .filter(|(_, &t)| t)
                            .map(|((g, coeff), _)| {
                                (
                                    g.restrict(&domain).expect("global covers context"),
                                    Value::Rat(coeff.clone()),
                                )
                            }),
                        semiring,
                    )
                })
                .collect();
            Ok((Verdict::Trivial, ObstructionWitness::Family(family)))
        }
        lp::Feasibility::Infeasible(y) => Ok((
            Verdict::Nontrivial,
            ObstructionWitness::Infeasible(Certificate::FarkasDual(y)),
        )),
    }
}

/// First global assignment through `event` whose restriction to every
/// context is supported, if one exists. The Boolean family search and
/// this test agree on the cycle and triangle scenario classes.
pub fn support_consistent_global_through(
    model: &EmpiricalModel,
    base: usize,
    event: &Event,
    cutoff: u128,
) -> Result<Option<Event>, ModelError> {
    let scenario = model.scenario();
    let base_domain = scenario.context(base);
    let semiring = model.semiring();
    for global in model.global_sections(cutoff)? {
        if &global.restrict(base_domain).expect("global covers context") != event {
            continue;
        }
        let consistent = (0..scenario.context_count()).all(|k| {
            let r = global
                .restrict(scenario.context(k))
                .expect("global covers context");
            !semiring.is_zero(&model.weight(k, &r))
        });
        if consistent {
            return Ok(Some(global));
        }
    }
    Ok(None)
}

/// Checks the ring-completion bridge on one section of a cancellative
/// model: the ring coboundary of the canonical extension equals
/// d⁺c - d⁻c computed in the completion, and it vanishes exactly when
/// the difference cochain is trivial.
pub fn cancellative_bridge_check(
    model: &EmpiricalModel,
    base: usize,
    event: &Event,
    nerve: &Nerve,
) -> Result<bool, ObstructionError> {
    let semiring = model.semiring();
    let ring = semiring.ring_completion()?;
    require_nondisturbing(model)?;
    require_supported(model, base, event)?;

    let extension = extend_section(model, base, event, nerve)?;
    let plus = cochain::coboundary_plus(model.scenario(), nerve, &extension, semiring)?;
    let minus = cochain::coboundary_minus(model.scenario(), nerve, &extension, semiring)?;

    let ring_extension = embed_cochain(&extension, semiring, &ring, nerve)?;
    let z = cochain::coboundary_ring(model.scenario(), nerve, &ring_extension, &ring)?;

    let plus_ring = embed_cochain(&plus, semiring, &ring, nerve)?;
    let minus_ring = embed_cochain(&minus, semiring, &ring, nerve)?;
    let split: Vec<FreeVector> = plus_ring
        .values()
        .iter()
        .zip(minus_ring.values())
        .map(|(p, m)| p.sub(m, &ring))
        .collect::<Result<_, _>>()?;

    let identity_holds = z.values() == split.as_slice();
    let vanishing_matches = z.is_zero() == (plus == minus);
    Ok(identity_holds && vanishing_matches)
}

/// Relative membership of the difference data of a canonical extension,
/// as the projection identities require.
pub fn difference_is_relative(
    model: &EmpiricalModel,
    result: &ObstructionResult,
    nerve: &Nerve,
) -> Result<bool, ObstructionError> {
    Ok(cochain::relative_member_difference(
        model.scenario(),
        nerve,
        &result.difference,
        RelativeMask {
            base: result.base_context,
        },
        model.semiring(),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets;
    use crate::scenario::{presets as scenarios, Scenario};
    use std::collections::BTreeMap;

    fn ev(model: &EmpiricalModel, label: &str, key: &str) -> (usize, Event) {
        let s = model.scenario();
        let ctx = s.context_by_label(label).unwrap();
        (ctx, s.event_from_key(s.context(ctx), key).unwrap())
    }

    #[test]
    fn canonical_extension_of_the_correlated_cycle() {
        let m = presets::correlated_cycle_boolean();
        let s = m.scenario();
        let nerve = s.nerve(2);
        let (ad, e11) = ev(&m, "a,d", "11");
        let c = extend_section(&m, ad, &e11, &nerve).unwrap();
        // Contexts meeting a,d are forced to their 11 event; the
        // disjoint context b,c takes its least supported event.
        for (i, v) in c.values().iter().enumerate() {
            let (event, coeff) = v.coeffs().iter().next().unwrap();
            assert_eq!(coeff, &m.semiring().one());
            if i == ad {
                assert_eq!(s.event_key(event), "11");
            } else if s.context_label(i) == "b,c" {
                assert_eq!(s.event_key(event), "00");
            } else {
                assert_eq!(s.event_key(event), "11");
            }
        }
    }

    #[test]
    fn extension_on_a_single_context_scenario_is_the_section() {
        let s = scenarios::singleton();
        let b = Semiring::boolean();
        let event = s.event_from_key(s.context(0), "0").unwrap();
        let mut table = BTreeMap::new();
        table.insert(event.clone(), b.one());
        let m = EmpiricalModel::new(s, b, vec![table]).unwrap();
        let nerve = m.scenario().nerve(2);
        let c = extend_section(&m, 0, &event, &nerve).unwrap();
        assert_eq!(c.values().len(), 1);
        assert_eq!(c.value(0), &m.support_section(0, &event));
    }

    #[test]
    fn extension_requires_nondisturbance() {
        let s = scenarios::four_cycle();
        let b = Semiring::boolean();
        let mut tables = vec![BTreeMap::new(), BTreeMap::new(), BTreeMap::new(), BTreeMap::new()];
        for (label, key) in [("a,b", "00"), ("b,c", "10"), ("c,d", "00"), ("a,d", "00")] {
            let i = s.context_by_label(label).unwrap();
            tables[i].insert(s.event_from_key(s.context(i), key).unwrap(), b.one());
        }
        let m = EmpiricalModel::new(s, b, tables).unwrap();
        let nerve = m.scenario().nerve(2);
        let (ad, e) = ev(&m, "a,d", "00");
        assert!(matches!(
            extend_section(&m, ad, &e, &nerve),
            Err(ObstructionError::Disturbing(_))
        ));
    }

    #[test]
    fn classical_obstruction_is_trivial_across_the_correlated_cycle() {
        let m = presets::correlated_cycle_boolean();
        let nerve = m.scenario().nerve(2);
        let ring = Semiring::integer();
        for (ctx, event) in m.supported_sections() {
            let result = classical_obstruction(&m, ctx, &event, &ring, &nerve).unwrap();
            assert_eq!(
                result.verdict,
                Verdict::Trivial,
                "section {} of {} should be classically trivial",
                m.scenario().event_key(&event),
                m.scenario().context_label(ctx)
            );
        }
    }

    #[test]
    fn classical_witness_for_the_diagonal_uses_a_z_shape() {
        let m = presets::correlated_cycle_boolean();
        let s = m.scenario();
        let nerve = s.nerve(2);
        let ring = Semiring::integer();
        let (ad, diag) = ev(&m, "a,d", "01");
        let result = classical_obstruction(&m, ad, &diag, &ring, &nerve).unwrap();
        assert_eq!(result.verdict, Verdict::Trivial);
        let ObstructionWitness::Family(family) = &result.witness else {
            panic!("trivial verdict carries a family");
        };
        // The base component deviates from the bare section by a
        // mass-zero signed correction.
        let base = &family[ad];
        assert_eq!(base.mass(&ring), ring.one());
        assert!(base.support_len() > 1, "diagonal needs negative terms");
    }

    #[test]
    fn classical_obstruction_detects_the_pr_box_over_the_integers() {
        let m = presets::pr_box().possibilistic_collapse();
        let nerve = m.scenario().nerve(2);
        let ring = Semiring::integer();
        for (ctx, event) in m.supported_sections() {
            let result = classical_obstruction(&m, ctx, &event, &ring, &nerve).unwrap();
            assert_eq!(result.verdict, Verdict::Nontrivial);
        }
    }

    #[test]
    fn classical_obstruction_over_the_rationals_sees_nothing() {
        // Signed rational measures realize every non-disturbing model.
        let ring = Semiring::rational();
        for m in [presets::pr_box(), presets::pr_mixed_half()] {
            let nerve = m.scenario().nerve(2);
            for (ctx, event) in m.supported_sections() {
                let result = classical_obstruction(&m, ctx, &event, &ring, &nerve).unwrap();
                assert_eq!(result.verdict, Verdict::Trivial);
            }
        }
    }

    #[test]
    fn generalized_obstruction_splits_the_correlated_cycle_diagonals() {
        let m = presets::correlated_cycle_boolean();
        let s = m.scenario();
        let nerve = s.nerve(2);
        let mut nontrivial = Vec::new();
        for (ctx, event) in m.supported_sections() {
            let r = generalized_obstruction(&m, ctx, &event, &nerve).unwrap();
            if !r.is_trivial() {
                nontrivial.push((s.context_label(ctx), s.event_key(&event)));
            }
        }
        assert_eq!(
            nontrivial,
            vec![("a,d".to_string(), "01".to_string()), ("a,d".to_string(), "10".to_string())]
        );
    }

    #[test]
    fn generalized_agrees_with_global_search_on_the_correlated_cycle() {
        let m = presets::correlated_cycle_boolean();
        let nerve = m.scenario().nerve(2);
        for (ctx, event) in m.supported_sections() {
            let r = generalized_obstruction(&m, ctx, &event, &nerve).unwrap();
            let global = support_consistent_global_through(&m, ctx, &event, 1 << 20).unwrap();
            assert_eq!(r.is_trivial(), global.is_some());
        }
    }

    #[test]
    fn generalized_obstruction_rejects_zero_measure_events() {
        let m = presets::correlated_cycle_boolean();
        let s = m.scenario();
        let nerve = s.nerve(2);
        let ab = s.context_by_label("a,b").unwrap();
        let unsupported = s.event_from_key(s.context(ab), "01").unwrap();
        assert!(matches!(
            generalized_obstruction(&m, ab, &unsupported, &nerve),
            Err(ObstructionError::ZeroMeasureEvent(_))
        ));
    }

    #[test]
    fn pr_box_is_obstructed_at_every_section() {
        let m = presets::pr_box();
        let nerve = m.scenario().nerve(2);
        for (ctx, event) in m.supported_sections() {
            let r = generalized_obstruction(&m, ctx, &event, &nerve).unwrap();
            assert_eq!(r.verdict, Verdict::Nontrivial);
            assert!(matches!(
                r.witness,
                ObstructionWitness::Infeasible(Certificate::FarkasDual(_))
            ));
        }
    }

    #[test]
    fn deterministic_sections_extend_trivially() {
        let m = presets::deterministic();
        let nerve = m.scenario().nerve(2);
        for (ctx, event) in m.supported_sections() {
            let r = generalized_obstruction(&m, ctx, &event, &nerve).unwrap();
            assert_eq!(r.verdict, Verdict::Trivial);
        }
    }

    #[test]
    fn difference_cochain_of_the_model_cochain_detects_disturbance() {
        let m = presets::correlated_cycle_boolean();
        let nerve = m.scenario().nerve(2);
        let c = m.to_cochain(&nerve);
        let diff = difference_of(&m, &c, &nerve).unwrap();
        assert!(diff.is_trivial());
        for w in diff.witnesses.iter().flatten() {
            assert!(w.is_identity(m.semiring()) || w.is_row_stochastic(m.semiring()));
        }

        // A deliberately incompatible 0-cochain.
        let s = m.scenario();
        let b = m.semiring();
        let mut values: Vec<FreeVector> = (0..s.context_count())
            .map(|i| {
                FreeVector::singleton(
                    s.event_from_key(s.context(i), "00").unwrap(),
                    b.one(),
                    b,
                )
            })
            .collect();
        let ab = s.context_by_label("a,b").unwrap();
        values[ab] =
            FreeVector::singleton(s.event_from_key(s.context(ab), "11").unwrap(), b.one(), b);
        let c = Cochain::new(&nerve, 0, values).unwrap();
        let diff = difference_of(&m, &c, &nerve).unwrap();
        assert!(!diff.is_trivial());
        assert!(!diff.violations().is_empty());
        for idx in diff.violations() {
            if let Some(w) = &diff.witnesses[idx] {
                assert!(!w.is_identity(b));
            }
        }
    }

    #[test]
    fn difference_data_is_relative_to_the_base() {
        let m = presets::correlated_cycle_boolean();
        let nerve = m.scenario().nerve(2);
        for (ctx, event) in m.supported_sections() {
            let r = generalized_obstruction(&m, ctx, &event, &nerve).unwrap();
            assert!(difference_is_relative(&m, &r, &nerve).unwrap());
        }
    }

    #[test]
    fn bridge_check_holds_on_rational_models() {
        for m in [
            presets::correlated_cycle_rational(),
            presets::pr_box(),
            presets::deterministic(),
            presets::fully_mixed(),
            presets::pr_mixed_half(),
        ] {
            let nerve = m.scenario().nerve(2);
            for (ctx, event) in m.supported_sections() {
                assert!(cancellative_bridge_check(&m, ctx, &event, &nerve).unwrap());
            }
        }
    }

    #[test]
    fn bridge_check_rejects_boolean_models() {
        let m = presets::correlated_cycle_boolean();
        let nerve = m.scenario().nerve(2);
        let (ad, e) = ev(&m, "a,d", "00");
        assert!(matches!(
            cancellative_bridge_check(&m, ad, &e, &nerve),
            Err(ObstructionError::Semiring(SemiringError::NotCancellative(_)))
        ));
    }

    #[test]
    fn verdicts_are_stable_under_context_relabelling() {
        // Renaming measurements permutes the canonical context order;
        // triviality of each section must not change.
        let m = presets::correlated_cycle_boolean();
        let s = m.scenario();
        let nerve = s.nerve(2);

        let renames = [("a", "p"), ("b", "q"), ("c", "r"), ("d", "s")];
        let renamed_scenario = Scenario::new(
            renames.iter().map(|(_, new)| new.to_string()).collect(),
            vec![
                vec!["p".into(), "q".into()],
                vec!["q".into(), "r".into()],
                vec!["r".into(), "s".into()],
                vec!["s".into(), "p".into()],
            ],
            renames
                .iter()
                .map(|(_, new)| (new.to_string(), vec!["0".to_string(), "1".to_string()]))
                .collect(),
        )
        .unwrap();
        let rename = |name: &str| -> String {
            renames
                .iter()
                .find(|(old, _)| *old == name)
                .map(|(_, new)| new.to_string())
                .unwrap()
        };
        let mut tables = vec![BTreeMap::new(); renamed_scenario.context_count()];
        for i in 0..s.context_count() {
            let new_names: Vec<String> = s
                .context(i)
                .iter()
                .map(|&mid| rename(s.measurement_name(mid)))
                .collect();
            let mut ids: Vec<(usize, usize)> = new_names
                .iter()
                .enumerate()
                .map(|(pos, n)| (renamed_scenario.measurement_id(n).unwrap(), pos))
                .collect();
            ids.sort();
            let target = renamed_scenario
                .context_by_label(&renamed_scenario.set_label(
                    &ids.iter().map(|(id, _)| *id).collect::<Vec<_>>(),
                ))
                .unwrap();
            for (event, value) in m.support_table(i) {
                let outcomes: Vec<usize> =
                    ids.iter().map(|(_, pos)| event.outcomes()[*pos]).collect();
                let new_event = Event::new(
                    ids.iter().map(|(id, _)| *id).collect(),
                    outcomes,
                );
                tables[target].insert(new_event, value.clone());
            }
        }
        let renamed =
            EmpiricalModel::new(renamed_scenario, m.semiring().clone(), tables).unwrap();
        let renamed_nerve = renamed.scenario().nerve(2);

        for (ctx, event) in m.supported_sections() {
            let verdict = generalized_obstruction(&m, ctx, &event, &nerve)
                .unwrap()
                .verdict;
            // Find the corresponding section in the renamed model.
            let new_names: Vec<String> = event
                .domain()
                .iter()
                .map(|&mid| rename(s.measurement_name(mid)))
                .collect();
            let mut ids: Vec<(usize, usize)> = new_names
                .iter()
                .enumerate()
                .map(|(pos, n)| (renamed.scenario().measurement_id(n).unwrap(), pos))
                .collect();
            ids.sort();
            let new_event = Event::new(
                ids.iter().map(|(id, _)| *id).collect(),
                ids.iter().map(|(_, pos)| event.outcomes()[*pos]).collect(),
            );
            let new_ctx = renamed
                .scenario()
                .context_by_label(&renamed.scenario().set_label(new_event.domain()))
                .unwrap();
            let renamed_verdict =
                generalized_obstruction(&renamed, new_ctx, &new_event, &renamed_nerve)
                    .unwrap()
                    .verdict;
            assert_eq!(verdict, renamed_verdict);
        }
    }
}
