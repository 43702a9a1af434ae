//! Čech cochains over a presheaf of free semimodules on joint events.
//!
//! A q-cochain assigns to every q-simplex of the nerve a vector of the
//! free semimodule generated by the joint events of the simplex
//! intersection. Over a ring the single alternating coboundary is
//! available; over a general semiring the even-face and odd-face sums
//! d⁺/d⁻ replace it, and cocycles are the cochains where the two agree.
//!
//! Index convention, fixed once: on an ordered 1-simplex (U_i, U_j) with
//! i < j, face 0 removes U_i, so d⁺ pushes the U_j value and d⁻ pushes
//! the U_i value. The characterization results are insensitive to
//! swapping the pair.

use crate::scenario::{Event, MeasurementId, Nerve, Scenario, ScenarioError, TooLarge};
use crate::semiring::{Semiring, SemiringError, Value};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CochainError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error("cochain value count {got} does not match nerve layer of size {want}")]
    ShapeMismatch { want: usize, got: usize },
    #[error(transparent)]
    TooLarge(#[from] TooLarge),
}

/// A finitely supported formal combination of joint events sharing one
/// basis domain. Zero coefficients are never stored, so structural
/// equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeVector {
    domain: Vec<MeasurementId>,
    coeffs: BTreeMap<Event, Value>,
}

impl FreeVector {
    pub fn zero(domain: Vec<MeasurementId>) -> FreeVector {
        FreeVector {
            domain,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn singleton(event: Event, coeff: Value, semiring: &Semiring) -> FreeVector {
        let mut v = FreeVector::zero(event.domain().to_vec());
        v.add_term(event, coeff, semiring);
        v
    }

    pub fn from_terms<I: IntoIterator<Item = (Event, Value)>>(
        domain: Vec<MeasurementId>,
        terms: I,
        semiring: &Semiring,
    ) -> FreeVector {
        let mut v = FreeVector::zero(domain);
        for (event, coeff) in terms {
            v.add_term(event, coeff, semiring);
        }
        v
    }

    /// Adds `coeff · [event]`, dropping the entry if it cancels to zero.
    pub fn add_term(&mut self, event: Event, coeff: Value, semiring: &Semiring) {
        assert_eq!(event.domain(), self.domain, "basis domain mismatch");
        if semiring.is_zero(&coeff) {
            return;
        }
        let entry = match self.coeffs.remove(&event) {
            Some(existing) => semiring.add(&existing, &coeff),
            None => coeff,
        };
        if !semiring.is_zero(&entry) {
            self.coeffs.insert(event, entry);
        }
    }

    pub fn domain(&self) -> &[MeasurementId] {
        &self.domain
    }

    pub fn coeffs(&self) -> &BTreeMap<Event, Value> {
        &self.coeffs
    }

    pub fn coeff(&self, event: &Event, semiring: &Semiring) -> Value {
        self.coeffs
            .get(event)
            .cloned()
            .unwrap_or_else(|| semiring.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// Total coefficient sum; the augmentation map to R.
    pub fn mass(&self, semiring: &Semiring) -> Value {
        semiring.sum(self.coeffs.values())
    }

    pub fn add(&self, other: &FreeVector, semiring: &Semiring) -> FreeVector {
        assert_eq!(self.domain, other.domain, "basis domain mismatch");
        let mut out = self.clone();
        for (event, coeff) in &other.coeffs {
            out.add_term(event.clone(), coeff.clone(), semiring);
        }
        out
    }

    pub fn scale(&self, factor: &Value, semiring: &Semiring) -> FreeVector {
        FreeVector::from_terms(
            self.domain.clone(),
            self.coeffs
                .iter()
                .map(|(e, c)| (e.clone(), semiring.mul(factor, c))),
            semiring,
        )
    }

    pub fn negate(&self, semiring: &Semiring) -> Result<FreeVector, SemiringError> {
        let mut out = FreeVector::zero(self.domain.clone());
        for (event, coeff) in &self.coeffs {
            out.add_term(event.clone(), semiring.try_negate(coeff)?, semiring);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FreeVector, semiring: &Semiring) -> Result<FreeVector, SemiringError> {
        Ok(self.add(&other.negate(semiring)?, semiring))
    }

    /// Linear extension of event restriction: the coefficient of `t` in
    /// the result is the sum of coefficients of all events restricting
    /// to `t`.
    pub fn push_to(
        &self,
        target: &[MeasurementId],
        semiring: &Semiring,
    ) -> Result<FreeVector, ScenarioError> {
        let mut out = FreeVector::zero(target.to_vec());
        for (event, coeff) in &self.coeffs {
            let restricted = event.restrict(target)?;
            out.add_term(restricted, coeff.clone(), semiring);
        }
        Ok(out)
    }
}

/// Assignment of a [`FreeVector`] over O^{|σ|} to every q-simplex of a
/// nerve, stored in the nerve's canonical simplex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    degree: usize,
    values: Vec<FreeVector>,
}

impl Cochain {
    pub fn new(
        nerve: &Nerve,
        degree: usize,
        values: Vec<FreeVector>,
    ) -> Result<Cochain, CochainError> {
        let want = nerve.simplices(degree).len();
        if values.len() != want {
            return Err(CochainError::ShapeMismatch {
                want,
                got: values.len(),
            });
        }
        for (simplex, value) in nerve.simplices(degree).iter().zip(&values) {
            assert_eq!(
                simplex.intersection(),
                value.domain(),
                "value basis must equal the simplex intersection"
            );
        }
        Ok(Cochain { degree, values })
    }

    pub fn zero(nerve: &Nerve, degree: usize) -> Cochain {
        let values = nerve
            .simplices(degree)
            .iter()
            .map(|s| FreeVector::zero(s.intersection().to_vec()))
            .collect();
        Cochain { degree, values }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &[FreeVector] {
        &self.values
    }

    pub fn value(&self, index: usize) -> &FreeVector {
        &self.values[index]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(FreeVector::is_zero)
    }
}

/// Which faces contribute to a semimodule coboundary sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FaceParity {
    Even,
    Odd,
}

fn coboundary_half(
    scenario: &Scenario,
    nerve: &Nerve,
    c: &Cochain,
    semiring: &Semiring,
    parity: FaceParity,
) -> Result<Cochain, CochainError> {
    let q = c.degree();
    let mut values = Vec::new();
    for simplex in nerve.simplices(q + 1) {
        let mut acc = FreeVector::zero(simplex.intersection().to_vec());
        for k in 0..=simplex.dim() {
            let take = match parity {
                FaceParity::Even => k % 2 == 0,
                FaceParity::Odd => k % 2 == 1,
            };
            if !take {
                continue;
            }
            let face = scenario.face(simplex, k);
            let idx = nerve
                .index_of(q, face.contexts())
                .expect("face of a nerve simplex is a nerve simplex");
            let pushed = c.value(idx).push_to(simplex.intersection(), semiring)?;
            acc = acc.add(&pushed, semiring);
        }
        values.push(acc);
    }
    Cochain::new(nerve, q + 1, values)
}

/// Even-face coboundary d⁺.
pub fn coboundary_plus(
    scenario: &Scenario,
    nerve: &Nerve,
    c: &Cochain,
    semiring: &Semiring,
) -> Result<Cochain, CochainError> {
    coboundary_half(scenario, nerve, c, semiring, FaceParity::Even)
}

/// Odd-face coboundary d⁻.
pub fn coboundary_minus(
    scenario: &Scenario,
    nerve: &Nerve,
    c: &Cochain,
    semiring: &Semiring,
) -> Result<Cochain, CochainError> {
    coboundary_half(scenario, nerve, c, semiring, FaceParity::Odd)
}

/// Alternating-sign coboundary, available over rings only.
pub fn coboundary_ring(
    scenario: &Scenario,
    nerve: &Nerve,
    c: &Cochain,
    ring: &Semiring,
) -> Result<Cochain, CochainError> {
    if !ring.has_negation() {
        return Err(SemiringError::NoNegation(ring.name().to_string()).into());
    }
    let plus = coboundary_plus(scenario, nerve, c, ring)?;
    let minus = coboundary_minus(scenario, nerve, c, ring)?;
    let values = plus
        .values()
        .iter()
        .zip(minus.values())
        .map(|(p, m)| p.sub(m, ring))
        .collect::<Result<Vec<_>, _>>()?;
    Cochain::new(nerve, c.degree() + 1, values)
}

/// Membership in Z^q: the even and odd coboundaries agree exactly.
pub fn is_cocycle(
    scenario: &Scenario,
    nerve: &Nerve,
    c: &Cochain,
    semiring: &Semiring,
) -> Result<bool, CochainError> {
    let plus = coboundary_plus(scenario, nerve, c, semiring)?;
    let minus = coboundary_minus(scenario, nerve, c, semiring)?;
    Ok(plus == minus)
}

/// Samples random q-cochains and checks the four-term compatibility
/// condition d⁺∘d⁺ + d⁻∘d⁻ = d⁻∘d⁺ + d⁺∘d⁻ on each. Vacuously true
/// when the nerve has no (q+2)-simplices.
pub fn complex_condition_check<R: rand::Rng>(
    scenario: &Scenario,
    nerve: &Nerve,
    semiring: &Semiring,
    degree: usize,
    trials: usize,
    rng: &mut R,
) -> Result<bool, CochainError> {
    for _ in 0..trials {
        let c = random_cochain(scenario, nerve, semiring, degree, rng);
        if !four_term_condition_holds(scenario, nerve, &c, semiring)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The four-term identity evaluated on one cochain.
pub fn four_term_condition_holds(
    scenario: &Scenario,
    nerve: &Nerve,
    c: &Cochain,
    semiring: &Semiring,
) -> Result<bool, CochainError> {
    let plus = coboundary_plus(scenario, nerve, c, semiring)?;
    let minus = coboundary_minus(scenario, nerve, c, semiring)?;
    let pp = coboundary_plus(scenario, nerve, &plus, semiring)?;
    let mm = coboundary_minus(scenario, nerve, &minus, semiring)?;
    let mp = coboundary_minus(scenario, nerve, &plus, semiring)?;
    let pm = coboundary_plus(scenario, nerve, &minus, semiring)?;
    let lhs: Vec<FreeVector> = pp
        .values()
        .iter()
        .zip(mm.values())
        .map(|(a, b)| a.add(b, semiring))
        .collect();
    let rhs: Vec<FreeVector> = mp
        .values()
        .iter()
        .zip(pm.values())
        .map(|(a, b)| a.add(b, semiring))
        .collect();
    Ok(lhs == rhs)
}

/// Uniformly random cochain over the full event basis of each simplex.
pub fn random_cochain<R: rand::Rng>(
    scenario: &Scenario,
    nerve: &Nerve,
    semiring: &Semiring,
    degree: usize,
    rng: &mut R,
) -> Cochain {
    let values = nerve
        .simplices(degree)
        .iter()
        .map(|s| {
            let events = scenario.events(s.intersection());
            FreeVector::from_terms(
                s.intersection().to_vec(),
                events.into_iter().map(|e| (e, semiring.sample(rng))),
                semiring,
            )
        })
        .collect();
    Cochain::new(nerve, degree, values).expect("shape matches by construction")
}

/// Enumerates the compatible families whose members are single basis
/// events with coefficient one: the degree-0 basis cochains lying in
/// Z⁰ = H⁰. For a sheaf of events these are exactly the restrictions of
/// global assignments.
pub fn compatible_basis_families(
    scenario: &Scenario,
    cutoff: u128,
) -> Result<Vec<Vec<Event>>, TooLarge> {
    let count: u128 = (0..scenario.context_count())
        .map(|i| scenario.event_count(scenario.context(i)))
        .product();
    if count > cutoff {
        return Err(TooLarge { count, cutoff });
    }
    let per_context: Vec<Vec<Event>> = (0..scenario.context_count())
        .map(|i| scenario.context_events(i))
        .collect();

    fn rec(
        scenario: &Scenario,
        per_context: &[Vec<Event>],
        chosen: &mut Vec<Event>,
        out: &mut Vec<Vec<Event>>,
    ) {
        if chosen.len() == per_context.len() {
            out.push(chosen.clone());
            return;
        }
        let i = chosen.len();
        'next: for cand in &per_context[i] {
            for (j, prev) in chosen.iter().enumerate() {
                let inter = scenario.context_intersection(j, i);
                if inter.is_empty() {
                    continue;
                }
                if prev.restrict(&inter).unwrap() != cand.restrict(&inter).unwrap() {
                    continue 'next;
                }
            }
            chosen.push(cand.clone());
            rec(scenario, per_context, chosen, out);
            chosen.pop();
        }
    }

    let mut out = Vec::new();
    let mut chosen: Vec<Event> = Vec::new();
    rec(scenario, &per_context, &mut chosen, &mut out);
    Ok(out)
}

/// Relative structure: everything is measured against one distinguished
/// context of the cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelativeMask {
    pub base: usize,
}

/// Membership of a ring-coefficient cochain in the relative complex:
/// every value pushes to zero on its simplex's intersection with the
/// base context. An empty intersection degenerates to the augmentation,
/// so the total mass must vanish there.
pub fn relative_member(
    scenario: &Scenario,
    nerve: &Nerve,
    c: &Cochain,
    mask: RelativeMask,
    ring: &Semiring,
) -> Result<bool, CochainError> {
    if !ring.has_negation() {
        return Err(SemiringError::NoNegation(ring.name().to_string()).into());
    }
    let base = scenario.context(mask.base).to_vec();
    for (simplex, value) in nerve.simplices(c.degree()).iter().zip(c.values()) {
        let overlap: Vec<MeasurementId> = simplex
            .intersection()
            .iter()
            .copied()
            .filter(|m| base.binary_search(m).is_ok())
            .collect();
        if overlap.is_empty() {
            if !ring.is_zero(&value.mass(ring)) {
                return Ok(false);
            }
        } else if !value.push_to(&overlap, ring)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A square operator on the event basis of one simplex intersection,
/// acting on row vectors: (v g)_j = Σ_i v_i g_{ij}. Row R-stochastic
/// means every row sums to 1_R.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowStochastic {
    basis: Vec<Event>,
    rows: Vec<Vec<Value>>,
}

impl RowStochastic {
    pub fn identity(basis: Vec<Event>, semiring: &Semiring) -> RowStochastic {
        let n = basis.len();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { semiring.one() } else { semiring.zero() })
                    .collect()
            })
            .collect();
        RowStochastic { basis, rows }
    }

    /// The rank-one operator sending every basis direction to `target`
    /// scaled by `1/mass`: all rows equal target/mass.
    pub fn rank_one(
        basis: Vec<Event>,
        target: &FreeVector,
        mass: &Value,
        semiring: &Semiring,
    ) -> Result<RowStochastic, SemiringError> {
        let inv = semiring.try_invert(mass)?;
        let row: Vec<Value> = basis
            .iter()
            .map(|e| semiring.mul(&inv, &target.coeff(e, semiring)))
            .collect();
        let rows = vec![row; basis.len()];
        Ok(RowStochastic { basis, rows })
    }

    pub fn basis(&self) -> &[Event] {
        &self.basis
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn is_row_stochastic(&self, semiring: &Semiring) -> bool {
        self.rows
            .iter()
            .all(|row| semiring.is_one(&semiring.sum(row.iter())))
    }

    pub fn is_identity(&self, semiring: &Semiring) -> bool {
        self.rows.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, v)| {
                if i == j {
                    semiring.is_one(v)
                } else {
                    semiring.is_zero(v)
                }
            })
        })
    }

    /// Row-vector action v ↦ v g.
    pub fn apply(&self, v: &FreeVector, semiring: &Semiring) -> FreeVector {
        let mut out = FreeVector::zero(v.domain().to_vec());
        for (i, basis_event) in self.basis.iter().enumerate() {
            let vi = v.coeff(basis_event, semiring);
            if semiring.is_zero(&vi) {
                continue;
            }
            for (j, target_event) in self.basis.iter().enumerate() {
                let term = semiring.mul(&vi, &self.rows[i][j]);
                out.add_term(target_event.clone(), term, semiring);
            }
        }
        out
    }
}

/// A degree-0 cochain together with its even/odd coboundaries and, per
/// 1-simplex, a canonical row-stochastic operator relating them when one
/// exists. The pair (d⁺c, d⁻c) determines the equivalence class; the
/// operators are presentational. Trivial means d⁺c = d⁻c.
#[derive(Debug, Clone)]
pub struct DifferenceCochain {
    pub base: Cochain,
    pub plus: Cochain,
    pub minus: Cochain,
    pub witnesses: Vec<Option<RowStochastic>>,
}

impl DifferenceCochain {
    pub fn is_trivial(&self) -> bool {
        self.plus == self.minus
    }

    /// Simplex indices where the two coboundaries disagree.
    pub fn violations(&self) -> Vec<usize> {
        self.plus
            .values()
            .iter()
            .zip(self.minus.values())
            .enumerate()
            .filter(|(_, (p, m))| p != m)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Projected difference-cochain membership in the relative complex:
/// the plus and minus parts agree after restriction to the base
/// context's overlap with each simplex (mass comparison when the
/// overlap is empty).
pub fn relative_member_difference(
    scenario: &Scenario,
    nerve: &Nerve,
    diff: &DifferenceCochain,
    mask: RelativeMask,
    semiring: &Semiring,
) -> Result<bool, CochainError> {
    let base = scenario.context(mask.base).to_vec();
    let simplices = nerve.simplices(diff.plus.degree());
    for ((simplex, p), m) in simplices
        .iter()
        .zip(diff.plus.values())
        .zip(diff.minus.values())
    {
        let overlap: Vec<MeasurementId> = simplex
            .intersection()
            .iter()
            .copied()
            .filter(|x| base.binary_search(x).is_ok())
            .collect();
        if overlap.is_empty() {
            if p.mass(semiring) != m.mass(semiring) {
                return Ok(false);
            }
        } else if p.push_to(&overlap, semiring)? != m.push_to(&overlap, semiring)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::presets;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn event(s: &Scenario, ctx: usize, key: &str) -> Event {
        s.event_from_key(s.context(ctx), key).unwrap()
    }

    #[test]
    fn push_single_basis_element() {
        let s = presets::four_cycle();
        let b = Semiring::boolean();
        let e = event(&s, 0, "00"); // context a,b
        let v = FreeVector::singleton(e, b.one(), &b);
        let target = vec![s.measurement_id("b").unwrap()];
        let pushed = v.push_to(&target, &b).unwrap();
        let expected =
            FreeVector::singleton(s.event_from_key(&target, "0").unwrap(), b.one(), &b);
        assert_eq!(pushed, expected);
    }

    #[test]
    fn push_sums_coefficients_over_fibers() {
        let s = presets::four_cycle();
        let q = Semiring::nonneg_rational();
        let v = FreeVector::from_terms(
            s.context(0).to_vec(),
            vec![
                (event(&s, 0, "00"), Value::ratio(1, 2)),
                (event(&s, 0, "01"), Value::ratio(1, 2)),
            ],
            &q,
        );
        let target = vec![s.measurement_id("a").unwrap()];
        let pushed = v.push_to(&target, &q).unwrap();
        let expected =
            FreeVector::singleton(s.event_from_key(&target, "0").unwrap(), q.one(), &q);
        assert_eq!(pushed, expected);
    }

    #[test]
    fn push_is_functorial() {
        let s = presets::shared_triple();
        let q = Semiring::rational();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let nerve = s.nerve(2);
        for _ in 0..25 {
            let c = random_cochain(&s, &nerve, &q, 0, &mut rng);
            for v in c.values() {
                let whole = v.domain().to_vec();
                let v_set: Vec<MeasurementId> = whole[..whole.len().min(2)].to_vec();
                let w_set: Vec<MeasurementId> = v_set[..1].to_vec();
                let two_step = v.push_to(&v_set, &q).unwrap().push_to(&w_set, &q).unwrap();
                let one_step = v.push_to(&w_set, &q).unwrap();
                assert_eq!(two_step, one_step);
            }
        }
    }

    #[test]
    fn ring_coboundary_squares_to_zero() {
        // Needs 2-simplices to be non-vacuous.
        let s = presets::shared_triple();
        let nerve = s.nerve(2);
        assert!(!nerve.simplices(2).is_empty());
        for ring in [Semiring::integer(), Semiring::rational()] {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            for _ in 0..30 {
                let c = random_cochain(&s, &nerve, &ring, 0, &mut rng);
                let dc = coboundary_ring(&s, &nerve, &c, &ring).unwrap();
                let ddc = coboundary_ring(&s, &nerve, &dc, &ring).unwrap();
                assert!(ddc.is_zero());
            }
        }
    }

    #[test]
    fn ring_coboundary_rejects_semirings_without_negation() {
        let s = presets::four_cycle();
        let nerve = s.nerve(2);
        let c = Cochain::zero(&nerve, 0);
        for sr in [Semiring::boolean(), Semiring::nonneg_rational()] {
            let err = coboundary_ring(&s, &nerve, &c, &sr).unwrap_err();
            assert!(matches!(
                err,
                CochainError::Semiring(SemiringError::NoNegation(_))
            ));
        }
    }

    #[test]
    fn compatible_family_has_zero_ring_coboundary() {
        let s = presets::four_cycle();
        let nerve = s.nerve(2);
        let z = Semiring::integer();
        // Restrictions of the global assignment 1111.
        let values: Vec<FreeVector> = (0..s.context_count())
            .map(|i| FreeVector::singleton(event(&s, i, "11"), z.one(), &z))
            .collect();
        let c = Cochain::new(&nerve, 0, values).unwrap();
        let dc = coboundary_ring(&s, &nerve, &c, &z).unwrap();
        assert!(dc.is_zero());
        assert!(is_cocycle(&s, &nerve, &c, &z).unwrap());
    }

    #[test]
    fn zero_cochain_has_zero_coboundaries() {
        let s = presets::four_cycle();
        let nerve = s.nerve(2);
        let q = Semiring::nonneg_rational();
        let c = Cochain::zero(&nerve, 0);
        assert!(coboundary_plus(&s, &nerve, &c, &q).unwrap().is_zero());
        assert!(coboundary_minus(&s, &nerve, &c, &q).unwrap().is_zero());
    }

    #[test]
    fn ring_coboundary_splits_into_plus_minus() {
        let s = presets::shared_triple();
        let nerve = s.nerve(2);
        let ring = Semiring::rational();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for degree in [0usize, 1] {
            for _ in 0..20 {
                let c = random_cochain(&s, &nerve, &ring, degree, &mut rng);
                let d = coboundary_ring(&s, &nerve, &c, &ring).unwrap();
                let plus = coboundary_plus(&s, &nerve, &c, &ring).unwrap();
                let minus = coboundary_minus(&s, &nerve, &c, &ring).unwrap();
                let split: Vec<FreeVector> = plus
                    .values()
                    .iter()
                    .zip(minus.values())
                    .map(|(p, m)| p.sub(m, &ring).unwrap())
                    .collect();
                assert_eq!(d.values(), split.as_slice());
            }
        }
    }

    #[test]
    fn four_term_condition_on_all_shipped_semirings() {
        let s = presets::shared_triple();
        let nerve = s.nerve(3);
        for sr in [
            Semiring::boolean(),
            Semiring::nonneg_rational(),
            Semiring::rational(),
            Semiring::integer(),
        ] {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            assert!(
                complex_condition_check(&s, &nerve, &sr, 0, 50, &mut rng).unwrap(),
                "four-term condition failed over {sr}"
            );
        }
    }

    #[test]
    fn cocycle_detection_at_degree_zero() {
        let s = presets::four_cycle();
        let nerve = s.nerve(2);
        let b = Semiring::boolean();
        let compatible: Vec<FreeVector> = (0..4)
            .map(|i| FreeVector::singleton(event(&s, i, "00"), b.one(), &b))
            .collect();
        let c = Cochain::new(&nerve, 0, compatible).unwrap();
        assert!(is_cocycle(&s, &nerve, &c, &b).unwrap());

        // Disagree on one intersection.
        let mut values: Vec<FreeVector> = (0..4)
            .map(|i| FreeVector::singleton(event(&s, i, "00"), b.one(), &b))
            .collect();
        values[0] = FreeVector::singleton(event(&s, 0, "11"), b.one(), &b);
        let c = Cochain::new(&nerve, 0, values).unwrap();
        assert!(!is_cocycle(&s, &nerve, &c, &b).unwrap());
    }

    #[test]
    fn basis_family_enumeration_matches_global_assignments() {
        for s in [presets::four_cycle(), presets::triangle()] {
            let families = compatible_basis_families(&s, 1 << 20).unwrap();
            let globals = s.global_events(1 << 20).unwrap();
            assert_eq!(families.len(), globals.len());
        }
        // Disjoint contexts: no constraints, every family is compatible.
        let s = presets::disjoint_pair();
        let families = compatible_basis_families(&s, 1 << 20).unwrap();
        assert_eq!(families.len(), 16);
        // Cutoff honored.
        assert!(compatible_basis_families(&presets::four_cycle(), 3).is_err());
    }

    #[test]
    fn rank_one_witness_is_row_stochastic_and_maps_plus_to_minus() {
        let s = presets::four_cycle();
        let q = Semiring::nonneg_rational();
        let domain = vec![s.measurement_id("b").unwrap()];
        let basis = s.events(&domain);
        let u = FreeVector::from_terms(
            domain.clone(),
            vec![
                (basis[0].clone(), Value::ratio(1, 3)),
                (basis[1].clone(), Value::ratio(2, 3)),
            ],
            &q,
        );
        let w = FreeVector::from_terms(
            domain.clone(),
            vec![
                (basis[0].clone(), Value::ratio(1, 2)),
                (basis[1].clone(), Value::ratio(1, 2)),
            ],
            &q,
        );
        let g = RowStochastic::rank_one(basis, &w, &u.mass(&q), &q).unwrap();
        assert!(g.is_row_stochastic(&q));
        assert_eq!(g.apply(&u, &q), w);
    }
}
