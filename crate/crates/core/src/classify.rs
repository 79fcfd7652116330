//! Deciding equivalence of involutions and counting classes.
//!
//! The oracle searches units modulo the center directly; the fast path
//! reduces to the `λ`-stable components and is only taken once every
//! multiplicative automorphism has been shown to be inner.

use std::collections::HashMap;
use std::sync::Arc;

use crate::algebra::{IncidenceFunction, Restriction, Unit, UnitsModCenter};
use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::involutions::{enumerate_involutions_over, make_involution, restrict_with, InvolutionDescriptor};
use crate::morphisms::{compose_canonical, hat, mult_subset_inn, AlgebraMapDescriptor, Gate};
use crate::posets::{component_involution, enumerate_maps, MapKind, Poset, PosetMap, DEFAULT_MAX_POSET_SIZE};
use crate::scalars::{square_class_count, Field, SquareClassCount};

pub const DEFAULT_UNIT_BOUND: u64 = 1_000_000;

/// Enumeration caps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Largest number of units modulo the center (or multiplicative
    /// candidates) to enumerate.
    pub units: u64,
    /// Largest poset for automorphism enumeration.
    pub max_poset: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { units: DEFAULT_UNIT_BOUND, max_poset: DEFAULT_MAX_POSET_SIZE }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    Inner,
    General,
}

/// `u_ρ = c · t · u_η · ρ_λ(t)`; the equivalence is `φ ∘ ρ = η ∘ φ` with
/// `φ = Ψ_{t⁻¹}` (inner) or `φ = α̂⁻¹ ∘ Ψ_{t⁻¹}` (general, where `t` relates
/// `ρ` to `α̂ ∘ η ∘ α̂⁻¹`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub kind: WitnessKind,
    pub t: Unit,
    pub c: Unit,
    pub alpha: Option<PosetMap>,
}

impl EquivalenceWitness {
    /// The automorphism `φ`.
    pub fn map(&self) -> AlgebraMapDescriptor {
        let conj = AlgebraMapDescriptor::inner(self.t.inverse());
        match &self.alpha {
            None => conj,
            Some(a) => compose_canonical(&[AlgebraMapDescriptor::induced(a.inverse(), self.t.field()), conj])
                .expect("same algebra"),
        }
    }

    /// Check `φ ∘ ρ = η ∘ φ` on every basis element.
    pub fn replay(&self, rho: &InvolutionDescriptor, eta: &InvolutionDescriptor) -> Result<bool> {
        let phi = self.map();
        for e in IncidenceFunction::basis_all(rho.poset(), rho.field()) {
            if phi.apply(&rho.apply(&e)?)? != eta.apply(&phi.apply(&e)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `t · v · ρ_λ(t)`.
fn act(t: &Unit, v: &Unit, lambda: &PosetMap) -> Unit {
    let rt = IncidenceFunction::from_fn(t.poset().clone(), t.field(), |x, y| t.get(lambda.apply(y), lambda.apply(x)));
    Unit::new(t.convolve(v).and_then(|tv| tv.convolve(&rt)).expect("same algebra")).expect("product of units")
}

fn same_algebra(rho: &InvolutionDescriptor, eta: &InvolutionDescriptor) -> Result<()> {
    if rho.field() != eta.field() {
        return Err(Error::FieldMismatch(rho.field().to_string(), eta.field().to_string()));
    }
    if **rho.poset() != **eta.poset() {
        return Err(Error::Mismatch);
    }
    Ok(())
}

/// Exhaustive search for `t` (and the central `c` it forces) with
/// `u_ρ = c·t·u_η·ρ_λ(t)`; the first `t` in canonical order is returned.
pub fn inner_equivalent_oracle(
    rho: &InvolutionDescriptor,
    eta: &InvolutionDescriptor,
    bound: u64,
    strategy: Strategy,
) -> Result<(bool, Option<EquivalenceWitness>)> {
    same_algebra(rho, eta)?;
    if rho.lambda() != eta.lambda() {
        return Err(Error::LambdaMismatch);
    }
    let units = UnitsModCenter::new(rho.poset(), rho.field(), bound)?;
    let lambda = rho.lambda();
    let hit = exec::find_first(units.count(), strategy, |i| {
        let t = units.get(i);
        let s = act(&t, eta.u(), lambda);
        (s.canonical_mod_center() == *rho.u()).then_some((t, s))
    });
    let Some((t, s)) = hit else {
        return Ok((false, None));
    };
    let c = Unit::new(rho.u().convolve(&s.inverse())?)?;
    if !c.center_test() {
        return Err(Error::InternalInconsistency("u·(t v ρ_λ(t))⁻¹ is not central".into()));
    }
    let witness = EquivalenceWitness { kind: WitnessKind::Inner, t, c, alpha: None };
    if !witness.replay(rho, eta)? {
        return Err(Error::InternalInconsistency("inner witness does not replay".into()));
    }
    Ok((true, Some(witness)))
}

/// The partition of `Inv_λ` into inner-equivalence classes, computed as
/// orbits of `t · u = t u ρ_λ(t)` over all units modulo the center.
#[derive(Clone, Debug)]
pub struct InnerClasses {
    pub lambda: PosetMap,
    pub involutions: Vec<InvolutionDescriptor>,
    /// Class label of each involution; labels follow first appearance.
    pub labels: Vec<usize>,
    /// Index of the first involution of each class.
    pub representatives: Vec<usize>,
}

impl InnerClasses {
    pub fn count(&self) -> u64 {
        self.representatives.len() as u64
    }

    /// The class of a (canonical) `u`.
    pub fn label_of(&self, u: &Unit) -> Option<usize> {
        self.involutions.iter().position(|d| d.u() == u).map(|i| self.labels[i])
    }
}

pub fn inner_classes(lambda: &PosetMap, field: Field, bound: u64, strategy: Strategy) -> Result<InnerClasses> {
    let involutions = enumerate_involutions_over(lambda, field, bound, strategy)?;
    let units = UnitsModCenter::new(lambda.poset(), field, bound)?;
    let index: HashMap<&Unit, usize> = involutions.iter().enumerate().map(|(i, d)| (d.u(), i)).collect();
    let mut labels = vec![usize::MAX; involutions.len()];
    let mut representatives = vec![];
    for i in 0..involutions.len() {
        if labels[i] != usize::MAX {
            continue;
        }
        let class = representatives.len();
        representatives.push(i);
        let u = involutions[i].u();
        let orbit = exec::map_range(units.count(), strategy, |k| {
            index.get(&act(&units.get(k), u, lambda).canonical_mod_center()).copied()
        });
        for hit in orbit {
            let h = hit.ok_or_else(|| Error::InternalInconsistency("orbit leaves the involution set".into()))?;
            if labels[h] == usize::MAX {
                labels[h] = class;
            } else if labels[h] != class {
                return Err(Error::InternalInconsistency("orbits overlap".into()));
            }
        }
    }
    Ok(InnerClasses { lambda: lambda.clone(), involutions, labels, representatives })
}

/// Refuses the structural fast paths unless every multiplicative automorphism of
/// every component is inner.
pub fn require_gate(poset: &Arc<Poset>, field: Field, bound: u64) -> Result<Gate> {
    let gate = mult_subset_inn(poset, field, bound)?;
    gate.require()?;
    Ok(gate)
}

/// Decide inner equivalence through the `λ`-stable components: always true
/// when there are none, otherwise componentwise by the oracle.
pub fn inner_equivalent_fast(
    rho: &InvolutionDescriptor,
    eta: &InvolutionDescriptor,
    bounds: Bounds,
    strategy: Strategy,
) -> Result<bool> {
    same_algebra(rho, eta)?;
    if rho.lambda() != eta.lambda() {
        return Err(Error::LambdaMismatch);
    }
    require_gate(rho.poset(), rho.field(), bounds.units)?;
    let ci = component_involution(rho.poset(), rho.lambda())?;
    for &j in &ci.j3 {
        let r = Restriction::new(rho.poset(), &[j])?;
        let (a, b) = (restrict_with(rho, &r)?, restrict_with(eta, &r)?);
        if !inner_equivalent_oracle(&a, &b, bounds.units, strategy)?.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `2^{|J3'|} · ∏_{j ∈ J3 ∖ J3'} |S_K|^{|P3^j| − 1}`.
pub fn count_classes_formula(lambda: &PosetMap, field: Field) -> Result<u64> {
    let ci = component_involution(lambda.poset(), lambda)?;
    let mut count: u64 = 1u64 << ci.j3_prime.len();
    for j in ci.j3.iter().filter(|j| !ci.j3_prime.contains(j)) {
        let exponent = ci.p_sets[j].p3.len() as u32 - 1;
        if exponent == 0 {
            continue;
        }
        match square_class_count(field) {
            SquareClassCount::Finite(s) => count *= s.pow(exponent),
            SquareClassCount::Infinite => return Err(Error::InfiniteSquareClassGroup(field.to_string())),
        }
    }
    Ok(count)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMethod {
    Formula,
    BruteForce,
    BothAgree,
}

#[derive(Clone, Debug)]
pub struct ClassReport {
    pub lambda: PosetMap,
    pub count: u64,
    pub representatives: Vec<InvolutionDescriptor>,
    pub method: CountMethod,
    /// Size of `Inv_λ` modulo inner automorphisms that are the identity.
    pub involutions: usize,
    /// Brute-force class count on each `λ`-stable component.
    pub component_counts: Vec<(usize, u64)>,
    pub formula: Option<u64>,
}

impl ClassReport {
    pub fn component_product(&self) -> u64 {
        self.component_counts.iter().map(|&(_, c)| c).product()
    }
}

/// Partition `Inv_λ` by the oracle; also counts classes on each `λ`-stable
/// component separately.
pub fn count_classes_bruteforce(
    lambda: &PosetMap,
    field: Field,
    bounds: Bounds,
    strategy: Strategy,
) -> Result<ClassReport> {
    let classes = inner_classes(lambda, field, bounds.units, strategy)?;
    let ci = component_involution(lambda.poset(), lambda)?;
    let mut component_counts = vec![];
    for &j in &ci.j3 {
        let count = if lambda.poset().num_components() == 1 {
            classes.count()
        } else {
            let r = Restriction::new(lambda.poset(), &[j])?;
            let lj = lambda.restrict(&r.elements, r.sub.clone())?;
            inner_classes(&lj, field, bounds.units, strategy)?.count()
        };
        component_counts.push((j, count));
    }
    Ok(ClassReport {
        lambda: lambda.clone(),
        count: classes.count(),
        representatives: classes.representatives.iter().map(|&i| classes.involutions[i].clone()).collect(),
        method: CountMethod::BruteForce,
        involutions: classes.involutions.len(),
        component_counts,
        formula: None,
    })
}

/// Brute force, plus the formula when the gate passes.
pub fn classify(lambda: &PosetMap, field: Field, bounds: Bounds, strategy: Strategy) -> Result<(ClassReport, Gate)> {
    let gate = mult_subset_inn(lambda.poset(), field, bounds.units)?;
    let mut report = count_classes_bruteforce(lambda, field, bounds, strategy)?;
    if gate.passes() {
        let formula = count_classes_formula(lambda, field)?;
        report.formula = Some(formula);
        if formula == report.count {
            report.method = CountMethod::BothAgree;
        }
    }
    Ok((report, gate))
}

/// `α̂ ∘ η ∘ α̂⁻¹ = Ψ_{α̂(u)} ∘ ρ_{αλα⁻¹}`.
pub fn conjugate_involution(eta: &InvolutionDescriptor, alpha: &PosetMap) -> Result<InvolutionDescriptor> {
    if alpha.kind() != MapKind::Automorphism {
        return Err(Error::KindMismatch("conjugation needs an automorphism".into()));
    }
    let u = Unit::new(hat(alpha, eta.u())?)?;
    make_involution(eta.lambda().conjugate_by(alpha), u)
}

/// Equivalence under the full automorphism group: some `α ∈ Aut(X)` makes
/// `ρ` and `α̂ ∘ η ∘ α̂⁻¹` inner-equivalent.
pub fn general_equivalent(
    rho: &InvolutionDescriptor,
    eta: &InvolutionDescriptor,
    bounds: Bounds,
    strategy: Strategy,
) -> Result<(bool, Option<EquivalenceWitness>)> {
    general_equivalent_impl(rho, eta, bounds, strategy, true)
}

fn general_equivalent_impl(
    rho: &InvolutionDescriptor,
    eta: &InvolutionDescriptor,
    bounds: Bounds,
    strategy: Strategy,
    cross_check: bool,
) -> Result<(bool, Option<EquivalenceWitness>)> {
    same_algebra(rho, eta)?;
    require_gate(rho.poset(), rho.field(), bounds.units)?;
    let autos = enumerate_maps(rho.poset(), MapKind::Automorphism, false, bounds.max_poset)?;
    let mut found = None;
    for alpha in autos {
        if eta.lambda().conjugate_by(&alpha) != *rho.lambda() {
            continue;
        }
        let moved = conjugate_involution(eta, &alpha)?;
        if let (true, Some(w)) = inner_equivalent_oracle(rho, &moved, bounds.units, strategy)? {
            let witness = EquivalenceWitness { kind: WitnessKind::General, alpha: Some(alpha), ..w };
            if !witness.replay(rho, eta)? {
                return Err(Error::InternalInconsistency("general witness does not replay".into()));
            }
            found = Some(witness);
            break;
        }
    }
    if cross_check && rho.lambda() == eta.lambda() {
        let ci = component_involution(rho.poset(), rho.lambda())?;
        if !ci.j3.is_empty() && ci.j3.len() < rho.poset().num_components() {
            let r = Restriction::new(rho.poset(), &ci.j3)?;
            let (a, b) = (restrict_with(rho, &r)?, restrict_with(eta, &r)?);
            let (restricted, _) = general_equivalent_impl(&a, &b, bounds, strategy, false)?;
            if restricted != found.is_some() {
                return Err(Error::InternalInconsistency(
                    "general equivalence disagrees with its restriction to the stable components".into(),
                ));
            }
        }
    }
    Ok((found.is_some(), found))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::IncidenceFunction;
    use crate::posets::{enumerate_involutions, poset_involutions_conjugate};

    fn f(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn flip(p: Poset) -> PosetMap {
        let p = Arc::new(p);
        let n = p.len();
        PosetMap::involution(p, (0..n).rev().collect()).unwrap()
    }

    fn c2_desc(v: [i64; 3]) -> InvolutionDescriptor {
        let lambda = flip(Poset::chain(2));
        let field = f(3);
        let u = IncidenceFunction::from_fn(lambda.poset().clone(), field, |x, y| {
            field.from_i64(if x != y { v[2] } else { v[x] })
        });
        make_involution(lambda, Unit::new(u).unwrap()).unwrap()
    }

    fn mixed() -> PosetMap {
        let p = Arc::new(Poset::new(&["a", "b", "c", "d"], &[("a", "b")]).unwrap());
        PosetMap::involution(p, vec![1, 0, 3, 2]).unwrap()
    }

    const B: u64 = DEFAULT_UNIT_BOUND;

    #[test]
    fn oracle_examples() {
        let base = c2_desc([1, 1, 0]);
        let (ok, w) = inner_equivalent_oracle(&c2_desc([1, 1, 1]), &base, B, Strategy::default()).unwrap();
        assert!(ok);
        let w = w.unwrap();
        assert_eq!(w.t.to_string(), c2_desc([1, 1, 2]).u().to_string());
        assert!(w.c.center_test() && w.c.is_canonical());
        let (ok, w) = inner_equivalent_oracle(&c2_desc([1, 2, 0]), &base, B, Strategy::default()).unwrap();
        assert!(!ok && w.is_none());
        let (ok, w) = inner_equivalent_oracle(&base, &base, B, Strategy::default()).unwrap();
        assert!(ok);
        assert_eq!(*w.unwrap().t, IncidenceFunction::delta(base.poset().clone(), f(3)));
        let other = InvolutionDescriptor::rho_lambda(
            PosetMap::involution(Arc::new(Poset::antichain(2)), vec![0, 1]).unwrap(),
            f(3),
        )
        .unwrap();
        assert!(inner_equivalent_oracle(&base, &other, B, Strategy::default()).is_err());
    }

    #[test]
    fn formula_examples() {
        assert_eq!(count_classes_formula(&flip(Poset::chain(2)), f(3)).unwrap(), 2);
        assert_eq!(count_classes_formula(&flip(Poset::chain(3)), f(5)).unwrap(), 1);
        assert_eq!(count_classes_formula(&flip(Poset::chain(4)), f(3)).unwrap(), 2);
        assert_eq!(count_classes_formula(&mixed(), f(3)).unwrap(), 2);
        let swapped = PosetMap::involution(Arc::new(Poset::antichain(2)), vec![1, 0]).unwrap();
        assert_eq!(count_classes_formula(&swapped, f(3)).unwrap(), 1);
        // Two fixed points in one component need |S_K|.
        let d = Arc::new(Poset::diamond());
        let lambda = PosetMap::involution(d, vec![3, 1, 2, 0]).unwrap();
        assert_eq!(count_classes_formula(&lambda, f(3)).unwrap(), 2);
        assert!(matches!(count_classes_formula(&lambda, Field::Rationals), Err(Error::InfiniteSquareClassGroup(_))));
        assert_eq!(count_classes_formula(&flip(Poset::chain(3)), Field::Rationals).unwrap(), 1);
    }

    #[test]
    fn brute_force_examples() {
        let b = Bounds::default();
        let r = count_classes_bruteforce(&flip(Poset::chain(2)), f(3), b, Strategy::default()).unwrap();
        assert_eq!(r.count, 2);
        assert_eq!(r.representatives[0].u(), c2_desc([1, 1, 0]).u());
        assert_eq!(r.representatives[1].u(), c2_desc([1, 2, 0]).u());
        assert_eq!(count_classes_bruteforce(&flip(Poset::chain(3)), f(3), b, Strategy::default()).unwrap().count, 1);
        assert_eq!(count_classes_bruteforce(&flip(Poset::chain(4)), f(3), b, Strategy::default()).unwrap().count, 2);
        let m = count_classes_bruteforce(&mixed(), f(3), b, Strategy::default()).unwrap();
        assert_eq!((m.count, m.component_product()), (2, 2));
        let d = Arc::new(Poset::diamond());
        let lambda = PosetMap::involution(d, vec![3, 1, 2, 0]).unwrap();
        let (r, gate) = classify(&lambda, f(3), b, Strategy::default()).unwrap();
        assert!(gate.passes());
        assert_eq!((r.count, r.method), (2, CountMethod::BothAgree));
    }

    #[test]
    fn strategies_agree_on_partition() {
        let lambda = flip(Poset::chain(3));
        let a = inner_classes(&lambda, f(3), B, Strategy::Sequential).unwrap();
        let b = inner_classes(&lambda, f(3), B, Strategy::Parallel).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.involutions, b.involutions);
    }

    #[test]
    fn oracle_is_an_equivalence_relation() {
        let lambda = flip(Poset::chain(3));
        let classes = inner_classes(&lambda, f(3), B, Strategy::default()).unwrap();
        let inv = &classes.involutions;
        let picks: Vec<usize> = (0..inv.len()).step_by((inv.len() / 6).max(1)).collect();
        for &i in &picks {
            for &j in &picks {
                let (ij, w) = inner_equivalent_oracle(&inv[i], &inv[j], B, Strategy::default()).unwrap();
                let (ji, _) = inner_equivalent_oracle(&inv[j], &inv[i], B, Strategy::default()).unwrap();
                assert_eq!(ij, ji);
                assert_eq!(ij, classes.labels[i] == classes.labels[j]);
                if let Some(w) = w {
                    assert!(w.replay(&inv[i], &inv[j]).unwrap());
                }
            }
        }
    }

    #[test]
    fn fast_path_examples() {
        let b = Bounds::default();
        let lambda = mixed();
        let all = enumerate_involutions_over(&lambda, f(3), B, Strategy::default()).unwrap();
        let r = Restriction::new(lambda.poset(), &[0]).unwrap();
        for x in &all {
            for y in &all {
                let fast = inner_equivalent_fast(x, y, b, Strategy::default()).unwrap();
                let oracle = inner_equivalent_oracle(x, y, B, Strategy::default()).unwrap().0;
                let on_chain = inner_equivalent_oracle(
                    &restrict_with(x, &r).unwrap(),
                    &restrict_with(y, &r).unwrap(),
                    B,
                    Strategy::default(),
                )
                .unwrap()
                .0;
                assert_eq!(fast, oracle);
                assert_eq!(fast, on_chain);
            }
        }
        let crown = Arc::new(Poset::crown());
        let lambda = enumerate_involutions(&crown, 10).unwrap().remove(0);
        let rho = InvolutionDescriptor::rho_lambda(lambda, f(3)).unwrap();
        assert_eq!(
            inner_equivalent_fast(&rho, &rho, b, Strategy::default()),
            Err(Error::HypothesisGateFailed { component: 0 })
        );
    }

    #[test]
    fn conjugation_rule() {
        let p = Arc::new(Poset::new(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")]).unwrap());
        let field = f(3);
        let autos = enumerate_maps(&p, MapKind::Automorphism, false, 10).unwrap();
        for lambda in enumerate_involutions(&p, 10).unwrap() {
            for eta in enumerate_involutions_over(&lambda, field, B, Strategy::default()).unwrap().iter().take(5) {
                for alpha in &autos {
                    let moved = conjugate_involution(eta, alpha).unwrap();
                    let a = AlgebraMapDescriptor::induced(alpha.clone(), field);
                    let ai = AlgebraMapDescriptor::induced(alpha.inverse(), field);
                    let composed = compose_canonical(&[a, eta.as_map(), ai]).unwrap();
                    assert!(composed.same_map(&moved.as_map()));
                }
            }
        }
    }

    #[test]
    fn general_examples() {
        let b = Bounds::default();
        let field = f(3);
        let anti = Arc::new(Poset::antichain(2));
        let id = InvolutionDescriptor::rho_lambda(PosetMap::involution(anti.clone(), vec![0, 1]).unwrap(), field).unwrap();
        let sw = InvolutionDescriptor::rho_lambda(PosetMap::involution(anti, vec![1, 0]).unwrap(), field).unwrap();
        assert!(!general_equivalent(&id, &sw, b, Strategy::default()).unwrap().0);
        let (ok, w) = general_equivalent(&id, &id, b, Strategy::default()).unwrap();
        assert!(ok && w.unwrap().alpha.unwrap().is_identity());

        // Three points: swapping a,b versus swapping b,c.
        let three = Arc::new(Poset::antichain(3));
        let ab = InvolutionDescriptor::rho_lambda(PosetMap::involution(three.clone(), vec![1, 0, 2]).unwrap(), field)
            .unwrap();
        let bc = InvolutionDescriptor::rho_lambda(PosetMap::involution(three, vec![0, 2, 1]).unwrap(), field).unwrap();
        let (ok, w) = general_equivalent(&ab, &bc, b, Strategy::default()).unwrap();
        assert!(ok);
        assert!(!w.as_ref().unwrap().alpha.as_ref().unwrap().is_identity());
        assert!(w.unwrap().replay(&ab, &bc).unwrap());
    }

    #[test]
    fn general_on_two_chains() {
        let b = Bounds::default();
        let field = f(3);
        let p = Arc::new(Poset::new(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")]).unwrap());
        let lambdas = enumerate_involutions(&p, 10).unwrap();
        let mut descs = vec![];
        for l in &lambdas {
            descs.extend(count_classes_bruteforce(l, field, b, Strategy::default()).unwrap().representatives);
        }
        for x in &descs {
            for y in &descs {
                let (ok, w) = general_equivalent(x, y, b, Strategy::default()).unwrap();
                if ok {
                    assert!(poset_involutions_conjugate(x.lambda(), y.lambda(), 10).unwrap().is_some());
                    assert!(w.unwrap().replay(x, y).unwrap());
                }
            }
        }
    }
}
