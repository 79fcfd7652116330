//! Maps on `FI(X, K)`: inner automorphisms `Ψ_u`, multiplicative `M_σ`, and
//! the maps `φ̂` / `ρ_φ` induced by poset (anti-)automorphisms.

use std::sync::Arc;

use crate::algebra::{IncidenceFunction, Restriction, Unit, UnitsModCenter};
use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::posets::{MapKind, Poset, PosetMap};
use crate::scalars::{Field, Scalar};

/// A nowhere-zero `σ` with `σ(x,y)σ(y,z) = σ(x,z)` for `x ≤ y ≤ z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicativeElement(IncidenceFunction);

impl MultiplicativeElement {
    pub fn new(f: IncidenceFunction) -> Result<Self> {
        let p = f.poset().clone();
        for (k, &(x, y)) in p.pairs().iter().enumerate() {
            if f.entry(k).is_zero() {
                return Err(Error::NotMultiplicative(format!(
                    "σ({},{}) = 0",
                    p.label(x),
                    p.label(y)
                )));
            }
            for &(a, b) in p.factorizations(k) {
                if &(f.entry(a) * f.entry(b)) != f.entry(k) {
                    let z = p.pairs()[a].1;
                    return Err(Error::NotMultiplicative(format!(
                        "σ({x},{z})σ({z},{y}) ≠ σ({x},{y})",
                        x = p.label(x),
                        y = p.label(y),
                        z = p.label(z)
                    )));
                }
            }
        }
        Ok(MultiplicativeElement(f))
    }

    pub fn one(poset: Arc<Poset>, field: Field) -> Self {
        MultiplicativeElement(IncidenceFunction::from_fn(poset, field, |_, _| field.one()))
    }

    pub fn as_function(&self) -> &IncidenceFunction {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.entries().iter().all(|s| s.is_one())
    }

    pub fn restrict(&self, comps: &[usize]) -> Result<Self> {
        Ok(MultiplicativeElement(self.0.restrict(comps)?))
    }

    /// Extend values on the cover relation multiplicatively; fails when two
    /// saturated chains disagree.
    pub fn from_covers(poset: Arc<Poset>, field: Field, cover_values: &[Scalar]) -> Result<Self> {
        if cover_values.len() != poset.covers().len() {
            return Err(Error::Mismatch);
        }
        let mut entries: Vec<Option<Scalar>> = vec![None; poset.num_pairs()];
        for (&(x, y), v) in poset.covers().iter().zip(cover_values) {
            entries[poset.pair_index(x, y).unwrap()] = Some(v.clone());
        }
        let mut order: Vec<usize> = (0..poset.num_pairs()).collect();
        order.sort_by_key(|&k| poset.factorizations(k).len());
        for k in order {
            let (x, y) = poset.pairs()[k];
            if x == y {
                entries[k] = Some(field.one());
            } else if entries[k].is_none() {
                // Split at any z strictly inside; both halves are shorter.
                let &(a, b) = poset
                    .factorizations(k)
                    .iter()
                    .find(|&&(a, b)| a != poset.pair_index(x, x).unwrap() && b != poset.pair_index(y, y).unwrap())
                    .expect("non-cover pair has an interior point");
                let v = entries[a].as_ref().unwrap() * entries[b].as_ref().unwrap();
                entries[k] = Some(v);
            }
        }
        let f = IncidenceFunction::from_entries(poset, field, entries.into_iter().map(Option::unwrap).collect())?;
        MultiplicativeElement::new(f)
    }
}

/// `τ_h(x, y) = h(x) / h(y)`.
pub fn make_fractional(poset: Arc<Poset>, field: Field, h: &[Scalar]) -> Result<MultiplicativeElement> {
    if h.len() != poset.len() {
        return Err(Error::Mismatch);
    }
    if h.iter().any(Scalar::is_zero) {
        return Err(Error::ZeroInput);
    }
    let inv: Vec<Scalar> = h.iter().map(|v| v.inv().expect("nonzero")).collect();
    Ok(MultiplicativeElement(IncidenceFunction::from_fn(poset, field, |x, y| &h[x] * &inv[y])))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fractionality {
    /// `σ = τ_h`.
    Fractional { h: Vec<Scalar> },
    /// A closed walk `cycle[0], cycle[1], ..., cycle[0]` along comparabilities
    /// whose signed product of `σ` values is `value ≠ 1`.
    Violated { cycle: Vec<usize>, value: Scalar },
}

impl Fractionality {
    pub fn is_fractional(&self) -> bool {
        matches!(self, Fractionality::Fractional { .. })
    }
}

/// Decide whether `σ` is fractional: per component, fix `h(root) = 1`,
/// propagate along a spanning tree of cover edges, then check every pair.
pub fn is_fractional(sigma: &MultiplicativeElement) -> Fractionality {
    let f = &sigma.0;
    let p = f.poset();
    let field = f.field();
    let n = p.len();
    let mut h: Vec<Option<Scalar>> = vec![None; n];
    let mut parent = vec![usize::MAX; n];
    for comp in p.components() {
        let root = comp[0];
        h[root] = Some(field.one());
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &(a, b) in p.covers() {
                let (next, value) = if a == x && h[b].is_none() {
                    // h(b) = h(a) / σ(a, b)
                    (b, h[x].as_ref().unwrap().checked_div(&f.get(a, b)).expect("nonzero"))
                } else if b == x && h[a].is_none() {
                    (a, &f.get(a, b) * h[x].as_ref().unwrap())
                } else {
                    continue;
                };
                h[next] = Some(value);
                parent[next] = x;
                stack.push(next);
            }
        }
    }
    let h: Vec<Scalar> = h.into_iter().map(Option::unwrap).collect();
    for &(x, y) in p.pairs() {
        let expected = h[x].checked_div(&h[y]).expect("nonzero");
        let actual = f.get(x, y);
        if actual != expected {
            let path_to_root = |mut v: usize| {
                let mut path = vec![v];
                while parent[v] != usize::MAX {
                    v = parent[v];
                    path.push(v);
                }
                path
            };
            let mut px = path_to_root(x);
            let mut py = path_to_root(y);
            while px.len() > 1 && py.len() > 1 && px[px.len() - 2] == py[py.len() - 2] {
                px.pop();
                py.pop();
            }
            // x ... lca ... y, closed by the pair (x, y).
            py.pop();
            py.reverse();
            px.extend(py);
            let value = actual.checked_div(&expected).expect("nonzero");
            return Fractionality::Violated { cycle: px, value };
        }
    }
    Fractionality::Fractional { h }
}

/// Result of asking whether `M_σ` is inner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerCheck {
    pub inner: bool,
    /// `u` with `Ψ_u = M_σ`.
    pub conjugator: Option<Unit>,
}

/// `M_σ` is inner iff `σ` is fractional; the witness is `diag(h)`.
pub fn mult_is_inner(sigma: &MultiplicativeElement) -> InnerCheck {
    match is_fractional(sigma) {
        Fractionality::Fractional { h } => {
            let f = sigma.as_function();
            let u = Unit::new(IncidenceFunction::diagonal_from(f.poset().clone(), f.field(), &h)).expect("h nonzero");
            InnerCheck { inner: true, conjugator: Some(u) }
        }
        Fractionality::Violated { .. } => InnerCheck { inner: false, conjugator: None },
    }
}

/// Exhaustive search over units modulo the center for `u` with `Ψ_u = M_σ`.
/// Returns the number of candidates examined with the first hit.
pub fn mult_is_inner_exhaustive(
    sigma: &MultiplicativeElement,
    bound: u64,
    strategy: Strategy,
) -> Result<(u64, InnerCheck)> {
    let f = sigma.as_function();
    let units = UnitsModCenter::new(f.poset(), f.field(), bound)?;
    let basis = IncidenceFunction::basis_all(f.poset(), f.field());
    let found = exec::find_first(units.count(), strategy, |i| {
        let u = units.get(i);
        let ui = u.inverse();
        basis
            .iter()
            .enumerate()
            .all(|(k, e)| u.as_function().mul(e).mul(&ui) == e.scale(f.entry(k)))
            .then_some(u)
    });
    Ok((units.count(), InnerCheck { inner: found.is_some(), conjugator: found }))
}

/// Every multiplicative element on the poset, by enumerating nonzero values
/// on the cover relation and keeping the consistent ones.
pub fn enumerate_multiplicative(poset: &Arc<Poset>, field: Field, bound: u64) -> Result<Vec<MultiplicativeElement>> {
    let nonzero = field.nonzero_elements().ok_or_else(|| Error::BoundExceeded {
        what: "multiplicative elements over Q".into(),
        actual: u128::MAX,
        bound: bound as u128,
    })?;
    let m = poset.covers().len();
    let count = (nonzero.len() as u128).saturating_pow(m as u32);
    crate::error::bound_check("multiplicative candidates", count, bound as u128)?;
    let base = nonzero.len() as u64;
    Ok(exec::filter_map_range(count as u64, Strategy::Sequential, |mut i| {
        let mut values = vec![field.zero(); m];
        for v in values.iter_mut().rev() {
            *v = nonzero[(i % base) as usize].clone();
            i /= base;
        }
        MultiplicativeElement::from_covers(poset.clone(), field, &values).ok()
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateMethod {
    /// Every multiplicative element was enumerated and tested.
    Exhaustive { checked: u64 },
    /// The component has an all-comparable element.
    AllComparable,
    /// The undirected Hasse diagram of the component is a tree.
    HasseTree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentGate {
    pub component: usize,
    pub passes: bool,
    pub method: GateMethod,
    pub counterexample: Option<MultiplicativeElement>,
}

/// Per-component verdict on whether every multiplicative automorphism is
/// inner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub components: Vec<ComponentGate>,
}

impl Gate {
    pub fn passes(&self) -> bool {
        self.components.iter().all(|c| c.passes)
    }

    pub fn first_failure(&self) -> Option<&ComponentGate> {
        self.components.iter().find(|c| !c.passes)
    }

    pub fn require(&self) -> Result<()> {
        match self.first_failure() {
            Some(c) => Err(Error::HypothesisGateFailed { component: c.component }),
            None => Ok(()),
        }
    }
}

/// Check `Mult(FI) ⊆ Inn(FI)` component by component. Exhaustive when the
/// candidate count is within `bound`, otherwise by the structural criteria.
pub fn mult_subset_inn(poset: &Arc<Poset>, field: Field, bound: u64) -> Result<Gate> {
    let mut components = vec![];
    for j in 0..poset.num_components() {
        let r = Restriction::new(poset, &[j])?;
        let sub = &r.sub;
        let exhaustive = field
            .order()
            .map(|q| ((q - 1) as u128).saturating_pow(sub.covers().len() as u32) <= bound as u128)
            .unwrap_or(false);
        let gate = if exhaustive {
            let all = enumerate_multiplicative(sub, field, bound)?;
            let counterexample = all.iter().find(|s| !is_fractional(s).is_fractional()).cloned();
            ComponentGate {
                component: j,
                passes: counterexample.is_none(),
                method: GateMethod::Exhaustive { checked: all.len() as u64 },
                counterexample,
            }
        } else if !sub.all_comparable_elements().is_empty() {
            ComponentGate { component: j, passes: true, method: GateMethod::AllComparable, counterexample: None }
        } else if sub.component_hasse_is_tree(0) {
            ComponentGate { component: j, passes: true, method: GateMethod::HasseTree, counterexample: None }
        } else {
            return Err(Error::BoundExceeded {
                what: format!("multiplicative elements on component {j}"),
                actual: u128::MAX,
                bound: bound as u128,
            });
        };
        components.push(gate);
    }
    Ok(Gate { components })
}

fn check_map(phi: &PosetMap, f: &IncidenceFunction, kind: MapKind) -> Result<()> {
    if phi.kind() != kind {
        return Err(Error::KindMismatch(format!("expected {kind:?}, got {:?}", phi.kind())));
    }
    if **phi.poset() != **f.poset() {
        return Err(Error::Mismatch);
    }
    Ok(())
}

/// `φ̂(f)(x, y) = f(φ⁻¹x, φ⁻¹y)` for an automorphism `φ`.
pub fn hat(phi: &PosetMap, f: &IncidenceFunction) -> Result<IncidenceFunction> {
    check_map(phi, f, MapKind::Automorphism)?;
    let inv = phi.inverse();
    Ok(IncidenceFunction::from_fn(f.poset().clone(), f.field(), |x, y| f.get(inv.apply(x), inv.apply(y))))
}

/// `ρ_φ(f)(x, y) = f(φ⁻¹y, φ⁻¹x)` for an anti-automorphism `φ`.
pub fn rho(phi: &PosetMap, f: &IncidenceFunction) -> Result<IncidenceFunction> {
    check_map(phi, f, MapKind::AntiAutomorphism)?;
    let inv = phi.inverse();
    Ok(IncidenceFunction::from_fn(f.poset().clone(), f.field(), |x, y| f.get(inv.apply(y), inv.apply(x))))
}

/// `φ̂` or `ρ_φ` according to the kind of `φ`.
pub fn transport(phi: &PosetMap, f: &IncidenceFunction) -> IncidenceFunction {
    match phi.kind() {
        MapKind::Automorphism => hat(phi, f),
        MapKind::AntiAutomorphism => rho(phi, f),
    }
    .expect("kind matches by construction")
}

/// `Ψ_u(f) = u f u⁻¹`.
pub fn inner(u: &Unit, f: &IncidenceFunction) -> Result<IncidenceFunction> {
    let ui = u.inverse();
    u.convolve(f)?.convolve(&ui)
}

/// `Ψ_u = Ψ_v` iff `u v⁻¹` is central.
pub fn inner_equal(u: &Unit, v: &Unit) -> Result<bool> {
    Ok(u.convolve(&v.inverse())?.center_test())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Auto,
    Anti,
}

/// `Ψ_u ∘ M_σ ∘ φ̂` (orientation `Auto`) or `Ψ_u ∘ M_σ ∘ ρ_φ` (`Anti`);
/// absent factors are identities.
#[derive(Clone, Debug)]
pub struct AlgebraMapDescriptor {
    poset: Arc<Poset>,
    field: Field,
    pub u: Option<Unit>,
    pub sigma: Option<MultiplicativeElement>,
    pub phi: Option<PosetMap>,
    pub orientation: Orientation,
}

impl AlgebraMapDescriptor {
    pub fn new(
        poset: Arc<Poset>,
        field: Field,
        u: Option<Unit>,
        sigma: Option<MultiplicativeElement>,
        phi: Option<PosetMap>,
        orientation: Orientation,
    ) -> Result<Self> {
        let expected = match orientation {
            Orientation::Auto => MapKind::Automorphism,
            Orientation::Anti => MapKind::AntiAutomorphism,
        };
        match &phi {
            Some(m) if m.kind() != expected => {
                return Err(Error::KindMismatch(format!("{orientation:?} orientation with {:?} map", m.kind())))
            }
            Some(m) if **m.poset() != *poset => return Err(Error::Mismatch),
            None if orientation == Orientation::Anti => {
                return Err(Error::KindMismatch("anti orientation needs a poset map".into()))
            }
            _ => {}
        }
        for f in u.iter().map(|u| u.as_function()).chain(sigma.iter().map(|s| s.as_function())) {
            if f.field() != field || **f.poset() != *poset {
                return Err(Error::Mismatch);
            }
        }
        Ok(AlgebraMapDescriptor { poset, field, u, sigma, phi, orientation })
    }

    pub fn identity(poset: Arc<Poset>, field: Field) -> Self {
        AlgebraMapDescriptor { poset, field, u: None, sigma: None, phi: None, orientation: Orientation::Auto }
    }

    pub fn inner(u: Unit) -> Self {
        let (poset, field) = (u.poset().clone(), u.field());
        AlgebraMapDescriptor { poset, field, u: Some(u), sigma: None, phi: None, orientation: Orientation::Auto }
    }

    pub fn multiplicative(sigma: MultiplicativeElement) -> Self {
        let (poset, field) = (sigma.as_function().poset().clone(), sigma.as_function().field());
        AlgebraMapDescriptor { poset, field, u: None, sigma: Some(sigma), phi: None, orientation: Orientation::Auto }
    }

    /// `φ̂` or `ρ_φ`, by the kind of `φ`.
    pub fn induced(phi: PosetMap, field: Field) -> Self {
        let orientation = match phi.kind() {
            MapKind::Automorphism => Orientation::Auto,
            MapKind::AntiAutomorphism => Orientation::Anti,
        };
        AlgebraMapDescriptor { poset: phi.poset().clone(), field, u: None, sigma: None, phi: Some(phi), orientation }
    }

    /// `Ψ_u ∘ ρ_λ`.
    pub fn involution(u: Unit, lambda: PosetMap) -> Self {
        let (poset, field) = (u.poset().clone(), u.field());
        AlgebraMapDescriptor { poset, field, u: Some(u), sigma: None, phi: Some(lambda), orientation: Orientation::Anti }
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Evaluate right to left.
    pub fn apply(&self, f: &IncidenceFunction) -> Result<IncidenceFunction> {
        if f.field() != self.field || **f.poset() != *self.poset {
            return Err(Error::Mismatch);
        }
        let mut g = match &self.phi {
            Some(phi) => transport(phi, f),
            None => f.clone(),
        };
        if let Some(s) = &self.sigma {
            g = s.as_function().hadamard(&g)?;
        }
        if let Some(u) = &self.u {
            g = inner(u, &g)?;
        }
        Ok(g)
    }

    /// Images of the basis `e_xy` in basis order.
    pub fn tabulate(&self) -> Vec<IncidenceFunction> {
        IncidenceFunction::basis_all(&self.poset, self.field)
            .iter()
            .map(|e| self.apply(e).expect("basis lives in this algebra"))
            .collect()
    }

    /// Functional equality, decided on the basis.
    pub fn same_map(&self, other: &Self) -> bool {
        self.field == other.field && *self.poset == *other.poset && self.tabulate() == other.tabulate()
    }

    /// The poset map read off the images of the diagonal idempotents:
    /// `Φ(e_x) = e_{φ(x)} + (off-diagonal terms)`.
    pub fn induced_permutation(&self) -> Vec<usize> {
        let p = &self.poset;
        (0..p.len())
            .map(|x| {
                let e = IncidenceFunction::basis(p.clone(), self.field, p.pair_index(x, x).unwrap());
                let img = self.apply(&e).expect("same algebra");
                (0..p.len()).find(|&y| img.diag(y).is_one()).expect("idempotent image has a unit diagonal entry")
            })
            .collect()
    }

    fn phi_or_identity(&self) -> PosetMap {
        self.phi.clone().unwrap_or_else(|| PosetMap::identity(self.poset.clone()))
    }

    /// `self ∘ other`, rewritten into a single triple.
    fn then_apply(&self, other: &Self) -> Result<Self> {
        if self.field != other.field || *self.poset != *other.poset {
            return Err(Error::Mismatch);
        }
        let delta = || Unit::delta(self.poset.clone(), self.field);
        let a = self.u.clone().unwrap_or_else(delta);
        let b = other.u.clone().unwrap_or_else(delta);
        let sigma = self.sigma.clone().unwrap_or_else(|| MultiplicativeElement::one(self.poset.clone(), self.field));
        let tau = other.sigma.clone().unwrap_or_else(|| MultiplicativeElement::one(self.poset.clone(), self.field));
        // Φ_A ∘ Ψ_b = Ψ_{b'} ∘ Φ_A and Φ_A ∘ M_τ = M_{τ'} ∘ Φ_A.
        let (b_moved, tau_moved) = match &self.phi {
            None => (b, tau.0),
            Some(phi) => {
                let moved = transport(phi, b.as_function());
                let moved = match phi.kind() {
                    MapKind::Automorphism => Unit::new(moved)?,
                    MapKind::AntiAutomorphism => Unit::new(moved)?.inverse(),
                };
                (moved, transport(phi, &tau.0))
            }
        };
        // M_σ ∘ Ψ_{b'} = Ψ_{M_σ(b')} ∘ M_σ.
        let b_scaled = Unit::new(sigma.0.hadamard(&b_moved)?)?;
        let u = a.mul(&b_scaled);
        let sigma = MultiplicativeElement(sigma.0.hadamard(&tau_moved)?);
        let phi = self.phi_or_identity().compose(&other.phi_or_identity());
        let orientation = match phi.kind() {
            MapKind::Automorphism => Orientation::Auto,
            MapKind::AntiAutomorphism => Orientation::Anti,
        };
        Ok(AlgebraMapDescriptor {
            poset: self.poset.clone(),
            field: self.field,
            u: Some(u),
            sigma: Some(sigma),
            phi: Some(phi),
            orientation,
        })
    }

    /// Absorb fractional `σ` into `u`, reduce `u` modulo the center, and drop
    /// identity factors.
    pub fn canonicalize(mut self) -> Self {
        if let Some(s) = self.sigma.take() {
            match is_fractional(&s) {
                Fractionality::Fractional { h } => {
                    let d = Unit::new(IncidenceFunction::diagonal_from(self.poset.clone(), self.field, &h))
                        .expect("h nonzero");
                    let u = self.u.take().unwrap_or_else(|| Unit::delta(self.poset.clone(), self.field));
                    self.u = Some(u.mul(&d));
                }
                Fractionality::Violated { .. } => self.sigma = Some(s),
            }
        }
        self.u = self.u.take().map(|u| u.canonical_mod_center()).filter(|u| !u.center_test());
        if self.orientation == Orientation::Auto && self.phi.as_ref().is_some_and(|m| m.is_identity()) {
            self.phi = None;
        }
        self
    }
}

/// Collapse `maps[0] ∘ maps[1] ∘ ... ∘ maps[k]` into one canonical triple.
pub fn compose_canonical(maps: &[AlgebraMapDescriptor]) -> Result<AlgebraMapDescriptor> {
    let (first, rest) = maps.split_first().ok_or(Error::Mismatch)?;
    let mut acc = first.clone();
    for m in rest {
        acc = acc.then_apply(m)?;
    }
    Ok(acc.canonicalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posets::{enumerate_involutions, enumerate_maps, posets_up_to};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn f3() -> Field {
        Field::prime(3).unwrap()
    }

    fn c2_flip() -> PosetMap {
        let p = Arc::new(Poset::chain(2));
        enumerate_involutions(&p, 10).unwrap().remove(0)
    }

    fn on_c2(field: Field, v: [i64; 3]) -> IncidenceFunction {
        let p = Arc::new(Poset::chain(2));
        IncidenceFunction::from_fn(p, field, |x, y| match (x, y) {
            (0, 0) => field.from_i64(v[0]),
            (1, 1) => field.from_i64(v[1]),
            _ => field.from_i64(v[2]),
        })
    }

    fn crown_sigma() -> MultiplicativeElement {
        let p = Arc::new(Poset::crown());
        let f = f3();
        let s = |x: &str, y: &str, v: i64| (p.index_of(x).unwrap(), p.index_of(y).unwrap(), v);
        let vals = [s("a", "c", 1), s("a", "d", 1), s("b", "c", 2), s("b", "d", 1)];
        let g = IncidenceFunction::from_fn(p.clone(), f, |x, y| {
            if x == y {
                f.one()
            } else {
                f.from_i64(vals.iter().find(|v| v.0 == x && v.1 == y).unwrap().2)
            }
        });
        MultiplicativeElement::new(g).unwrap()
    }

    #[test]
    fn apply_examples() {
        let f = on_c2(f3(), [1, 2, 1]);
        let id = AlgebraMapDescriptor::inner(Unit::delta(f.poset().clone(), f3()));
        assert_eq!(id.apply(&f).unwrap(), f);
        let rho_l = AlgebraMapDescriptor::induced(c2_flip(), f3());
        assert_eq!(rho_l.apply(&f).unwrap(), on_c2(f3(), [2, 1, 1]));
        let m = AlgebraMapDescriptor::multiplicative(MultiplicativeElement::one(f.poset().clone(), f3()));
        assert_eq!(m.apply(&f).unwrap(), f);
        assert!(matches!(
            AlgebraMapDescriptor::new(f.poset().clone(), f3(), None, None, Some(c2_flip()), Orientation::Auto),
            Err(Error::KindMismatch(_))
        ));
    }

    #[test]
    fn fractional_examples() {
        let p = Arc::new(Poset::chain(2));
        let f5 = Field::prime(5).unwrap();
        let ones = make_fractional(p.clone(), f5, &[f5.one(), f5.one()]).unwrap();
        assert!(ones.is_one());
        let t = make_fractional(p.clone(), f5, &[f5.from_i64(2), f5.from_i64(3)]).unwrap();
        assert_eq!(t.as_function().get(0, 1), f5.from_i64(4));
        assert_eq!(make_fractional(p, f5, &[f5.zero(), f5.one()]), Err(Error::ZeroInput));

        // Restricting τ_h to a component gives τ of the restricted h.
        let q = Arc::new(Poset::new(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")]).unwrap());
        let h: Vec<Scalar> = [1, 2, 3, 4].iter().map(|&v| f5.from_i64(v)).collect();
        let t = make_fractional(q.clone(), f5, &h).unwrap();
        let r = Restriction::new(&q, &[1]).unwrap();
        let th = make_fractional(r.sub.clone(), f5, &[h[2].clone(), h[3].clone()]).unwrap();
        assert_eq!(t.restrict(&[1]).unwrap(), th);
    }

    #[test]
    fn fractionality_decisions() {
        let crown = crown_sigma();
        match is_fractional(&crown) {
            Fractionality::Violated { cycle, value } => {
                assert_eq!(cycle.len(), 4);
                assert_eq!(value, f3().from_i64(2));
            }
            other => panic!("crown σ should not be fractional: {other:?}"),
        }
        let d = Arc::new(Poset::diamond());
        for sigma in enumerate_multiplicative(&d, Field::prime(5).unwrap(), 10_000).unwrap() {
            let check = mult_is_inner(&sigma);
            assert!(check.inner);
            let u = check.conjugator.unwrap();
            assert!(AlgebraMapDescriptor::inner(u).same_map(&AlgebraMapDescriptor::multiplicative(sigma)));
        }
        let one = MultiplicativeElement::one(d.clone(), f3());
        assert_eq!(
            is_fractional(&one),
            Fractionality::Fractional { h: vec![f3().one(); 4] }
        );
    }

    #[test]
    fn crown_is_not_inner_exhaustively() {
        let (checked, res) = mult_is_inner_exhaustive(&crown_sigma(), 1_000_000, Strategy::default()).unwrap();
        assert_eq!(checked, 648);
        assert!(!res.inner);
        assert!(!mult_is_inner(&crown_sigma()).inner);
    }

    #[test]
    fn fractional_matches_exhaustive_on_small_posets() {
        for p in posets_up_to(5) {
            let p = Arc::new(p);
            for sigma in enumerate_multiplicative(&p, f3(), 100_000).unwrap() {
                let fast = mult_is_inner(&sigma).inner;
                if p.len() <= 4 {
                    let (_, slow) = mult_is_inner_exhaustive(&sigma, 1_000_000, Strategy::default()).unwrap();
                    assert_eq!(fast, slow.inner, "{p}\n{}", sigma.as_function());
                }
                // Componentwise: fractional iff each σ_j is.
                let per: bool = (0..p.num_components())
                    .all(|j| is_fractional(&sigma.restrict(&[j]).unwrap()).is_fractional());
                assert_eq!(fast, per);
            }
        }
    }

    #[test]
    fn gate_examples() {
        let crown = Arc::new(Poset::crown());
        let gate = mult_subset_inn(&crown, f3(), 1_000_000).unwrap();
        assert!(!gate.passes());
        assert!(gate.first_failure().unwrap().counterexample.is_some());
        let d = Arc::new(Poset::diamond());
        assert!(mult_subset_inn(&d, f3(), 1_000_000).unwrap().passes());
        let over_q = mult_subset_inn(&d, Field::Rationals, 1_000_000).unwrap();
        assert_eq!(over_q.components[0].method, GateMethod::AllComparable);
        assert!(mult_subset_inn(&crown, Field::Rationals, 1_000_000).is_err());
    }

    #[test]
    fn multiplicative_validation() {
        let p = Arc::new(Poset::chain(3));
        let f = f3();
        let bad = IncidenceFunction::from_fn(p.clone(), f, |x, y| if (x, y) == (0, 2) { f.from_i64(2) } else { f.one() });
        assert!(matches!(MultiplicativeElement::new(bad), Err(Error::NotMultiplicative(_))));
        let zero = IncidenceFunction::zero(p, f);
        assert!(MultiplicativeElement::new(zero).is_err());
    }

    #[test]
    fn inner_equal_examples() {
        let f5 = Field::prime(5).unwrap();
        let d = Arc::new(Poset::diamond());
        let mut rng = StdRng::seed_from_u64(1);
        let u = IncidenceFunction::random_unit(&mut rng, d, f5);
        let two_u = Unit::new(u.scale(&f5.from_i64(2))).unwrap();
        assert!(inner_equal(&u, &two_u).unwrap());
        assert!(inner_equal(&u, &u).unwrap());
        let a = Unit::new(on_c2(f3(), [1, 1, 0])).unwrap();
        let b = Unit::new(on_c2(f3(), [1, 2, 0])).unwrap();
        assert!(!inner_equal(&a, &b).unwrap());
    }

    #[test]
    fn composition_rules() {
        let mut rng = StdRng::seed_from_u64(11);
        let field = Field::prime(5).unwrap();
        let p = Arc::new(Poset::new(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")]).unwrap());
        let autos = enumerate_maps(&p, MapKind::Automorphism, false, 10).unwrap();
        let invs = enumerate_involutions(&p, 10).unwrap();
        let alpha = autos.iter().find(|a| !a.is_identity()).unwrap().clone();
        for _ in 0..20 {
            let u = IncidenceFunction::random_unit(&mut rng, p.clone(), field);
            let v = IncidenceFunction::random_unit(&mut rng, p.clone(), field);
            // Ψ_u ∘ Ψ_v = Ψ_{uv}
            let c = compose_canonical(&[AlgebraMapDescriptor::inner(u.clone()), AlgebraMapDescriptor::inner(v.clone())])
                .unwrap();
            assert!(c.same_map(&AlgebraMapDescriptor::inner(u.mul(&v))));
            assert!(c.phi.is_none() && c.sigma.is_none());
            // α̂ ∘ Ψ_u = Ψ_{α̂(u)} ∘ α̂
            let c = compose_canonical(&[
                AlgebraMapDescriptor::induced(alpha.clone(), field),
                AlgebraMapDescriptor::inner(u.clone()),
            ])
            .unwrap();
            let expected = compose_canonical(&[
                AlgebraMapDescriptor::inner(Unit::new(hat(&alpha, &u).unwrap()).unwrap()),
                AlgebraMapDescriptor::induced(alpha.clone(), field),
            ])
            .unwrap();
            assert!(c.same_map(&expected));
            for lambda in &invs {
                // ρ_λ ∘ Ψ_u = Ψ_{ρ_λ(u)⁻¹} ∘ ρ_λ
                let lhs = compose_canonical(&[
                    AlgebraMapDescriptor::induced(lambda.clone(), field),
                    AlgebraMapDescriptor::inner(u.clone()),
                ])
                .unwrap();
                let moved = Unit::new(rho(lambda, &u).unwrap()).unwrap().inverse();
                let rhs = AlgebraMapDescriptor::involution(moved, lambda.clone());
                assert!(lhs.same_map(&rhs));
                // (Ψ_u ∘ ρ_λ)² = Ψ_{u ρ_λ(u)⁻¹}
                let r = AlgebraMapDescriptor::involution(u.clone(), lambda.clone());
                let sq = compose_canonical(&[r.clone(), r.clone()]).unwrap();
                assert_eq!(sq.orientation, Orientation::Auto);
                assert!(sq.phi.is_none());
                let target = AlgebraMapDescriptor::inner(u.mul(&Unit::new(rho(lambda, &u).unwrap()).unwrap().inverse()));
                assert!(sq.same_map(&target));
                // Pointwise against sequential application.
                let f = IncidenceFunction::random(&mut rng, p.clone(), field);
                assert_eq!(sq.apply(&f).unwrap(), r.apply(&r.apply(&f).unwrap()).unwrap());
                // ρ_λ has order two.
                let rl = AlgebraMapDescriptor::induced(lambda.clone(), field);
                assert_eq!(rl.apply(&rl.apply(&f).unwrap()).unwrap(), f);
            }
        }
    }

    #[test]
    fn composition_with_non_fractional_sigma() {
        let field = f3();
        let sigma = crown_sigma();
        let p = sigma.as_function().poset().clone();
        let mut rng = StdRng::seed_from_u64(5);
        let autos = enumerate_maps(&p, MapKind::Automorphism, false, 10).unwrap();
        for alpha in autos.iter().take(3) {
            let u = IncidenceFunction::random_unit(&mut rng, p.clone(), field);
            let seq = [
                AlgebraMapDescriptor::multiplicative(sigma.clone()),
                AlgebraMapDescriptor::induced(alpha.clone(), field),
                AlgebraMapDescriptor::inner(u.clone()),
                AlgebraMapDescriptor::multiplicative(sigma.clone()),
            ];
            let c = compose_canonical(&seq).unwrap();
            for e in IncidenceFunction::basis_all(&p, field) {
                let mut g = e.clone();
                for m in seq.iter().rev() {
                    g = m.apply(&g).unwrap();
                }
                assert_eq!(c.apply(&e).unwrap(), g);
            }
        }
    }

    #[test]
    fn inner_restricts_componentwise() {
        let mut rng = StdRng::seed_from_u64(2);
        let field = Field::prime(7).unwrap();
        let p = Arc::new(Poset::new(&["a", "b", "c", "d", "e"], &[("a", "b"), ("a", "c"), ("d", "e")]).unwrap());
        for _ in 0..30 {
            let u = IncidenceFunction::random_unit(&mut rng, p.clone(), field);
            let f = IncidenceFunction::random(&mut rng, p.clone(), field);
            for l in [vec![0], vec![1]] {
                let r = Restriction::new(&p, &l).unwrap();
                let lhs = r.apply(&inner(&u, &f).unwrap());
                let rhs = inner(&Unit::new(r.apply(&u)).unwrap(), &r.apply(&f)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn induced_permutation_recovers_lambda() {
        let field = f3();
        for p in posets_up_to(4) {
            let p = Arc::new(p);
            let mut rng = StdRng::seed_from_u64(p.num_pairs() as u64);
            for lambda in enumerate_involutions(&p, 10).unwrap() {
                let u = IncidenceFunction::random_unit(&mut rng, p.clone(), field);
                let m = AlgebraMapDescriptor::involution(u, lambda.clone());
                assert_eq!(m.induced_permutation(), lambda.image());
            }
        }
    }
}
