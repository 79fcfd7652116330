//! Elements of the incidence algebra `FI(X, K)` for finite `X`.
//!
//! Functions are stored densely over the relation pairs of the poset, in the
//! poset's basis order, so pairs with `x ≰ y` are simply unrepresentable.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Deref;
use std::sync::Arc;

use rand::Rng;

use crate::error::{bound_check, Error, Result};
use crate::linalg;
use crate::posets::Poset;
use crate::scalars::{Field, Scalar};

#[derive(Clone, Debug)]
pub struct IncidenceFunction {
    poset: Arc<Poset>,
    field: Field,
    entries: Vec<Scalar>,
}

impl PartialEq for IncidenceFunction {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.entries == other.entries
            && (Arc::ptr_eq(&self.poset, &other.poset) || *self.poset == *other.poset)
    }
}

impl Eq for IncidenceFunction {}

impl Hash for IncidenceFunction {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.entries.hash(state);
    }
}

impl IncidenceFunction {
    pub fn zero(poset: Arc<Poset>, field: Field) -> Self {
        let entries = vec![field.zero(); poset.num_pairs()];
        IncidenceFunction { poset, field, entries }
    }

    /// The unity `δ`.
    pub fn delta(poset: Arc<Poset>, field: Field) -> Self {
        Self::from_fn(poset, field, |x, y| if x == y { field.one() } else { field.zero() })
    }

    /// The basis element `e_xy` for the pair at index `k`.
    pub fn basis(poset: Arc<Poset>, field: Field, k: usize) -> Self {
        let mut f = Self::zero(poset, field);
        f.entries[k] = field.one();
        f
    }

    /// All basis elements in basis order.
    pub fn basis_all(poset: &Arc<Poset>, field: Field) -> Vec<Self> {
        (0..poset.num_pairs()).map(|k| Self::basis(poset.clone(), field, k)).collect()
    }

    pub fn from_fn(poset: Arc<Poset>, field: Field, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let entries = poset.pairs().iter().map(|&(x, y)| f(x, y)).collect();
        IncidenceFunction { poset, field, entries }
    }

    pub fn from_entries(poset: Arc<Poset>, field: Field, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != poset.num_pairs() {
            return Err(Error::Mismatch);
        }
        if let Some(s) = entries.iter().find(|s| s.field() != field) {
            return Err(Error::FieldMismatch(s.field().to_string(), field.to_string()));
        }
        Ok(IncidenceFunction { poset, field, entries })
    }

    /// Diagonal function with `values[x]` at `(x, x)`.
    pub fn diagonal_from(poset: Arc<Poset>, field: Field, values: &[Scalar]) -> Self {
        Self::from_fn(poset, field, |x, y| if x == y { values[x].clone() } else { field.zero() })
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn entry(&self, k: usize) -> &Scalar {
        &self.entries[k]
    }


    /// `f(x, y)`, zero when `x ≰ y`.
    pub fn get(&self, x: usize, y: usize) -> Scalar {
        match self.poset.pair_index(x, y) {
            Some(k) => self.entries[k].clone(),
            None => self.field.zero(),
        }
    }

    pub fn diag(&self, x: usize) -> &Scalar {
        &self.entries[self.poset.pair_index(x, x).expect("reflexive")]
    }

    pub fn compatible(&self, other: &Self) -> bool {
        self.field == other.field && (Arc::ptr_eq(&self.poset, &other.poset) || *self.poset == *other.poset)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(Error::Mismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    fn zip(&self, other: &Self, op: impl Fn(&Scalar, &Scalar) -> Scalar) -> Self {
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| op(a, b)).collect();
        IncidenceFunction { poset: self.poset.clone(), field: self.field, entries }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let entries = self.entries.iter().map(|a| a * c).collect();
        IncidenceFunction { poset: self.poset.clone(), field: self.field, entries }
    }

    /// Entrywise product (used for multiplicative maps).
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip(other, |a, b| a * b))
    }

    /// Convolution `(fg)(x, y) = Σ_{x≤z≤y} f(x, z) g(z, y)`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul(other))
    }

    /// Convolution for operands known to share poset and field.
    pub(crate) fn mul(&self, other: &Self) -> Self {
        let p = &self.poset;
        let entries = (0..p.num_pairs())
            .map(|k| {
                p.factorizations(k).iter().fold(self.field.zero(), |acc, &(a, b)| {
                    &acc + &(&self.entries[a] * &other.entries[b])
                })
            })
            .collect();
        IncidenceFunction { poset: self.poset.clone(), field: self.field, entries }
    }

    pub fn is_unit(&self) -> bool {
        (0..self.poset.len()).all(|x| !self.diag(x).is_zero())
    }

    /// The two-sided inverse, by upper-triangular recursion in basis order.
    pub fn invert(&self) -> Result<Self> {
        if let Some(x) = (0..self.poset.len()).find(|&x| self.diag(x).is_zero()) {
            return Err(Error::NotInvertible(self.poset.label(x).to_string()));
        }
        let p = &self.poset;
        let mut g = vec![self.field.zero(); p.num_pairs()];
        let diag_inv: Vec<Scalar> = (0..p.len()).map(|x| self.diag(x).inv().expect("checked nonzero")).collect();
        for k in (0..p.num_pairs()).rev() {
            let (x, y) = p.pairs()[k];
            if x == y {
                g[k] = diag_inv[x].clone();
                continue;
            }
            let xx = p.pair_index(x, x).unwrap();
            let sum = p
                .factorizations(k)
                .iter()
                .filter(|&&(a, _)| a != xx)
                .fold(self.field.zero(), |acc, &(a, b)| &acc + &(&self.entries[a] * &g[b]));
            g[k] = -&(&diag_inv[x] * &sum);
        }
        Ok(IncidenceFunction { poset: self.poset.clone(), field: self.field, entries: g })
    }

    pub fn is_diagonal(&self) -> bool {
        self.poset.pairs().iter().zip(&self.entries).all(|(&(x, y), v)| x == y || v.is_zero())
    }

    /// Whether `f` is central: diagonal and constant on each component.
    pub fn center_test(&self) -> bool {
        self.is_diagonal()
            && self.poset.components().iter().all(|c| c.iter().all(|&x| self.diag(x) == self.diag(c[0])))
    }

    /// Restriction `f_L` to the components in `comps`.
    pub fn restrict(&self, comps: &[usize]) -> Result<Self> {
        let r = Restriction::new(&self.poset, comps)?;
        Ok(r.apply(self))
    }

    /// `(f_j)_{j ∈ J}`.
    pub fn split_components(&self) -> Vec<Self> {
        (0..self.poset.num_components())
            .map(|j| self.restrict(&[j]).expect("component index is valid"))
            .collect()
    }

    /// Inverse of [`split_components`](Self::split_components).
    pub fn from_components(poset: Arc<Poset>, field: Field, parts: &[Self]) -> Result<Self> {
        if parts.len() != poset.num_components() {
            return Err(Error::Mismatch);
        }
        let mut f = Self::zero(poset.clone(), field);
        for (j, part) in parts.iter().enumerate() {
            f = f.with_block(&Restriction::new(&poset, &[j])?, part)?;
        }
        Ok(f)
    }

    /// Replace the `X_L × X_L` block with `g`.
    pub fn with_block(&self, r: &Restriction, g: &Self) -> Result<Self> {
        if g.field != self.field || *g.poset != *r.sub {
            return Err(Error::Mismatch);
        }
        let mut out = self.clone();
        for (k, &(x, y)) in r.sub.pairs().iter().enumerate() {
            let pk = self.poset.pair_index(r.elements[x], r.elements[y]).expect("subposet pair");
            out.entries[pk] = g.entries[k].clone();
        }
        Ok(out)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, poset: Arc<Poset>, field: Field) -> Self {
        let entries = (0..poset.num_pairs()).map(|_| random_scalar(rng, field)).collect();
        IncidenceFunction { poset, field, entries }
    }

    /// A random element with nonzero diagonal.
    pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, poset: Arc<Poset>, field: Field) -> Unit {
        let entries = poset
            .pairs()
            .iter()
            .map(|&(x, y)| if x == y { random_nonzero(rng, field) } else { random_scalar(rng, field) })
            .collect();
        Unit(IncidenceFunction { poset, field, entries })
    }
}

impl fmt::Display for IncidenceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .poset
            .pairs()
            .iter()
            .zip(&self.entries)
            .map(|(&(x, y), v)| format!("({},{})={}", self.poset.label(x), self.poset.label(y), v))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R, field: Field) -> Scalar {
    match field {
        Field::Prime(p) => field.from_i64(rng.gen_range(0..p) as i64),
        Field::Rationals => field.from_ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3)).unwrap(),
    }
}

pub fn random_nonzero<R: Rng + ?Sized>(rng: &mut R, field: Field) -> Scalar {
    loop {
        let s = random_scalar(rng, field);
        if !s.is_zero() {
            return s;
        }
    }
}

/// The component subposet `X_L` together with its embedding into `X`.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub comps: Vec<usize>,
    /// `elements[i]` is the parent index of the subposet's element `i`.
    pub elements: Vec<usize>,
    pub sub: Arc<Poset>,
}

impl Restriction {
    pub fn new(poset: &Poset, comps: &[usize]) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::EmptyComponentSet);
        }
        if comps.iter().any(|&j| j >= poset.num_components()) {
            return Err(Error::Mismatch);
        }
        let mut comps = comps.to_vec();
        comps.sort_unstable();
        comps.dedup();
        let elements = poset.component_union(&comps);
        let sub = Arc::new(poset.subposet(&elements));
        Ok(Restriction { comps, elements, sub })
    }

    /// The complementary component set, `None` when `L = J`.
    pub fn complement(&self, poset: &Poset) -> Option<Result<Self>> {
        let rest: Vec<usize> = (0..poset.num_components()).filter(|j| !self.comps.contains(j)).collect();
        (!rest.is_empty()).then(|| Restriction::new(poset, &rest))
    }

    pub fn apply(&self, f: &IncidenceFunction) -> IncidenceFunction {
        IncidenceFunction::from_fn(self.sub.clone(), f.field, |x, y| f.get(self.elements[x], self.elements[y]))
    }
}

/// An invertible incidence function.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Unit(IncidenceFunction);

impl Unit {
    pub fn new(f: IncidenceFunction) -> Result<Unit> {
        if let Some(x) = (0..f.poset.len()).find(|&x| f.diag(x).is_zero()) {
            return Err(Error::NotInvertible(f.poset.label(x).to_string()));
        }
        Ok(Unit(f))
    }

    pub fn delta(poset: Arc<Poset>, field: Field) -> Unit {
        Unit(IncidenceFunction::delta(poset, field))
    }

    pub fn inverse(&self) -> Unit {
        Unit(self.0.invert().expect("units are invertible"))
    }

    pub fn mul(&self, other: &Unit) -> Unit {
        Unit(self.0.mul(&other.0))
    }

    pub fn as_function(&self) -> &IncidenceFunction {
        &self.0
    }

    pub fn into_inner(self) -> IncidenceFunction {
        self.0
    }

    /// The representative of `u Z(FI)^*` whose diagonal entry at the least
    /// element of every component is 1.
    pub fn canonical_mod_center(&self) -> Unit {
        let p = &self.0.poset;
        let scale: Vec<Scalar> = p
            .components()
            .iter()
            .map(|c| self.0.diag(c[0]).inv().expect("unit"))
            .collect();
        let entries = p
            .pairs()
            .iter()
            .zip(&self.0.entries)
            .map(|(&(x, _), v)| v * &scale[p.component_of(x)])
            .collect();
        Unit(IncidenceFunction { poset: p.clone(), field: self.0.field, entries })
    }

    pub fn is_canonical(&self) -> bool {
        self.0.poset.components().iter().all(|c| self.0.diag(c[0]).is_one())
    }
}

impl Deref for Unit {
    type Target = IncidenceFunction;
    fn deref(&self) -> &IncidenceFunction {
        &self.0
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One indicator diagonal per component; a basis of the center.
pub fn center_basis(poset: &Arc<Poset>, field: Field) -> Vec<IncidenceFunction> {
    (0..poset.num_components())
        .map(|j| {
            IncidenceFunction::from_fn(poset.clone(), field, |x, y| {
                if x == y && poset.component_of(x) == j {
                    field.one()
                } else {
                    field.zero()
                }
            })
        })
        .collect()
}

/// A basis of `{ f : fg = gf for every basis element g }`, computed by
/// linear algebra with no reference to the component structure.
pub fn commutant_basis(poset: &Arc<Poset>, field: Field) -> Vec<IncidenceFunction> {
    let basis = IncidenceFunction::basis_all(poset, field);
    let n = basis.len();
    // Column k holds the commutators [e_k, e_m] for all m, stacked.
    let mut rows = vec![vec![field.zero(); n]; n * n];
    for (k, ek) in basis.iter().enumerate() {
        for (m, em) in basis.iter().enumerate() {
            let comm = ek.mul(em).sub(&em.mul(ek)).expect("same algebra");
            for (r, v) in comm.entries.iter().enumerate() {
                rows[m * n + r][k] = v.clone();
            }
        }
    }
    rows.retain(|r| r.iter().any(|v| !v.is_zero()));
    linalg::nullspace(field, rows, n)
        .into_iter()
        .map(|v| IncidenceFunction { poset: poset.clone(), field, entries: v })
        .collect()
}

/// Whether two families of functions span the same subspace.
pub fn same_span(a: &[IncidenceFunction], b: &[IncidenceFunction]) -> bool {
    let Some(first) = a.first().or(b.first()) else {
        return true;
    };
    let field = first.field;
    let cols = first.entries.len();
    let rows = |fs: &[IncidenceFunction]| fs.iter().map(|f| f.entries.clone()).collect::<Vec<_>>();
    let ra = linalg::rank(field, transpose(rows(a), cols), a.len());
    let rb = linalg::rank(field, transpose(rows(b), cols), b.len());
    let mut both = rows(a);
    both.extend(rows(b));
    let rab = linalg::rank(field, transpose(both, cols), a.len() + b.len());
    ra == rb && ra == rab
}

fn transpose(m: Vec<Vec<Scalar>>, cols: usize) -> Vec<Vec<Scalar>> {
    (0..cols).map(|c| m.iter().map(|r| r[c].clone()).collect()).collect()
}

/// Canonical units modulo the center, i.e. one representative per inner
/// automorphism, indexed lexicographically by the diagonal entries (in
/// element order) followed by the strict pairs (in basis order).
#[derive(Clone, Debug)]
pub struct UnitsModCenter {
    poset: Arc<Poset>,
    field: Field,
    q: u64,
    /// Per pair: 0 = pinned to 1, 1 = any nonzero, 2 = anything.
    slots: Vec<u8>,
    /// Pair indices, most significant digit first.
    order: Vec<usize>,
    count: u64,
}

impl UnitsModCenter {
    pub fn new(poset: &Arc<Poset>, field: Field, bound: u64) -> Result<Self> {
        let q = field.order().ok_or_else(|| Error::BoundExceeded {
            what: "units modulo center over Q".into(),
            actual: u128::MAX,
            bound: bound as u128,
        })?;
        let anchors: Vec<usize> = poset.components().iter().map(|c| c[0]).collect();
        let slots: Vec<u8> = poset
            .pairs()
            .iter()
            .map(|&(x, y)| {
                if x != y {
                    2
                } else if anchors.contains(&x) {
                    0
                } else {
                    1
                }
            })
            .collect();
        let mut count: u128 = 1;
        for &s in &slots {
            count = count.saturating_mul(match s {
                0 => 1,
                1 => (q - 1) as u128,
                _ => q as u128,
            });
        }
        bound_check("units modulo center", count, bound as u128)?;
        let diagonal = (0..poset.len()).map(|x| poset.pair_index(x, x).unwrap());
        let strict = (0..poset.num_pairs()).filter(|&k| slots[k] == 2);
        let order = diagonal.chain(strict).collect();
        Ok(UnitsModCenter { poset: poset.clone(), field, q, slots, order, count: count as u64 })
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn get(&self, mut index: u64) -> Unit {
        let mut entries = vec![self.field.zero(); self.slots.len()];
        for &k in self.order.iter().rev() {
            let v = match self.slots[k] {
                0 => 1,
                1 => {
                    let d = index % (self.q - 1);
                    index /= self.q - 1;
                    d + 1
                }
                _ => {
                    let d = index % self.q;
                    index /= self.q;
                    d
                }
            };
            entries[k] = self.field.element_at(v).expect("digit below field order");
        }
        Unit(IncidenceFunction { poset: self.poset.clone(), field: self.field, entries })
    }
}

/// All central units (diagonal, constant per component), finite fields only.
pub fn central_units(poset: &Arc<Poset>, field: Field, bound: u64) -> Result<Vec<Unit>> {
    let nonzero = field.nonzero_elements().ok_or(Error::BoundExceeded {
        what: "central units over Q".into(),
        actual: u128::MAX,
        bound: bound as u128,
    })?;
    let comps = poset.num_components();
    let count = (nonzero.len() as u128).saturating_pow(comps as u32);
    bound_check("central units", count, bound as u128)?;
    let mut out = vec![];
    for mut i in 0..count as u64 {
        let mut per = vec![field.zero(); comps];
        for j in (0..comps).rev() {
            per[j] = nonzero[(i % nonzero.len() as u64) as usize].clone();
            i /= nonzero.len() as u64;
        }
        let values: Vec<Scalar> = (0..poset.len()).map(|x| per[poset.component_of(x)].clone()).collect();
        out.push(Unit(IncidenceFunction::diagonal_from(poset.clone(), field, &values)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posets::posets_up_to;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn f3() -> Field {
        Field::prime(3).unwrap()
    }

    fn c2() -> Arc<Poset> {
        Arc::new(Poset::chain(2))
    }

    /// (f(a,a), f(b,b), f(a,b)) on the 2-chain.
    fn on_c2(field: Field, v: [i64; 3]) -> IncidenceFunction {
        let p = c2();
        IncidenceFunction::from_fn(p, field, |x, y| match (x, y) {
            (0, 0) => field.from_i64(v[0]),
            (1, 1) => field.from_i64(v[1]),
            _ => field.from_i64(v[2]),
        })
    }

    fn triple(f: &IncidenceFunction) -> [String; 3] {
        [f.get(0, 0).to_string(), f.get(1, 1).to_string(), f.get(0, 1).to_string()]
    }

    #[test]
    fn delta_examples() {
        let d = IncidenceFunction::delta(c2(), f3());
        assert_eq!(triple(&d), ["1", "1", "0"]);
        assert_eq!(d.convolve(&d).unwrap(), d);
        assert!(d.center_test());
    }

    #[test]
    fn convolution_example() {
        let f = on_c2(f3(), [1, 2, 1]);
        assert_eq!(triple(&f.convolve(&f).unwrap()), ["1", "1", "0"]);
        let d = IncidenceFunction::delta(c2(), f3());
        assert_eq!(d.convolve(&f).unwrap(), f);
        assert_eq!(f.convolve(&d).unwrap(), f);
        let other = IncidenceFunction::delta(Arc::new(Poset::chain(3)), f3());
        assert_eq!(f.convolve(&other), Err(Error::Mismatch));
    }

    #[test]
    fn inverse_examples() {
        let f = on_c2(f3(), [1, 2, 1]);
        let g = f.invert().unwrap();
        assert_eq!(triple(&g), ["1", "2", "1"]);
        let d = IncidenceFunction::delta(c2(), f3());
        assert_eq!(d.invert().unwrap(), d);
        let f5 = Field::prime(5).unwrap();
        let diag = on_c2(f5, [3, 3, 0]);
        assert_eq!(triple(&diag.invert().unwrap()), ["2", "2", "0"]);
        let singular = on_c2(f3(), [1, 0, 1]);
        assert_eq!(singular.invert(), Err(Error::NotInvertible("b".into())));
    }

    #[test]
    fn center_examples() {
        let p = Arc::new(Poset::chain(2).disjoint_union(&Poset::new(&["z"], &[]).unwrap()).unwrap());
        assert_eq!(center_basis(&p, f3()).len(), 2);
        let connected = Arc::new(Poset::diamond());
        let basis = center_basis(&connected, f3());
        assert_eq!(basis, vec![IncidenceFunction::delta(connected.clone(), f3())]);
        let f = IncidenceFunction::diagonal_from(c2(), f3(), &[f3().one(), f3().from_i64(2)]);
        assert!(!f.center_test());
    }

    #[test]
    fn center_equals_commutant() {
        for p in posets_up_to(4) {
            let p = Arc::new(p);
            for field in [f3(), Field::prime(5).unwrap()] {
                let comm = commutant_basis(&p, field);
                let center = center_basis(&p, field);
                assert_eq!(comm.len(), center.len(), "{p}");
                assert!(same_span(&comm, &center));
                assert!(comm.iter().all(|f| f.center_test()));
            }
        }
    }

    #[test]
    fn restriction_identities() {
        let mut rng = StdRng::seed_from_u64(7);
        let p = Arc::new(
            Poset::new(&["a", "b", "c", "d", "e"], &[("a", "b"), ("a", "c"), ("d", "e")]).unwrap(),
        );
        let field = Field::prime(5).unwrap();
        for _ in 0..50 {
            let f = IncidenceFunction::random(&mut rng, p.clone(), field);
            let g = IncidenceFunction::random(&mut rng, p.clone(), field);
            for l in [vec![0], vec![1], vec![0, 1]] {
                let r = Restriction::new(&p, &l).unwrap();
                assert_eq!(r.apply(&f.add(&g).unwrap()), r.apply(&f).add(&r.apply(&g)).unwrap());
                let c = field.from_i64(3);
                assert_eq!(r.apply(&f.scale(&c)), r.apply(&f).scale(&c));
                assert_eq!(r.apply(&f.mul(&g)), r.apply(&f).mul(&r.apply(&g)));
                let u = IncidenceFunction::random_unit(&mut rng, p.clone(), field);
                assert_eq!(r.apply(&u.invert().unwrap()), r.apply(&u).invert().unwrap());
            }
            let parts = f.split_components();
            assert_eq!(IncidenceFunction::from_components(p.clone(), field, &parts).unwrap(), f);
            let prod: Vec<_> = parts.iter().zip(g.split_components()).map(|(a, b)| a.mul(&b)).collect();
            assert_eq!(f.mul(&g).split_components(), prod);
        }
        assert_eq!(IncidenceFunction::zero(p, field).restrict(&[]), Err(Error::EmptyComponentSet));
    }

    #[test]
    fn unit_iff_blocks_are_units() {
        let p = Arc::new(Poset::chain(2).disjoint_union(&Poset::new(&["z"], &[]).unwrap()).unwrap());
        let field = f3();
        // exhaustive over F3^4
        let elems = field.elements().unwrap();
        for i in 0..81usize {
            let entries: Vec<Scalar> = (0..4).map(|k| elems[(i / 3usize.pow(k)) % 3].clone()).collect();
            let f = IncidenceFunction::from_entries(p.clone(), field, entries).unwrap();
            let l = f.restrict(&[0]).unwrap();
            let lc = f.restrict(&[1]).unwrap();
            assert_eq!(f.is_unit(), l.is_unit() && lc.is_unit());
            assert_eq!(f.center_test(), l.center_test() && lc.center_test());
        }
    }

    #[test]
    fn units_mod_center_layout() {
        let crown = Arc::new(Poset::crown());
        let units = UnitsModCenter::new(&crown, f3(), 1_000_000).unwrap();
        assert_eq!(units.count(), 648);
        let c4 = Arc::new(Poset::chain(4));
        let units = UnitsModCenter::new(&c4, Field::prime(5).unwrap(), 1_000_000).unwrap();
        assert_eq!(units.count(), 1_000_000);
        assert!(UnitsModCenter::new(&Arc::new(Poset::chain(5)), Field::prime(5).unwrap(), 1_000_000).is_err());
        let units = UnitsModCenter::new(&c2(), f3(), 100).unwrap();
        let all: Vec<String> = (0..units.count()).map(|i| units.get(i).to_string()).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], "(a,a)=1 (a,b)=0 (b,b)=1");
        assert!((0..units.count()).all(|i| units.get(i).is_canonical()));
        assert_eq!(central_units(&c2(), f3(), 10).unwrap().len(), 2);
    }

    #[test]
    fn canonical_mod_center_is_idempotent() {
        let mut rng = StdRng::seed_from_u64(3);
        let p = Arc::new(Poset::new(&["a", "b", "c"], &[("a", "b")]).unwrap());
        for _ in 0..50 {
            let u = IncidenceFunction::random_unit(&mut rng, p.clone(), Field::prime(7).unwrap());
            let c = u.canonical_mod_center();
            assert!(c.is_canonical());
            assert_eq!(c.canonical_mod_center(), c);
            // u c^{-1} is central
            assert!(u.mul(&c.inverse()).center_test());
        }
    }
}
