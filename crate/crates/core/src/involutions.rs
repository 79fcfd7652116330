//! Involutions `Ψ_u ∘ ρ_λ` of `FI(X, K)` over a fixed poset involution `λ`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::algebra::{random_nonzero, random_scalar, IncidenceFunction, Restriction, Unit, UnitsModCenter};
use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::morphisms::{inner, AlgebraMapDescriptor};
use crate::posets::{Poset, PosetMap};
use crate::scalars::{Field, Scalar};

/// `Ψ_u ∘ ρ_λ` with `u` stored in canonical form modulo the center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutionDescriptor {
    lambda: PosetMap,
    u: Unit,
}

impl InvolutionDescriptor {
    /// `ρ_λ` itself.
    pub fn rho_lambda(lambda: PosetMap, field: Field) -> Result<Self> {
        let u = Unit::delta(lambda.poset().clone(), field);
        make_involution(lambda, u)
    }

    pub fn lambda(&self) -> &PosetMap {
        &self.lambda
    }

    pub fn u(&self) -> &Unit {
        &self.u
    }

    pub fn poset(&self) -> &Arc<Poset> {
        self.lambda.poset()
    }

    pub fn field(&self) -> Field {
        self.u.field()
    }

    pub fn as_map(&self) -> AlgebraMapDescriptor {
        AlgebraMapDescriptor::involution(self.u.clone(), self.lambda.clone())
    }

    pub fn apply(&self, f: &IncidenceFunction) -> Result<IncidenceFunction> {
        inner(&self.u, &rho_of(&self.lambda, f))
    }
}

impl fmt::Display for InvolutionDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lambda[{}] u[{}]", self.lambda, self.u)
    }
}

/// `ρ_λ(u)` for a poset involution, skipping the kind check.
fn rho_of(lambda: &PosetMap, f: &IncidenceFunction) -> IncidenceFunction {
    IncidenceFunction::from_fn(f.poset().clone(), f.field(), |x, y| f.get(lambda.apply(y), lambda.apply(x)))
}

/// For each pair `(x, y)`, the index of `(λy, λx)`.
fn rho_table(lambda: &PosetMap) -> Vec<usize> {
    let p = lambda.poset();
    p.pairs()
        .iter()
        .map(|&(x, y)| p.pair_index(lambda.apply(y), lambda.apply(x)).expect("λ reverses order"))
        .collect()
}

/// The per-component constants `k` with `ρ_λ(u) = k·u`, if they exist.
fn scalar_multiple(u: &IncidenceFunction, table: &[usize]) -> Option<Vec<Scalar>> {
    let p = u.poset();
    let k: Vec<Scalar> = p
        .components()
        .iter()
        .map(|c| {
            let a = p.pair_index(c[0], c[0]).unwrap();
            u.entry(table[a]).checked_div(u.entry(a)).expect("unit diagonal")
        })
        .collect();
    p.pairs()
        .iter()
        .enumerate()
        .all(|(i, &(x, _))| u.entry(table[i]) == &(&k[p.component_of(x)] * u.entry(i)))
        .then_some(k)
}

fn check_lambda(lambda: &PosetMap, u: &IncidenceFunction) -> Result<()> {
    if !lambda.is_involution() {
        return Err(Error::NotAnInvolution(format!("poset map {lambda} is not an order-reversing involution")));
    }
    if **lambda.poset() != **u.poset() {
        return Err(Error::Mismatch);
    }
    Ok(())
}

/// Validate `Ψ_u ∘ ρ_λ` as an involution: `ρ_λ(u) u⁻¹` must be central.
pub fn make_involution(lambda: PosetMap, u: Unit) -> Result<InvolutionDescriptor> {
    certificate_for(&lambda, &u)?;
    Ok(InvolutionDescriptor { u: u.canonical_mod_center(), lambda })
}

/// `v = ρ_λ(u) u⁻¹` with its per-component constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralUnitCertificate {
    pub v: Unit,
    /// `k[j]` is the value of `v` on component `j`.
    pub k: Vec<Scalar>,
}

/// The central certificate of an arbitrary (not necessarily canonical) `u`.
pub fn certificate_for(lambda: &PosetMap, u: &Unit) -> Result<CentralUnitCertificate> {
    check_lambda(lambda, u)?;
    let v = rho_of(lambda, u).convolve(&u.inverse())?;
    if !v.center_test() {
        return Err(Error::NotAnInvolution(format!("ρ_λ(u)u⁻¹ = {v} is not central")));
    }
    let p = u.poset();
    let k: Vec<Scalar> = p.components().iter().map(|c| v.diag(c[0]).clone()).collect();
    for (j, c) in p.components().iter().enumerate() {
        let partner = p.component_of(lambda.apply(c[0]));
        if !(&k[j] * &k[partner]).is_one() {
            return Err(Error::InternalInconsistency(format!("k_{j}·k_{partner} ≠ 1")));
        }
    }
    Ok(CentralUnitCertificate { v: Unit::new(v)?, k })
}

pub fn central_certificate(rho: &InvolutionDescriptor) -> CentralUnitCertificate {
    certificate_for(&rho.lambda, &rho.u).expect("descriptor is valid")
}

/// Every involution inducing `λ`, one per inner automorphism `Ψ_u`, in the
/// enumeration order of canonical units.
pub fn enumerate_involutions_over(
    lambda: &PosetMap,
    field: Field,
    bound: u64,
    strategy: Strategy,
) -> Result<Vec<InvolutionDescriptor>> {
    let delta = IncidenceFunction::delta(lambda.poset().clone(), field);
    check_lambda(lambda, &delta)?;
    let units = UnitsModCenter::new(lambda.poset(), field, bound)?;
    let table = rho_table(lambda);
    Ok(exec::filter_map_range(units.count(), strategy, |i| {
        let u = units.get(i);
        scalar_multiple(&u, &table).map(|_| InvolutionDescriptor { lambda: lambda.clone(), u })
    }))
}

/// `λ̄` on component indices.
fn component_map(lambda: &PosetMap) -> Vec<usize> {
    let p = lambda.poset();
    p.components().iter().map(|c| p.component_of(lambda.apply(c[0]))).collect()
}

/// Elements of the components whose index is below their `λ̄` partner; the
/// `L1` block of the orbit split `J = L1 ⊔ L2`. Fails when some component is
/// `λ`-stable.
fn first_block(lambda: &PosetMap) -> Result<Vec<bool>> {
    let bar = component_map(lambda);
    if bar.iter().enumerate().any(|(j, &k)| j == k) {
        return Err(Error::PreconditionViolated("λ maps some component onto itself".into()));
    }
    let p = lambda.poset();
    Ok((0..p.len()).map(|x| p.component_of(x) < bar[p.component_of(x)]).collect())
}

/// Solve `v1 ρ_λ(v1) = u1` for a `ρ_λ`-fixed unit when no component is
/// `λ`-stable: `v1` is `u1` on the `L1` block and `δ` on the `L2` block.
pub fn solve_norm_equation(lambda: &PosetMap, u1: &Unit) -> Result<Unit> {
    check_lambda(lambda, u1)?;
    let in_l1 = first_block(lambda)?;
    if rho_of(lambda, u1) != **u1 {
        return Err(Error::PreconditionViolated("u1 is not fixed by ρ_λ".into()));
    }
    let field = u1.field();
    let v1 = IncidenceFunction::from_fn(u1.poset().clone(), field, |x, y| {
        if in_l1[x] {
            u1.get(x, y)
        } else if x == y {
            field.one()
        } else {
            field.zero()
        }
    });
    let v1 = Unit::new(v1)?;
    if v1.convolve(&rho_of(lambda, &v1))? != **u1 {
        return Err(Error::InternalInconsistency("v1·ρ_λ(v1) ≠ u1".into()));
    }
    Ok(v1)
}

/// The diagonal `w` equal to `k_j` on components of `J1` and 1 elsewhere;
/// checks `ρ_λ(w) v = w`.
pub fn build_w(lambda: &PosetMap, cert: &CentralUnitCertificate) -> Result<Unit> {
    check_lambda(lambda, &cert.v)?;
    let in_l1 = first_block(lambda)?;
    let p = lambda.poset();
    let field = cert.v.field();
    let values: Vec<Scalar> = (0..p.len())
        .map(|x| if in_l1[x] { cert.k[p.component_of(x)].clone() } else { field.one() })
        .collect();
    let w = Unit::new(IncidenceFunction::diagonal_from(p.clone(), field, &values))?;
    if rho_of(lambda, &w).convolve(&cert.v)? != *w {
        return Err(Error::InternalInconsistency("ρ_λ(w)·v ≠ w".into()));
    }
    Ok(w)
}

/// The explicit proof that `Ψ_u ∘ ρ_λ` is conjugate to `ρ_λ` when no
/// component is `λ`-stable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseWitness {
    pub certificate: CentralUnitCertificate,
    pub w: Unit,
    /// `w·u`, fixed by `ρ_λ`.
    pub u1: Unit,
    /// `v1 ρ_λ(v1) = u1`.
    pub v1: Unit,
    /// `Ψ_{v1⁻¹} ∘ ρ = ρ_λ ∘ Ψ_{v1⁻¹}`.
    pub conjugator: Unit,
}

impl CollapseWitness {
    /// Check every link of the chain, ending with the conjugation identity on
    /// the full basis.
    pub fn replay(&self, lambda: &PosetMap, u: &Unit) -> Result<bool> {
        let field = u.field();
        let v_ok = rho_of(lambda, u) == self.certificate.v.convolve(u)? && self.certificate.v.center_test();
        let w_ok = rho_of(lambda, &self.w).convolve(&self.certificate.v)? == *self.w;
        let u1_ok = *self.u1 == self.w.convolve(u)? && rho_of(lambda, &self.u1) == *self.u1;
        let v1_ok = self.v1.convolve(&rho_of(lambda, &self.v1))? == *self.u1;
        let conj = AlgebraMapDescriptor::inner(self.conjugator.clone());
        let rho = AlgebraMapDescriptor::involution(u.clone(), lambda.clone());
        let target = AlgebraMapDescriptor::induced(lambda.clone(), field);
        let mut conj_ok = true;
        for e in IncidenceFunction::basis_all(lambda.poset(), field) {
            conj_ok &= conj.apply(&rho.apply(&e)?)? == target.apply(&conj.apply(&e)?)?;
        }
        Ok(v_ok && w_ok && u1_ok && v1_ok && conj_ok)
    }
}

/// Build the collapse chain for a (possibly non-canonical) `u`.
pub fn collapse_witness(lambda: &PosetMap, u: &Unit) -> Result<CollapseWitness> {
    let certificate = certificate_for(lambda, u)?;
    let w = build_w(lambda, &certificate)?;
    let u1 = w.mul(u);
    if rho_of(lambda, &u1) != *u1 {
        return Err(Error::InternalInconsistency("ρ_λ(wu) ≠ wu".into()));
    }
    let v1 = solve_norm_equation(lambda, &u1)?;
    let conjugator = v1.inverse();
    Ok(CollapseWitness { certificate, w, u1, v1, conjugator })
}

/// A random `u` with `Ψ_u ∘ ρ_λ` an involution, for `λ` without stable
/// components: random on the `L1` block, forced on the `L2` block by
/// `ρ_λ(u) = k u` with random `k`.
pub fn random_involution_unit<R: Rng + ?Sized>(rng: &mut R, lambda: &PosetMap, field: Field) -> Result<Unit> {
    let in_l1 = first_block(lambda)?;
    let p = lambda.poset();
    let k: Vec<Scalar> = (0..p.num_components()).map(|_| random_nonzero(rng, field)).collect();
    let mut entries = vec![field.zero(); p.num_pairs()];
    for (i, &(x, y)) in p.pairs().iter().enumerate() {
        if in_l1[x] {
            entries[i] = if x == y { random_nonzero(rng, field) } else { random_scalar(rng, field) };
        }
    }
    for (i, &(x, y)) in p.pairs().iter().enumerate() {
        if !in_l1[x] {
            let src = p.pair_index(lambda.apply(y), lambda.apply(x)).unwrap();
            entries[i] = &k[p.component_of(lambda.apply(x))] * &entries[src];
        }
    }
    Unit::new(IncidenceFunction::from_entries(p.clone(), field, entries)?)
}

/// `ρ_L = Ψ_{u_L} ∘ ρ_{λ_L}` on `X_L` for a `λ`-stable component set `L`.
pub fn restrict_involution(rho: &InvolutionDescriptor, comps: &[usize]) -> Result<InvolutionDescriptor> {
    let r = Restriction::new(rho.poset(), comps)?;
    restrict_with(rho, &r)
}

pub(crate) fn restrict_with(rho: &InvolutionDescriptor, r: &Restriction) -> Result<InvolutionDescriptor> {
    let lambda = rho.lambda.restrict(&r.elements, r.sub.clone())?;
    make_involution(lambda, Unit::new(r.apply(&rho.u))?)
}
