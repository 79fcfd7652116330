//! Exact scalars over `F_p` (p an odd prime) and over the rationals.
//!
//! Every [`Scalar`] carries its [`Field`], so mixing fields is caught at the
//! point of the operation instead of producing a silently wrong residue.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Largest prime accepted by [`Field::prime`].
pub const DEFAULT_MAX_PRIME: u64 = 997;

/// The coefficient field: a prime field of odd characteristic or `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Prime(u64),
    Rationals,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

impl Field {
    /// `F_p` with the default cap on `p`.
    pub fn prime(p: u64) -> Result<Field> {
        Self::prime_capped(p, DEFAULT_MAX_PRIME)
    }

    pub fn prime_capped(p: u64, cap: u64) -> Result<Field> {
        if p == 2 {
            return Err(Error::InvalidField("characteristic 2 is not supported".into()));
        }
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p > cap {
            return Err(Error::BoundExceeded {
                what: "field modulus".into(),
                actual: p as u128,
                bound: cap as u128,
            });
        }
        Ok(Field::Prime(p))
    }

    pub fn rationals() -> Field {
        Field::Rationals
    }

    /// Number of elements, `None` for `Q`.
    pub fn order(&self) -> Option<u64> {
        match self {
            Field::Prime(p) => Some(*p),
            Field::Rationals => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Field::Prime(_))
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        let repr = match self {
            Field::Prime(p) => Repr::Residue(n.rem_euclid(*p as i64) as u64),
            Field::Rationals => Repr::Ratio(BigRational::from_integer(BigInt::from(n))),
        };
        Scalar { field: *self, repr }
    }

    /// `num / den` in this field.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Scalar> {
        let d = self.from_i64(den);
        self.from_i64(num).checked_div(&d)
    }

    /// The `i`-th element in residue order (prime fields only).
    pub fn element_at(&self, i: u64) -> Option<Scalar> {
        match self {
            Field::Prime(p) if i < *p => Some(Scalar { field: *self, repr: Repr::Residue(i) }),
            _ => None,
        }
    }

    /// All elements in residue order, `None` for `Q`.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        let q = self.order()?;
        Some((0..q).filter_map(|i| self.element_at(i)).collect())
    }

    /// All nonzero elements in residue order, `None` for `Q`.
    pub fn nonzero_elements(&self) -> Option<Vec<Scalar>> {
        let q = self.order()?;
        Some((1..q).filter_map(|i| self.element_at(i)).collect())
    }

    /// Parse a scalar literal: an integer or `a/b`.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::InvalidField(format!("cannot parse scalar `{s}`"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                self.from_ratio(n, d)
            }
            None => Ok(self.from_i64(s.parse().map_err(|_| bad())?)),
        }
    }

    pub fn square_classes(&self) -> SquareClassGroup {
        match self {
            Field::Prime(p) => {
                let non_residue = (2..*p)
                    .find(|&a| pow_mod(a, (p - 1) / 2, *p) != 1)
                    .expect("odd prime has a quadratic non-residue");
                SquareClassGroup {
                    field: *self,
                    count: SquareClassCount::Finite(2),
                    representatives: Some(vec![self.one(), self.from_i64(non_residue as i64)]),
                }
            }
            Field::Rationals => SquareClassGroup {
                field: *self,
                count: SquareClassCount::Infinite,
                representatives: None,
            },
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "F{p}"),
            Field::Rationals => write!(f, "Q"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Field> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(Field::Rationals);
        }
        let p: u64 = s
            .trim_start_matches(['F', 'f'])
            .parse()
            .map_err(|_| Error::InvalidField(format!("expected an odd prime or Q, got `{s}`")))?;
        Field::prime(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Residue(u64),
    Ratio(BigRational),
}

/// An exact field element in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    field: Field,
    repr: Repr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Scalar {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Residue(r) => *r == 0,
            Repr::Ratio(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Residue(r) => *r == 1,
            Repr::Ratio(q) => q.is_one(),
        }
    }

    /// The residue in `[0, p-1]`, for prime-field scalars.
    pub fn residue(&self) -> Option<u64> {
        match self.repr {
            Repr::Residue(r) => Some(r),
            Repr::Ratio(_) => None,
        }
    }

    fn check_field(&self, other: &Scalar) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.field.to_string(), other.field.to_string()))
        }
    }

    pub fn arith(&self, rhs: &Scalar, op: ArithOp) -> Result<Scalar> {
        self.check_field(rhs)?;
        Ok(match op {
            ArithOp::Add => self + rhs,
            ArithOp::Sub => self - rhs,
            ArithOp::Mul => self * rhs,
            ArithOp::Div => return self.checked_div(rhs),
        })
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let repr = match (&self.repr, self.field) {
            (Repr::Residue(r), Field::Prime(p)) => Repr::Residue(pow_mod(*r, p - 2, p)),
            (Repr::Ratio(q), _) => Repr::Ratio(q.recip()),
            _ => unreachable!("representation always matches field"),
        };
        Ok(Scalar { field: self.field, repr })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        self.check_field(rhs)?;
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, mut exp: u64) -> Scalar {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// Whether this nonzero scalar lies in the trivial square class.
    pub fn is_square(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(match (&self.repr, self.field) {
            (Repr::Residue(r), Field::Prime(p)) => pow_mod(*r, (p - 1) / 2, p) == 1,
            (Repr::Ratio(q), _) => {
                let perfect = |n: &BigInt| {
                    let s = n.sqrt();
                    &s * &s == *n
                };
                q.is_positive() && perfect(q.numer()) && perfect(q.denom())
            }
            _ => unreachable!("representation always matches field"),
        })
    }

    /// Re-reduce the representative. Values are always stored canonically,
    /// so this is the identity on well-formed scalars.
    pub fn canonical(&self) -> Scalar {
        let repr = match (&self.repr, self.field) {
            (Repr::Residue(r), Field::Prime(p)) => Repr::Residue(r % p),
            (Repr::Ratio(q), _) => Repr::Ratio(BigRational::new(q.numer().clone(), q.denom().clone())),
            _ => unreachable!("representation always matches field"),
        };
        Scalar { field: self.field, repr }
    }
}

fn combine(a: &Scalar, b: &Scalar, op: ArithOp) -> Scalar {
    assert_eq!(a.field, b.field, "scalar field mismatch");
    let repr = match (&a.repr, &b.repr, a.field) {
        (Repr::Residue(x), Repr::Residue(y), Field::Prime(p)) => Repr::Residue(match op {
            ArithOp::Add => (x + y) % p,
            ArithOp::Sub => (x + p - y) % p,
            ArithOp::Mul => ((*x as u128 * *y as u128) % p as u128) as u64,
            ArithOp::Div => unreachable!(),
        }),
        (Repr::Ratio(x), Repr::Ratio(y), _) => Repr::Ratio(match op {
            ArithOp::Add => x + y,
            ArithOp::Sub => x - y,
            ArithOp::Mul => x * y,
            ArithOp::Div => unreachable!(),
        }),
        _ => unreachable!("representation always matches field"),
    };
    Scalar { field: a.field, repr }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        combine(self, rhs, ArithOp::Add)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        combine(self, rhs, ArithOp::Sub)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        combine(self, rhs, ArithOp::Mul)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        &self.field.zero() - self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Residue(r) => write!(f, "{r}"),
            Repr::Ratio(q) => write!(f, "{q}"),
        }
    }
}

/// `|S_K|`, the order of `K*/(K*)^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareClassCount {
    Finite(u64),
    Infinite,
}

impl fmt::Display for SquareClassCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SquareClassCount::Finite(n) => write!(f, "{n}"),
            SquareClassCount::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareClassGroup {
    pub field: Field,
    pub count: SquareClassCount,
    /// One representative per class; absent for `Q`.
    pub representatives: Option<Vec<Scalar>>,
}

pub fn square_class_count(field: Field) -> SquareClassCount {
    field.square_classes().count
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    #[test]
    fn arith_examples() {
        let f3 = f(3);
        assert_eq!(f3.from_i64(2).arith(&f3.from_i64(2), ArithOp::Mul).unwrap(), f3.one());
        let f5 = f(5);
        assert!(f5.from_i64(2).arith(&f5.from_i64(3), ArithOp::Add).unwrap().is_zero());
        let q = Field::Rationals;
        let a = q.from_ratio(2, 3).unwrap();
        let b = q.from_ratio(3, 4).unwrap();
        assert_eq!(a.arith(&b, ArithOp::Mul).unwrap(), q.from_ratio(1, 2).unwrap());
        assert_eq!(q.from_ratio(6, -8).unwrap().to_string(), "-3/4");
    }

    #[test]
    fn arith_errors() {
        let f5 = f(5);
        assert_eq!(f5.one().arith(&f5.zero(), ArithOp::Div), Err(Error::DivisionByZero));
        assert!(matches!(
            f5.one().arith(&f(3).one(), ArithOp::Add),
            Err(Error::FieldMismatch(..))
        ));
        assert!(Field::prime(2).is_err());
        assert!(Field::prime(9).is_err());
        assert!(matches!(Field::prime(1009), Err(Error::BoundExceeded { .. })));
        assert!(Field::prime_capped(1009, 2000).is_ok());
    }

    #[test]
    fn square_examples() {
        let f5 = f(5);
        assert!(f5.from_i64(4).is_square().unwrap());
        assert!(!f5.from_i64(2).is_square().unwrap());
        assert!(!f(3).from_i64(2).is_square().unwrap());
        assert_eq!(f5.zero().is_square(), Err(Error::ZeroInput));
        let q = Field::Rationals;
        assert!(q.from_ratio(4, 9).unwrap().is_square().unwrap());
        assert!(!q.from_ratio(-4, 9).unwrap().is_square().unwrap());
        assert!(!q.from_ratio(2, 1).unwrap().is_square().unwrap());
    }

    #[test]
    fn square_class_counts() {
        assert_eq!(square_class_count(f(3)), SquareClassCount::Finite(2));
        assert_eq!(square_class_count(f(7)), SquareClassCount::Finite(2));
        assert_eq!(square_class_count(Field::Rationals), SquareClassCount::Infinite);
        assert!(Field::Rationals.square_classes().representatives.is_none());
    }

    #[test]
    fn squares_exhaustive_up_to_101() {
        for p in (3..=101u64).filter(|&p| is_prime(p)) {
            let field = f(p);
            let nonzero = field.nonzero_elements().unwrap();
            let squares: std::collections::HashSet<Scalar> =
                nonzero.iter().map(|b| b * b).collect();
            assert_eq!(squares.len() as u64, (p - 1) / 2);
            for a in &nonzero {
                assert_eq!(a.is_square().unwrap(), squares.contains(a), "p={p} a={a}");
            }
            for a in &nonzero {
                for b in &nonzero {
                    let lhs = (a * b).is_square().unwrap();
                    assert_eq!(lhs, a.is_square().unwrap() == b.is_square().unwrap());
                }
            }
            // The listed representatives hit both classes.
            let reps = field.square_classes().representatives.unwrap();
            assert!(reps[0].is_square().unwrap());
            assert!(!reps[1].is_square().unwrap());
        }
    }

    proptest! {
        #[test]
        fn canonical_is_idempotent(n in -1000i64..1000, d in 1i64..1000, p_idx in 0usize..4) {
            let fields = [Field::Rationals, f(3), f(5), f(97)];
            let field = fields[p_idx];
            if let Ok(x) = field.from_ratio(n, d) {
                prop_assert_eq!(x.canonical(), x.clone());
                prop_assert_eq!(x.canonical().canonical(), x.canonical());
            }
        }

        #[test]
        fn inverse_round_trip(n in 1i64..10_000, p_idx in 0usize..3) {
            let field = [f(3), f(101), Field::Rationals][p_idx];
            let x = field.from_i64(n);
            if !x.is_zero() {
                prop_assert!((&x * &x.inv().unwrap()).is_one());
            }
        }
    }
}
