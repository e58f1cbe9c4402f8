//! The scalar abstraction every matrix routine is generic over.
//!
//! Exact fields need a runtime context (the prime of `GF(p)`, the `d` of
//! `Q(sqrt(d))`, the variable of a function field), so the zero and one of a
//! field are built from a context value rather than from `num_traits::Zero`.
//! Types without a context (plain rationals) use `()`.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::poly::Poly;

/// Arbitrary precision rational numbers.
pub type Rational = BigRational;

/// What is known about whether every root of a polynomial is a root of unity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootOfUnityTest {
    /// A polynomial over `Q` whose roots are exactly the Galois conjugates of
    /// the roots of the input; the exact cyclotomic criterion applies to it.
    Rational(Poly<Rational>),
    /// Some root is certainly not a root of unity.
    Never,
    /// Every root is certainly a root of unity, but no bound on the order is known.
    Always,
    /// Nothing can be decided exactly.
    Unknown,
}

/// An exact field with canonical (hashable) element representations.
pub trait Field: Clone + PartialEq + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static {
    type Ctx: Clone + PartialEq + Eq + Hash + fmt::Debug + Send + Sync;

    fn ctx(&self) -> Self::Ctx;
    fn zero_in(ctx: &Self::Ctx) -> Self;
    fn one_in(ctx: &Self::Ctx) -> Self;
    fn from_i64(ctx: &Self::Ctx, n: i64) -> Self;
    fn from_bigint(ctx: &Self::Ctx, n: &BigInt) -> Self;
    fn characteristic(ctx: &Self::Ctx) -> u64;

    fn vanishes(&self) -> bool;
    fn is_unity(&self) -> bool {
        *self == Self::one_in(&self.ctx())
    }

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one_in(&self.ctx());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Distinct roots of `poly` lying in this field.
    ///
    /// Every returned value is a verified root. Completeness is exact for
    /// `Q` and `GF(p)`; for the other families the search covers the
    /// candidates described on the implementing type.
    fn roots(poly: &Poly<Self>) -> Result<Vec<Self>>;

    /// Exact information on whether all roots of `poly` are roots of unity.
    fn root_of_unity_test(poly: &Poly<Self>) -> RootOfUnityTest;
}

impl Field for Rational {
    type Ctx = ();

    fn ctx(&self) -> Self::Ctx {}
    fn zero_in(_: &()) -> Self {
        Zero::zero()
    }
    fn one_in(_: &()) -> Self {
        One::one()
    }
    fn from_i64(_: &(), n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn from_bigint(_: &(), n: &BigInt) -> Self {
        Rational::from_integer(n.clone())
    }
    fn characteristic(_: &()) -> u64 {
        0
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unity(&self) -> bool {
        One::is_one(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn roots(poly: &Poly<Self>) -> Result<Vec<Self>> {
        crate::fields::rational::rational_roots(poly)
    }
    fn root_of_unity_test(poly: &Poly<Self>) -> RootOfUnityTest {
        RootOfUnityTest::Rational(poly.clone())
    }
}

