//! The supported field families and a runtime-tagged element type.
//!
//! `FieldDescriptor` names one of four families: `Q`, `GF(p)`, `K(t)` with
//! `K = Q` or `GF(p)`, and `Q(sqrt(d))`. `FieldElement` carries one value
//! of any of them in canonical form, so `==` and `Hash` are exact.

pub mod absval;
pub mod interval;
pub mod logvalue;
pub mod parse;
pub mod prime;
pub mod quadratic;
pub mod ratfunc;
pub mod rational;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, is_squarefree};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{Field, Rational, RootOfUnityTest};

pub use prime::Fp;
pub use quadratic::QuadSurd;
pub use ratfunc::{BaseDescriptor, BaseField, FnCtx, RatFunc};

/// Which field a value lives in.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FieldDescriptor {
    Rationals,
    PrimeField(u64),
    FunctionField { base: BaseDescriptor, var: Arc<str> },
    RealQuadratic(u64),
}

impl FieldDescriptor {
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidDescriptor(format!("{p} is not prime")));
        }
        Ok(FieldDescriptor::PrimeField(p))
    }

    pub fn function_field(base: BaseDescriptor, var: &str) -> Result<Self> {
        if let BaseDescriptor::Prime(p) = base {
            if !is_prime(p) {
                return Err(Error::InvalidDescriptor(format!("{p} is not prime")));
            }
        }
        if var.is_empty() || !var.chars().all(|c| c.is_ascii_alphabetic()) || var == "sqrt" {
            return Err(Error::InvalidDescriptor(format!("bad variable name {var:?}")));
        }
        Ok(FieldDescriptor::FunctionField { base, var: Arc::from(var) })
    }

    pub fn real_quadratic(d: u64) -> Result<Self> {
        if d <= 1 || !is_squarefree(d) {
            return Err(Error::InvalidDescriptor(format!("{d} is not a squarefree integer > 1")));
        }
        Ok(FieldDescriptor::RealQuadratic(d))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldDescriptor::Rationals | FieldDescriptor::RealQuadratic(_) => 0,
            FieldDescriptor::PrimeField(p) => *p,
            FieldDescriptor::FunctionField { base: BaseDescriptor::Rationals, .. } => 0,
            FieldDescriptor::FunctionField { base: BaseDescriptor::Prime(p), .. } => *p,
        }
    }

    /// The transcendental of a function field.
    pub fn variable(&self) -> Option<FieldElement> {
        match self {
            FieldDescriptor::FunctionField { base: BaseDescriptor::Rationals, var } => {
                Some(FieldElement::RationalFunction(RatFunc::variable(&(), var.clone())))
            }
            FieldDescriptor::FunctionField { base: BaseDescriptor::Prime(p), var } => {
                Some(FieldElement::PrimeFunction(RatFunc::variable(p, var.clone())))
            }
            _ => None,
        }
    }

    /// `sqrt(d)` in a real quadratic field.
    pub fn sqrt_d(&self) -> Option<FieldElement> {
        match self {
            FieldDescriptor::RealQuadratic(d) => Some(FieldElement::Quadratic(QuadSurd::root(*d))),
            _ => None,
        }
    }

    pub fn parse_element(&self, text: &str) -> Result<FieldElement> {
        parse::parse_element(self, text)
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rationals => f.write_str("Q"),
            FieldDescriptor::PrimeField(p) => write!(f, "GF({p})"),
            FieldDescriptor::FunctionField { base: BaseDescriptor::Rationals, var } => write!(f, "Q({var})"),
            FieldDescriptor::FunctionField { base: BaseDescriptor::Prime(p), var } => write!(f, "GF({p})({var})"),
            FieldDescriptor::RealQuadratic(d) => write!(f, "Q(sqrt({d}))"),
        }
    }
}

impl FromStr for FieldDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidDescriptor(format!("unrecognised field {s:?}"));
        let int = |x: &str| x.parse::<u64>().map_err(|_| bad());
        if s == "Q" {
            return Ok(FieldDescriptor::Rationals);
        }
        if let Some(inner) = s.strip_prefix("Q(sqrt(").and_then(|r| r.strip_suffix("))")) {
            return FieldDescriptor::real_quadratic(int(inner)?);
        }
        if let Some(var) = s.strip_prefix("Q(").and_then(|r| r.strip_suffix(')')) {
            return FieldDescriptor::function_field(BaseDescriptor::Rationals, var);
        }
        if let Some(rest) = s.strip_prefix("GF(") {
            let close = rest.find(')').ok_or_else(bad)?;
            let p = int(&rest[..close])?;
            let tail = &rest[close + 1..];
            if tail.is_empty() {
                return FieldDescriptor::prime(p);
            }
            let var = tail.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
            return FieldDescriptor::function_field(BaseDescriptor::Prime(p), var);
        }
        Err(bad())
    }
}

impl TryFrom<String> for FieldDescriptor {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FieldDescriptor> for String {
    fn from(d: FieldDescriptor) -> String {
        d.to_string()
    }
}

/// An element of any supported field.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum FieldElement {
    Rational(Rational),
    Prime(Fp),
    RationalFunction(RatFunc<Rational>),
    PrimeFunction(RatFunc<Fp>),
    Quadratic(QuadSurd),
}

macro_rules! binop {
    ($self:ident, $rhs:ident, $op:ident) => {
        match ($self, $rhs) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(Field::$op(a, b)),
            (FieldElement::Prime(a), FieldElement::Prime(b)) => FieldElement::Prime(a.$op(b)),
            (FieldElement::RationalFunction(a), FieldElement::RationalFunction(b)) => {
                FieldElement::RationalFunction(a.$op(b))
            }
            (FieldElement::PrimeFunction(a), FieldElement::PrimeFunction(b)) => FieldElement::PrimeFunction(a.$op(b)),
            (FieldElement::Quadratic(a), FieldElement::Quadratic(b)) => FieldElement::Quadratic(a.$op(b)),
            (a, b) => panic!("field mismatch: {} vs {}", a.descriptor(), b.descriptor()),
        }
    };
}

impl FieldElement {
    pub fn descriptor(&self) -> FieldDescriptor {
        Field::ctx(self)
    }

    pub fn rational(n: i64, d: i64) -> Self {
        FieldElement::Rational(Rational::new(n.into(), d.into()))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            FieldElement::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_quadratic(&self) -> Option<&QuadSurd> {
        match self {
            FieldElement::Quadratic(q) => Some(q),
            _ => None,
        }
    }

    /// Checks that this element lives in `desc`.
    pub fn expect_field(&self, desc: &FieldDescriptor) -> Result<()> {
        let own = self.descriptor();
        if own != *desc {
            return Err(Error::FieldMismatch { expected: desc.to_string(), found: own.to_string() });
        }
        Ok(())
    }

    /// Converts a rational into `desc` (reducing modulo `p` where needed).
    pub fn from_rational(desc: &FieldDescriptor, q: &Rational) -> Result<Self> {
        let n = FieldElement::from_bigint(desc, q.numer());
        let d = FieldElement::from_bigint(desc, q.denom());
        n.div(&d).ok_or(Error::ZeroDenominator)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(q) => write!(f, "{q}"),
            FieldElement::Prime(x) => write!(f, "{x}"),
            FieldElement::RationalFunction(x) => write!(f, "{x}"),
            FieldElement::PrimeFunction(x) => write!(f, "{x}"),
            FieldElement::Quadratic(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for FieldElement {
    fn serialize<Se: serde::Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn poly_into<S: Field>(p: &Poly<FieldElement>, ctx: &S::Ctx, f: impl Fn(&FieldElement) -> Option<S>) -> Poly<S> {
    p.map(ctx, |c| f(c).expect("coefficients share the polynomial's field"))
}

impl Field for FieldElement {
    type Ctx = FieldDescriptor;

    fn ctx(&self) -> FieldDescriptor {
        match self {
            FieldElement::Rational(_) => FieldDescriptor::Rationals,
            FieldElement::Prime(x) => FieldDescriptor::PrimeField(x.modulus()),
            FieldElement::RationalFunction(x) => {
                FieldDescriptor::FunctionField { base: BaseDescriptor::Rationals, var: x.var().clone() }
            }
            FieldElement::PrimeFunction(x) => FieldDescriptor::FunctionField {
                base: BaseDescriptor::Prime(x.num().ctx().to_owned()),
                var: x.var().clone(),
            },
            FieldElement::Quadratic(x) => FieldDescriptor::RealQuadratic(x.d()),
        }
    }

    fn zero_in(desc: &FieldDescriptor) -> Self {
        FieldElement::from_i64(desc, 0)
    }
    fn one_in(desc: &FieldDescriptor) -> Self {
        FieldElement::from_i64(desc, 1)
    }
    fn from_i64(desc: &FieldDescriptor, n: i64) -> Self {
        FieldElement::from_bigint(desc, &BigInt::from(n))
    }
    fn from_bigint(desc: &FieldDescriptor, n: &BigInt) -> Self {
        match desc {
            FieldDescriptor::Rationals => FieldElement::Rational(Rational::from_integer(n.clone())),
            FieldDescriptor::PrimeField(p) => FieldElement::Prime(Fp::from_bigint(p, n)),
            FieldDescriptor::FunctionField { base: BaseDescriptor::Rationals, var } => {
                FieldElement::RationalFunction(RatFunc::from_bigint(&FnCtx { base: (), var: var.clone() }, n))
            }
            FieldDescriptor::FunctionField { base: BaseDescriptor::Prime(p), var } => {
                FieldElement::PrimeFunction(RatFunc::from_bigint(&FnCtx { base: *p, var: var.clone() }, n))
            }
            FieldDescriptor::RealQuadratic(d) => FieldElement::Quadratic(QuadSurd::from_bigint(d, n)),
        }
    }
    fn characteristic(desc: &FieldDescriptor) -> u64 {
        desc.characteristic()
    }
    fn vanishes(&self) -> bool {
        match self {
            FieldElement::Rational(q) => Zero::is_zero(q),
            FieldElement::Prime(x) => x.vanishes(),
            FieldElement::RationalFunction(x) => x.vanishes(),
            FieldElement::PrimeFunction(x) => x.vanishes(),
            FieldElement::Quadratic(x) => x.vanishes(),
        }
    }
    fn is_unity(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_unity(),
            FieldElement::Prime(x) => x.is_unity(),
            FieldElement::RationalFunction(x) => x.is_unity(),
            FieldElement::PrimeFunction(x) => x.is_unity(),
            FieldElement::Quadratic(x) => x.is_unity(),
        }
    }
    fn add(&self, rhs: &Self) -> Self {
        binop!(self, rhs, add)
    }
    fn sub(&self, rhs: &Self) -> Self {
        binop!(self, rhs, sub)
    }
    fn mul(&self, rhs: &Self) -> Self {
        binop!(self, rhs, mul)
    }
    fn neg(&self) -> Self {
        match self {
            FieldElement::Rational(q) => FieldElement::Rational(-q),
            FieldElement::Prime(x) => FieldElement::Prime(x.neg()),
            FieldElement::RationalFunction(x) => FieldElement::RationalFunction(x.neg()),
            FieldElement::PrimeFunction(x) => FieldElement::PrimeFunction(x.neg()),
            FieldElement::Quadratic(x) => FieldElement::Quadratic(x.neg()),
        }
    }
    fn inv(&self) -> Option<Self> {
        Some(match self {
            FieldElement::Rational(q) => FieldElement::Rational(Field::inv(q)?),
            FieldElement::Prime(x) => FieldElement::Prime(x.inv()?),
            FieldElement::RationalFunction(x) => FieldElement::RationalFunction(x.inv()?),
            FieldElement::PrimeFunction(x) => FieldElement::PrimeFunction(x.inv()?),
            FieldElement::Quadratic(x) => FieldElement::Quadratic(x.inv()?),
        })
    }

    fn roots(poly: &Poly<Self>) -> Result<Vec<Self>> {
        let desc = poly.ctx().clone();
        Ok(match &desc {
            FieldDescriptor::Rationals => {
                let p = poly_into(poly, &(), |c| c.as_rational().cloned());
                Rational::roots(&p)?.into_iter().map(FieldElement::Rational).collect()
            }
            FieldDescriptor::PrimeField(m) => {
                let p = poly_into(poly, m, |c| match c {
                    FieldElement::Prime(x) => Some(*x),
                    _ => None,
                });
                Fp::roots(&p)?.into_iter().map(FieldElement::Prime).collect()
            }
            FieldDescriptor::FunctionField { base: BaseDescriptor::Rationals, var } => {
                let ctx = FnCtx { base: (), var: var.clone() };
                let p = poly_into(poly, &ctx, |c| match c {
                    FieldElement::RationalFunction(x) => Some(x.clone()),
                    _ => None,
                });
                RatFunc::roots(&p)?.into_iter().map(FieldElement::RationalFunction).collect()
            }
            FieldDescriptor::FunctionField { base: BaseDescriptor::Prime(m), var } => {
                let ctx = FnCtx { base: *m, var: var.clone() };
                let p = poly_into(poly, &ctx, |c| match c {
                    FieldElement::PrimeFunction(x) => Some(x.clone()),
                    _ => None,
                });
                RatFunc::roots(&p)?.into_iter().map(FieldElement::PrimeFunction).collect()
            }
            FieldDescriptor::RealQuadratic(d) => {
                let p = poly_into(poly, d, |c| c.as_quadratic().cloned());
                QuadSurd::roots(&p)?.into_iter().map(FieldElement::Quadratic).collect()
            }
        })
    }

    fn root_of_unity_test(poly: &Poly<Self>) -> RootOfUnityTest {
        match poly.ctx().clone() {
            FieldDescriptor::Rationals => {
                Rational::root_of_unity_test(&poly_into(poly, &(), |c| c.as_rational().cloned()))
            }
            FieldDescriptor::PrimeField(m) => Fp::root_of_unity_test(&poly_into(poly, &m, |c| match c {
                FieldElement::Prime(x) => Some(*x),
                _ => None,
            })),
            FieldDescriptor::FunctionField { base: BaseDescriptor::Rationals, var } => {
                RatFunc::root_of_unity_test(&poly_into(poly, &FnCtx { base: (), var }, |c| match c {
                    FieldElement::RationalFunction(x) => Some(x.clone()),
                    _ => None,
                }))
            }
            FieldDescriptor::FunctionField { base: BaseDescriptor::Prime(m), var } => {
                RatFunc::root_of_unity_test(&poly_into(poly, &FnCtx { base: m, var }, |c| match c {
                    FieldElement::PrimeFunction(x) => Some(x.clone()),
                    _ => None,
                }))
            }
            FieldDescriptor::RealQuadratic(d) => {
                QuadSurd::root_of_unity_test(&poly_into(poly, &d, |c| c.as_quadratic().cloned()))
            }
        }
    }
}

/// Lifts a rational polynomial into any characteristic-zero descriptor, or
/// reduces it modulo `p`.
pub fn lift_rational_poly(p: &Poly<Rational>, desc: &FieldDescriptor) -> Result<Poly<FieldElement>> {
    p.try_map(desc, |c| FieldElement::from_rational(desc, c))
}

/// An element as supplied by a caller, before canonicalisation.
#[derive(Clone, Debug, PartialEq)]
pub enum RawElement {
    /// `num / den`.
    Fraction { num: BigInt, den: BigInt },
    /// A residue modulo the field's prime; any integer is accepted.
    Residue(BigInt),
    /// Ascending rational coefficient lists of numerator and denominator.
    Function { num: Vec<Rational>, den: Vec<Rational> },
    /// `(a + b*sqrt(d)) / den`.
    Quadratic { a: Rational, b: Rational, den: Rational },
    /// Text in the string format used for serialisation.
    Text(String),
}

/// Brings a raw element into canonical form in `desc`.
pub fn normalize(desc: &FieldDescriptor, raw: &RawElement) -> Result<FieldElement> {
    let mismatch = || Error::InvalidParameter(format!("raw element does not fit field {desc}"));
    match (desc, raw) {
        (_, RawElement::Text(s)) => parse::parse_element(desc, s),
        (FieldDescriptor::PrimeField(_), RawElement::Residue(n)) => Ok(FieldElement::from_bigint(desc, n)),
        (FieldDescriptor::FunctionField { .. }, RawElement::Function { num, den }) => {
            let t = desc.variable().expect("function field");
            let eval = |cs: &[Rational]| -> Result<FieldElement> {
                cs.iter().rev().try_fold(FieldElement::zero_in(desc), |acc, c| {
                    Ok(acc.mul(&t).add(&FieldElement::from_rational(desc, c)?))
                })
            };
            let n = eval(num)?;
            let d = eval(den)?;
            n.div(&d).ok_or(Error::ZeroDenominator)
        }
        (FieldDescriptor::RealQuadratic(d), RawElement::Quadratic { a, b, den }) => {
            if Zero::is_zero(den) {
                return Err(Error::ZeroDenominator);
            }
            Ok(FieldElement::Quadratic(QuadSurd::new(*d, a / den, b / den)))
        }
        (_, RawElement::Fraction { num, den }) => {
            if den.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            let n = FieldElement::from_bigint(desc, num);
            let dd = FieldElement::from_bigint(desc, den);
            n.div(&dd).ok_or(Error::ZeroDenominator)
        }
        _ => Err(mismatch()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_round_trip() {
        for s in ["Q", "GF(7)", "Q(t)", "GF(2)(t)", "Q(sqrt(5))"] {
            let d: FieldDescriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("GF(8)".parse::<FieldDescriptor>().is_err());
        assert!("Q(sqrt(4))".parse::<FieldDescriptor>().is_err());
        assert!("Q(sqrt(1))".parse::<FieldDescriptor>().is_err());
    }

    #[test]
    fn normalize_examples() {
        let q = normalize(
            &FieldDescriptor::Rationals,
            &RawElement::Fraction { num: 6.into(), den: (-4).into() },
        )
        .unwrap();
        assert_eq!(q, FieldElement::rational(-3, 2));

        let f2t: FieldDescriptor = "GF(2)(t)".parse().unwrap();
        let r = |n| Rational::from_integer(BigInt::from(n));
        let x = normalize(&f2t, &RawElement::Function { num: vec![r(0), r(1), r(1)], den: vec![r(0), r(1)] })
            .unwrap();
        assert_eq!(x.to_string(), "t + 1");

        let q5 = FieldDescriptor::real_quadratic(5).unwrap();
        let y = normalize(&q5, &RawElement::Quadratic { a: r(2), b: r(2), den: r(2) }).unwrap();
        assert_eq!(y, FieldElement::Quadratic(QuadSurd::new(5, r(1), r(1))));

        assert!(matches!(
            normalize(&FieldDescriptor::Rationals, &RawElement::Fraction { num: 1.into(), den: 0.into() }),
            Err(Error::ZeroDenominator)
        ));
    }
}
