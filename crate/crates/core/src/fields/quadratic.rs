//! Real quadratic fields `Q(sqrt(d))` with `d > 1` squarefree.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fields::rational::{rational_roots, rational_sqrt};
use crate::poly::{deflate, Poly};
use crate::scalar::{Field, Rational, RootOfUnityTest};

/// `a + b*sqrt(d)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadSurd {
    d: u64,
    a: Rational,
    b: Rational,
}

impl QuadSurd {
    pub fn new(d: u64, a: Rational, b: Rational) -> Self {
        QuadSurd { d, a, b }
    }

    pub fn rational(d: u64, a: Rational) -> Self {
        QuadSurd { d, a, b: Rational::zero() }
    }

    /// `sqrt(d)` itself.
    pub fn root(d: u64) -> Self {
        QuadSurd { d, a: Rational::zero(), b: Rational::one() }
    }

    pub fn d(&self) -> u64 {
        self.d
    }
    pub fn a(&self) -> &Rational {
        &self.a
    }
    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The Galois conjugate `a - b*sqrt(d)`.
    pub fn conjugate(&self) -> Self {
        QuadSurd { d: self.d, a: self.a.clone(), b: -&self.b }
    }

    /// Field norm `a^2 - d b^2`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - Rational::from_integer(BigInt::from(self.d)) * &self.b * &self.b
    }

    pub fn trace(&self) -> Rational {
        &self.a * Rational::from_integer(BigInt::from(2))
    }

    /// Sign of the real number `a + s*b*sqrt(d)` where `s = +1` for the
    /// identity embedding and `-1` for the conjugate one.
    pub fn embedded_sign(&self, positive: bool) -> Ordering {
        let b = if positive { self.b.clone() } else { -&self.b };
        let sa = self.a.cmp(&Rational::zero());
        let sb = b.cmp(&Rational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2d = &b * &b * Rational::from_integer(BigInt::from(self.d));
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// Compares `|sigma(self)|` with `|sigma(other)|` exactly, for the
    /// embedding selected by `positive`.
    pub fn cmp_abs_embedded(&self, other: &Self, positive: bool) -> Ordering {
        let x = self.abs_embedded(positive);
        let y = other.abs_embedded(positive);
        x.sub(&y).embedded_sign(positive)
    }

    /// The element whose image under the chosen embedding is
    /// `|sigma(self)|`.
    pub fn abs_embedded(&self, positive: bool) -> Self {
        if self.embedded_sign(positive) == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Square root inside the field, when it exists.
    pub fn sqrt(&self) -> Option<Self> {
        let d = Rational::from_integer(BigInt::from(self.d));
        if self.b.is_zero() {
            if let Some(r) = rational_sqrt(&self.a) {
                return Some(QuadSurd::rational(self.d, r));
            }
            return rational_sqrt(&(&self.a / &d)).map(|r| QuadSurd::new(self.d, Rational::zero(), r));
        }
        // (x + y sqrt d)^2 = x^2 + d y^2 + 2xy sqrt d
        let n = rational_sqrt(&self.norm())?;
        let two = Rational::from_integer(BigInt::from(2));
        for cand in [(&self.a + &n) / &two, (&self.a - &n) / &two] {
            if let Some(x) = rational_sqrt(&cand) {
                if x.is_zero() {
                    continue;
                }
                let y = &self.b / (&two * &x);
                return Some(QuadSurd::new(self.d, x, y));
            }
        }
        None
    }

    fn from_rational_poly(d: u64, p: &Poly<Rational>) -> Poly<QuadSurd> {
        p.map(&d, |c| QuadSurd::rational(d, c.clone()))
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let surd = |b: &Rational| {
            if b.is_one() {
                format!("sqrt({})", self.d)
            } else {
                format!("{b}*sqrt({})", self.d)
            }
        };
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => {
                if self.b.is_negative() {
                    write!(f, "-{}", surd(&-&self.b))
                } else {
                    f.write_str(&surd(&self.b))
                }
            }
            (false, false) => {
                if self.b.is_negative() {
                    write!(f, "{} - {}", self.a, surd(&-&self.b))
                } else {
                    write!(f, "{} + {}", self.a, surd(&self.b))
                }
            }
        }
    }
}

impl Field for QuadSurd {
    type Ctx = u64;

    fn ctx(&self) -> u64 {
        self.d
    }
    fn zero_in(d: &u64) -> Self {
        QuadSurd::rational(*d, Rational::zero())
    }
    fn one_in(d: &u64) -> Self {
        QuadSurd::rational(*d, Rational::one())
    }
    fn from_i64(d: &u64, n: i64) -> Self {
        QuadSurd::rational(*d, Rational::from_integer(BigInt::from(n)))
    }
    fn from_bigint(d: &u64, n: &BigInt) -> Self {
        QuadSurd::rational(*d, Rational::from_integer(n.clone()))
    }
    fn characteristic(_: &u64) -> u64 {
        0
    }
    fn vanishes(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn is_unity(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.d, rhs.d);
        QuadSurd { d: self.d, a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
    fn sub(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.d, rhs.d);
        QuadSurd { d: self.d, a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
    fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.d, rhs.d);
        if self.b.is_zero() && rhs.b.is_zero() {
            return QuadSurd::rational(self.d, &self.a * &rhs.a);
        }
        let d = BigRational::from_integer(BigInt::from(self.d));
        QuadSurd {
            d: self.d,
            a: &self.a * &rhs.a + d * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
    fn neg(&self) -> Self {
        QuadSurd { d: self.d, a: -&self.a, b: -&self.b }
    }
    fn inv(&self) -> Option<Self> {
        if self.vanishes() {
            return None;
        }
        let n = self.norm();
        Some(QuadSurd { d: self.d, a: &self.a / &n, b: -&self.b / &n })
    }

    /// Rational roots of the norm polynomial, then the quadratic formula on
    /// whatever degree-two cofactor remains.
    fn roots(poly: &Poly<Self>) -> Result<Vec<Self>> {
        if poly.is_zero() {
            return Err(Error::InvalidParameter("roots of the zero polynomial".into()));
        }
        let d = *poly.ctx();
        let mut found: Vec<QuadSurd> = Vec::new();
        let norm = norm_poly(poly);
        for r in rational_roots(&norm)? {
            let cand = QuadSurd::rational(d, r);
            if poly.eval(&cand).vanishes() {
                found.push(cand);
            }
        }
        let (_, rest) = deflate(poly, &found);
        match rest.degree() {
            Some(1) => {
                let root = rest.coeff(0).neg().div(&rest.coeff(1)).expect("nonzero leading");
                found.push(root);
            }
            Some(2) => {
                let (c0, c1, c2) = (rest.coeff(0), rest.coeff(1), rest.coeff(2));
                let disc = c1.mul(&c1).sub(&QuadSurd::from_i64(&d, 4).mul(&c2).mul(&c0));
                if let Some(s) = disc.sqrt() {
                    let two_a = QuadSurd::from_i64(&d, 2).mul(&c2);
                    for root in [c1.neg().add(&s), c1.neg().sub(&s)] {
                        found.push(root.div(&two_a).expect("nonzero leading"));
                    }
                }
            }
            _ => {}
        }
        found.dedup();
        let mut distinct: Vec<QuadSurd> = Vec::new();
        for r in found {
            if !distinct.contains(&r) && poly.eval(&r).vanishes() {
                distinct.push(r);
            }
        }
        Ok(distinct)
    }

    fn root_of_unity_test(poly: &Poly<Self>) -> RootOfUnityTest {
        RootOfUnityTest::Rational(norm_poly(poly))
    }
}

/// The fundamental unit `e > 1` of the ring of integers, or, if the short
/// search for half-integral units fails, of `Z[sqrt(d)]`. `None` when the
/// continued fraction search exceeds its step budget.
pub fn fundamental_unit(d: u64) -> Option<QuadSurd> {
    let big_d = BigInt::from(d);
    if d % 4 == 1 {
        for v in 1u64..=10_000 {
            let dv2 = &big_d * BigInt::from(v) * BigInt::from(v);
            for s in [-4i64, 4] {
                let n: BigInt = &dv2 + s;
                if n.sign() != num_bigint::Sign::Plus {
                    continue;
                }
                let u = n.sqrt();
                if &u * &u == n {
                    let half = Rational::new(1.into(), 2.into());
                    return Some(QuadSurd::new(
                        d,
                        Rational::from_integer(u) * &half,
                        Rational::from_integer(BigInt::from(v)) * half,
                    ));
                }
            }
        }
    }
    // continued fraction of sqrt(d): convergents h/k hit h^2 - d k^2 = +-1
    let a0 = big_d.sqrt();
    let (mut m, mut den, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    let (mut h_prev, mut h) = (BigInt::one(), a0.clone());
    let (mut k_prev, mut k) = (BigInt::zero(), BigInt::one());
    for _ in 0..100_000 {
        let norm = &h * &h - &big_d * &k * &k;
        if norm == BigInt::one() || norm == -BigInt::one() {
            return Some(QuadSurd::new(d, Rational::from_integer(h), Rational::from_integer(k)));
        }
        m = &den * &a - &m;
        den = (&big_d - &m * &m) / &den;
        a = (&a0 + &m) / &den;
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
    }
    None
}

/// `p * conj(p)`, a polynomial with rational coefficients whose roots are the
/// roots of `p` together with their Galois conjugates.
pub fn norm_poly(p: &Poly<QuadSurd>) -> Poly<Rational> {
    let d = *p.ctx();
    let conj = p.map(&d, QuadSurd::conjugate);
    let prod = p.mul(&conj);
    prod.map(&(), |c| {
        debug_assert!(c.b.is_zero());
        c.a.clone()
    })
}

/// Embeds a rational polynomial into `Q(sqrt(d))[x]`.
pub fn lift_rational_poly(d: u64, p: &Poly<Rational>) -> Poly<QuadSurd> {
    QuadSurd::from_rational_poly(d, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn phi() -> QuadSurd {
        QuadSurd::new(5, r(1, 2), r(1, 2))
    }

    #[test]
    fn golden_ratio_identities() {
        let phi = phi();
        let one = QuadSurd::one_in(&5);
        assert_eq!(phi.mul(&phi), phi.add(&one));
        assert_eq!(phi.inv().unwrap(), phi.sub(&one));
        assert_eq!(phi.norm(), r(-1, 1));
        assert_eq!(phi.to_string(), "1/2 + 1/2*sqrt(5)");
        assert_eq!(phi.conjugate().to_string(), "1/2 - 1/2*sqrt(5)");
    }

    #[test]
    fn embedded_signs() {
        let phi = phi();
        assert_eq!(phi.embedded_sign(true), Ordering::Greater);
        assert_eq!(phi.embedded_sign(false), Ordering::Less);
        let x = QuadSurd::new(5, r(-3, 1), r(1, 1)); // -3 + 2.236 < 0
        assert_eq!(x.embedded_sign(true), Ordering::Less);
        assert_eq!(phi.cmp_abs_embedded(&QuadSurd::one_in(&5), true), Ordering::Greater);
        assert_eq!(phi.cmp_abs_embedded(&QuadSurd::one_in(&5), false), Ordering::Less);
    }

    #[test]
    fn roots_of_golden_polynomial() {
        // x^2 - x - 1
        let p = lift_rational_poly(5, &Poly::new(vec![r(-1, 1), r(-1, 1), r(1, 1)], ()));
        let roots = QuadSurd::roots(&p).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.contains(&phi()));
        assert!(roots.contains(&phi().conjugate()));
    }

    #[test]
    fn fundamental_units() {
        assert_eq!(fundamental_unit(5), Some(phi()));
        assert_eq!(fundamental_unit(2), Some(QuadSurd::new(2, r(1, 1), r(1, 1))));
        assert_eq!(fundamental_unit(3), Some(QuadSurd::new(3, r(2, 1), r(1, 1))));
        // 13: (3 + sqrt(13)) / 2
        assert_eq!(fundamental_unit(13), Some(QuadSurd::new(13, r(3, 2), r(1, 2))));
        assert_eq!(fundamental_unit(7), Some(QuadSurd::new(7, r(8, 1), r(3, 1))));
    }

    #[test]
    fn square_roots() {
        let x = QuadSurd::new(5, r(3, 2), r(1, 2)); // phi^2
        let s = x.sqrt().unwrap();
        assert_eq!(s.mul(&s), x);
        assert!(QuadSurd::rational(5, r(2, 1)).sqrt().is_none());
        assert_eq!(QuadSurd::rational(5, r(5, 1)).sqrt(), Some(QuadSurd::root(5)));
    }
}
