//! Closed rational intervals with outward dyadic rounding, and certified
//! enclosures of natural logarithms and square roots.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Rational;

/// `[lo, hi]` with `lo <= hi`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

fn pow2(bits: u64) -> BigInt {
    BigInt::one() << bits
}

fn floor_dyadic(q: &Rational, bits: u64) -> Rational {
    let scaled = q * Rational::from_integer(pow2(bits));
    Rational::new(scaled.floor().to_integer(), pow2(bits))
}

fn ceil_dyadic(q: &Rational, bits: u64) -> Rational {
    let scaled = q * Rational::from_integer(pow2(bits));
    Rational::new(scaled.ceil().to_integer(), pow2(bits))
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn point(q: Rational) -> Self {
        Interval { lo: q.clone(), hi: q }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }
    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Intersection; `None` when disjoint.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Sign of every point, when uniform.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certain ordering of every point of `self` against every point of `other`.
    pub fn compare(&self, other: &Self) -> Option<Ordering> {
        self.sub(other).sign()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Interval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Interval { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }

    pub fn neg(&self) -> Self {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if c.is_negative() {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let products = [&self.lo * &rhs.lo, &self.lo * &rhs.hi, &self.hi * &rhs.lo, &self.hi * &rhs.hi];
        let lo = products.iter().min().expect("nonempty").clone();
        let hi = products.iter().max().expect("nonempty").clone();
        Interval { lo, hi }
    }

    /// `[|x| : x in self]`.
    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            Interval { lo: Rational::zero(), hi: (-&self.lo).max(self.hi.clone()) }
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        Interval { lo: (&self.lo).max(&other.lo).clone(), hi: (&self.hi).max(&other.hi).clone() }
    }

    /// `[1/hi, 1/lo]`; `None` when the interval contains zero.
    pub fn recip(&self) -> Option<Self> {
        if self.sign().is_none_or(|s| s == Ordering::Equal) {
            return None;
        }
        Some(Interval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    /// Widens outward to endpoints with denominator `2^bits`.
    pub fn round_outward(&self, bits: u64) -> Self {
        Interval { lo: floor_dyadic(&self.lo, bits), hi: ceil_dyadic(&self.hi, bits) }
    }

    /// Midpoint as an `f64`, for display only.
    pub fn midpoint_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / Rational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{:.6e}, {:.6e}]", self.lo.to_f64().unwrap_or(f64::NAN), self.hi.to_f64().unwrap_or(f64::NAN))
        }
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Interval", 2)?;
        st.serialize_field("lo", &self.lo.to_string())?;
        st.serialize_field("hi", &self.hi.to_string())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        struct Repr {
            lo: String,
            hi: String,
        }
        let r = Repr::deserialize(d)?;
        let parse = |s: &str| s.parse::<Rational>().map_err(|_| D::Error::custom(format!("bad rational {s:?}")));
        let (lo, hi) = (parse(&r.lo)?, parse(&r.hi)?);
        if lo > hi {
            return Err(D::Error::custom("empty interval"));
        }
        Ok(Interval { lo, hi })
    }
}

fn bit_len(n: u64) -> u64 {
    64 - n.leading_zeros() as u64
}

/// `2 * atanh(z)` for rational `0 <= z < 1/2`, as fixed-point bounds with
/// `w` fractional bits: the true value lies in `[lo, hi] / 2^w`.
fn two_atanh_fixed(z: &Rational, w: u64) -> (BigInt, BigInt) {
    let scale = Rational::from_integer(pow2(w));
    let zs = z * &scale;
    let z_lo = zs.floor().to_integer();
    let z_hi = zs.ceil().to_integer();
    let z2_lo = (&z_lo * &z_lo) >> w;
    let z2_hi = (&z_hi * &z_hi + pow2(w) - 1u32) >> w;
    let (mut p_lo, mut p_hi) = (z_lo, z_hi);
    let (mut s_lo, mut s_hi) = (BigInt::zero(), BigInt::zero());
    let mut j: u64 = 0;
    loop {
        let k = BigInt::from(2 * j + 1);
        s_lo += p_lo.div_floor(&k);
        s_hi += p_hi.div_ceil(&k);
        p_lo = (&p_lo * &z2_lo) >> w;
        p_hi = (&p_hi * &z2_hi + pow2(w) - 1u32) >> w;
        j += 1;
        if p_hi <= BigInt::from(4) {
            break;
        }
    }
    // remaining terms are at most p_hi * (1 + z^2 + z^4 + ...) <= 4/3 p_hi
    s_hi += (&p_hi * 4u32).div_ceil(&BigInt::from(3)) + 1u32;
    (s_lo * 2u32, s_hi * 2u32)
}

/// Certified enclosure of `ln(q)` for rational `q > 0`, of width at most
/// `2^-prec`.
pub fn ln_rational(q: &Rational, prec: u64) -> Interval {
    assert!(q.is_positive(), "logarithm of a nonpositive number");
    if q.is_one() {
        return Interval::zero();
    }
    // q = 2^k m with m in [1, 2)
    let mut k = q.numer().bits() as i64 - q.denom().bits() as i64;
    let two = Rational::from_integer(2.into());
    let mut m = if k >= 0 {
        q / Rational::from_integer(pow2(k as u64))
    } else {
        q * Rational::from_integer(pow2((-k) as u64))
    };
    while m >= two {
        m /= &two;
        k += 1;
    }
    while m < Rational::one() {
        m *= &two;
        k -= 1;
    }
    let w = prec + 12 + bit_len(k.unsigned_abs()) + bit_len(prec);
    let z = (&m - Rational::one()) / (&m + Rational::one());
    let (m_lo, m_hi) = two_atanh_fixed(&z, w);
    let (l2_lo, l2_hi) = two_atanh_fixed(&Rational::new(1.into(), 3.into()), w);
    let (lo, hi) = if k >= 0 {
        (m_lo + &l2_lo * k, m_hi + &l2_hi * k)
    } else {
        (m_lo + &l2_hi * k, m_hi + &l2_lo * k)
    };
    Interval { lo: Rational::new(lo, pow2(w)), hi: Rational::new(hi, pow2(w)) }
}

/// Certified enclosure of `ln(x)` for every `x` in a positive interval.
pub fn ln_interval(x: &Interval, prec: u64) -> Interval {
    let lo = ln_rational(&x.lo, prec);
    let hi = ln_rational(&x.hi, prec);
    Interval { lo: lo.lo, hi: hi.hi }
}

/// Enclosure of `sqrt(n)` with endpoints in `2^-bits Z`.
pub fn sqrt_enclosure(n: &BigUint, bits: u64) -> Interval {
    let scaled = n << (2 * bits);
    let r = scaled.sqrt();
    let exact = &r * &r == scaled;
    let lo = BigInt::from(r);
    let hi = if exact { lo.clone() } else { &lo + 1u32 };
    Interval { lo: Rational::new(lo, pow2(bits)), hi: Rational::new(hi, pow2(bits)) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn ln2_contains_reference_digits() {
        // ln 2 = 0.693147180559945309417232121458...
        let ln2 = ln_rational(&q(2, 1), 80);
        let reference_lo = q(693_147_180_559_945_309, 1_000_000_000_000_000_000);
        let reference_hi = q(693_147_180_559_945_310, 1_000_000_000_000_000_000);
        assert!(ln2.overlaps(&Interval::new(reference_lo, reference_hi)));
        assert!(ln2.width() <= Rational::new(1.into(), pow2(80)));
    }

    #[test]
    fn widths_and_signs() {
        for prec in [10u64, 64, 200] {
            for (n, d) in [(3, 1), (1, 3), (5, 4), (1_000_003, 7), (2, 3)] {
                let iv = ln_rational(&q(n, d), prec);
                assert!(iv.width() <= Rational::new(1.into(), pow2(prec)));
                let expected = if n > d { Ordering::Greater } else { Ordering::Less };
                assert_eq!(iv.sign(), Some(expected));
            }
        }
        assert_eq!(ln_rational(&q(1, 1), 8), Interval::zero());
    }

    #[test]
    fn log_additivity_at_interval_level() {
        let a = ln_rational(&q(6, 1), 64);
        let b = ln_rational(&q(2, 1), 64).add(&ln_rational(&q(3, 1), 64));
        assert!(a.overlaps(&b));
    }

    #[test]
    fn sqrt_bounds() {
        let s = sqrt_enclosure(&BigUint::from(5u32), 40);
        assert!(s.mul(&s).contains(&q(5, 1)));
        assert_eq!(sqrt_enclosure(&BigUint::from(9u32), 10), Interval::point(q(3, 1)));
    }
}
