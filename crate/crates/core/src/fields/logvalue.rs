//! Exact symbolic logarithms.
//!
//! A [`LogValue`] is `q + sum c_i ln(x_i)` with rational `q`, `c_i` and
//! atoms `x_i` drawn from: primes, integers with no small prime factor,
//! fundamental units of real quadratic fields, and reduced elements of
//! those fields. Atoms are normalised so that equal real numbers built the
//! usual ways (products, inverses, conjugates, unit powers) produce equal
//! term maps; a difference whose term map is empty is exactly zero. Other
//! signs are decided by interval enclosures of increasing precision.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::trial_factor;
use crate::fields::interval::{ln_interval, ln_rational, sqrt_enclosure, Interval};
use crate::fields::quadratic::{fundamental_unit, QuadSurd};
use crate::scalar::{Field, Rational};

const TRIAL_BOUND: u64 = 1 << 20;
/// Largest unit exponent peeled off during reduction.
const UNIT_STEPS: usize = 4096;

/// A positive real number whose logarithm is kept symbolic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    Prime(u64),
    /// An integer `> 1` with no prime factor below the trial bound.
    Integer(BigUint),
    /// The fundamental unit of `Q(sqrt(d))` under the identity embedding.
    Unit(u64),
    /// `a + b*sqrt(d)` with coprime integers `a`, `b > 0` and positive value.
    Surd { d: u64, a: BigInt, b: BigInt },
}

impl Atom {
    fn key(&self) -> String {
        match self {
            Atom::Prime(p) => format!("p:{p}"),
            Atom::Integer(n) => format!("n:{n}"),
            Atom::Unit(d) => format!("unit:{d}"),
            Atom::Surd { d, a, b } => format!("surd:{d}:{a}:{b}"),
        }
    }

    fn from_key(s: &str) -> Option<Atom> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["p", p] => p.parse().ok().map(Atom::Prime),
            ["n", n] => n.parse().ok().map(Atom::Integer),
            ["unit", d] => d.parse().ok().map(Atom::Unit),
            ["surd", d, a, b] => Some(Atom::Surd { d: d.parse().ok()?, a: a.parse().ok()?, b: b.parse().ok()? }),
            _ => None,
        }
    }

    /// Certified enclosure of `ln(self)` of width at most `2^-prec`.
    pub fn enclose(&self, prec: u64) -> Interval {
        match self {
            Atom::Prime(p) => ln_rational(&Rational::from_integer(BigInt::from(*p)), prec),
            Atom::Integer(n) => ln_rational(&Rational::from_integer(BigInt::from(n.clone())), prec),
            Atom::Unit(d) => {
                let e = fundamental_unit(*d).expect("unit atoms are only built when the unit is known");
                ln_embedded(&e, prec)
            }
            Atom::Surd { d, a, b } => ln_embedded(
                &QuadSurd::new(*d, Rational::from_integer(a.clone()), Rational::from_integer(b.clone())),
                prec,
            ),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Prime(p) => write!(f, "{p}"),
            Atom::Integer(n) => write!(f, "{n}"),
            Atom::Unit(d) => write!(f, "eps_{d}"),
            Atom::Surd { d, a, b } => {
                if b.is_one() {
                    write!(f, "{a} + sqrt({d})")
                } else {
                    write!(f, "{a} + {b}*sqrt({d})")
                }
            }
        }
    }
}

/// `ln` of the positive value `x` under the identity embedding.
fn ln_embedded(x: &QuadSurd, prec: u64) -> Interval {
    let target = Rational::new(BigInt::one(), BigInt::one() << prec);
    let mut bits = prec + 16;
    loop {
        let s = sqrt_enclosure(&BigUint::from(x.d()), bits);
        let v = Interval::point(x.a().clone()).add(&s.scale(x.b()));
        if v.lo().is_positive() {
            let l = ln_interval(&v, prec + 2);
            if l.width() <= target {
                return l;
            }
        }
        bits *= 2;
    }
}

/// `q + sum c_i ln(atom_i)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LogValue {
    constant: Rational,
    terms: BTreeMap<Atom, Rational>,
}

/// Result of an exact-or-refined comparison.
pub type Decision = Option<Ordering>;

impl LogValue {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(q: Rational) -> Self {
        LogValue { constant: q, terms: BTreeMap::new() }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::constant(Rational::from_integer(n.into()))
    }

    pub fn atom(a: Atom, c: Rational) -> Self {
        let mut v = Self::zero();
        v.push(a, c);
        v
    }

    pub fn ln_prime(p: u64) -> Self {
        Self::atom(Atom::Prime(p), Rational::one())
    }

    fn push(&mut self, a: Atom, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(a.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&a);
        }
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn terms(&self) -> &BTreeMap<Atom, Rational> {
        &self.terms
    }

    /// True when the value is a known rational.
    pub fn is_rational(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.constant += &rhs.constant;
        for (a, c) in &rhs.terms {
            out.push(a.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        LogValue {
            constant: &self.constant * k,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c * k)).collect(),
        }
    }

    /// `self / other` when both are rational multiples of one another.
    pub fn ratio(&self, other: &Self) -> Option<Rational> {
        if other.is_zero() {
            return None;
        }
        let k = match other.terms.iter().next() {
            Some((a, c)) => self.terms.get(a).cloned().unwrap_or_else(Rational::zero) / c,
            None => &self.constant / &other.constant,
        };
        (other.scale(&k) == *self).then_some(k)
    }

    /// Certified enclosure of width at most `2^-prec`.
    pub fn enclose(&self, prec: u64) -> Interval {
        let weight: Rational = self.terms.values().map(|c| c.abs()).sum();
        let extra = weight.ceil().to_integer().bits() + (self.terms.len() as u64 + 1).ilog2() as u64 + 2;
        let mut acc = Interval::point(self.constant.clone());
        for (a, c) in &self.terms {
            acc = acc.add(&a.enclose(prec + extra).scale(c));
        }
        acc
    }

    /// Sign, decided symbolically when the term map is empty and otherwise by
    /// enclosures refined up to `max_prec` bits. `None` means undecided.
    pub fn sign(&self, max_prec: u64) -> Decision {
        if self.terms.is_empty() {
            return Some(self.constant.cmp(&Rational::zero()));
        }
        let mut prec = 32;
        loop {
            if let Some(s) = self.enclose(prec).sign() {
                if s != Ordering::Equal {
                    return Some(s);
                }
            }
            if prec >= max_prec {
                return None;
            }
            prec = (prec * 2).min(max_prec);
        }
    }

    pub fn compare(&self, other: &Self, max_prec: u64) -> Decision {
        self.sub(other).sign(max_prec)
    }

    /// Maximum, when the comparison can be decided.
    pub fn max(&self, other: &Self, max_prec: u64) -> Option<Self> {
        match self.compare(other, max_prec)? {
            Ordering::Less => Some(other.clone()),
            _ => Some(self.clone()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.enclose(60).midpoint_f64()
    }

    /// `ln |q|` for a nonzero rational, factored over small primes.
    pub fn ln_abs_rational(q: &Rational) -> Self {
        assert!(!q.is_zero(), "logarithm of zero");
        let mut out = Self::zero();
        for (n, sign) in [(q.numer(), 1i64), (q.denom(), -1i64)] {
            let (factors, rest) = trial_factor(&n.magnitude().clone(), TRIAL_BOUND);
            for (p, e) in factors {
                out.push(Atom::Prime(p), Rational::from_integer(BigInt::from(sign * e as i64)));
            }
            if rest > BigUint::one() {
                out.push(Atom::Integer(rest), Rational::from_integer(BigInt::from(sign)));
            }
        }
        out
    }

    /// `ln |sigma(x)|` for nonzero `x` in `Q(sqrt(d))`, where `sigma` is the
    /// identity embedding if `positive` and the conjugate one otherwise.
    pub fn ln_abs_embedded(x: &QuadSurd, positive: bool) -> Self {
        assert!(!x.vanishes(), "logarithm of zero");
        let y = if positive { x.clone() } else { x.conjugate() };
        if y.is_rational() {
            return Self::ln_abs_rational(y.a());
        }
        let d = y.d();
        let mut out = Self::zero();
        let mut z = y;
        if let Some(eps) = fundamental_unit(d) {
            // move |z / conj z| into [1/eps, eps) by unit powers; each eps
            // factor changes that ratio by eps^2
            let eps_inv = eps.inv().expect("unit");
            let mut k: i64 = 0;
            for _ in 0..UNIT_STEPS {
                let ratio_hi = z.cmp_abs_embedded(&eps.mul(&z.conjugate()), true);
                let ratio_lo = eps.mul(&z).cmp_abs_embedded(&z.conjugate(), true);
                if ratio_hi != Ordering::Less {
                    z = z.mul(&eps_inv);
                    k += 1;
                } else if ratio_lo == Ordering::Less {
                    z = z.mul(&eps);
                    k -= 1;
                } else {
                    break;
                }
            }
            out.push(Atom::Unit(d), Rational::from_integer(k.into()));
        }
        if z.is_rational() {
            return out.add(&Self::ln_abs_rational(z.a()));
        }
        // z = c * (a0 + b0 sqrt d) with coprime integers a0, b0
        let num_gcd = z.a().numer().gcd(z.b().numer());
        let den_lcm = z.a().denom().lcm(z.b().denom());
        let content = Rational::new(num_gcd, den_lcm);
        let a0 = (z.a() / &content).to_integer();
        let b0 = (z.b() / &content).to_integer();
        out = out.add(&Self::ln_abs_rational(&content));
        let prim = QuadSurd::new(d, Rational::from_integer(a0.clone()), Rational::from_integer(b0.clone()));
        let (a0, b0) = if prim.embedded_sign(true) == Ordering::Less { (-a0, -b0) } else { (a0, b0) };
        if b0.is_positive() {
            out.push(Atom::Surd { d, a: a0, b: b0 }, Rational::one());
        } else {
            // ln|s(z0)| = ln|N(z0)| - ln|s(conj z0)|, and conj z0 has b > 0
            let norm = prim.norm();
            out = out.add(&Self::ln_abs_rational(&norm));
            let (ca, cb) = (a0, -b0);
            let conj = QuadSurd::new(d, Rational::from_integer(ca.clone()), Rational::from_integer(cb.clone()));
            let (ca, cb) = if conj.embedded_sign(true) == Ordering::Less { (-ca, -cb) } else { (ca, cb) };
            out.push(Atom::Surd { d, a: ca, b: cb }, -Rational::one());
        }
        out
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.constant.is_zero() || self.terms.is_empty() {
            parts.push(self.constant.to_string());
        }
        for (a, c) in &self.terms {
            let coeff = if c.is_one() {
                String::new()
            } else if *c == -Rational::one() {
                "-".to_string()
            } else {
                format!("{c}*")
            };
            parts.push(format!("{coeff}ln({a})"));
        }
        let s = parts.join(" + ").replace("+ -", "- ");
        if self.terms.is_empty() {
            f.write_str(&s)
        } else {
            write!(f, "{s} (~{:.6})", self.to_f64())
        }
    }
}

#[derive(Serialize, Deserialize)]
struct LogValueRepr {
    constant: String,
    terms: BTreeMap<String, String>,
    #[serde(default, skip_deserializing)]
    approx: f64,
}

impl Serialize for LogValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LogValueRepr {
            constant: self.constant.to_string(),
            terms: self.terms.iter().map(|(a, c)| (a.key(), c.to_string())).collect(),
            approx: self.to_f64(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = LogValueRepr::deserialize(d)?;
        let parse_q = |s: &str| s.parse::<Rational>().map_err(|_| D::Error::custom(format!("bad rational {s:?}")));
        let mut out = LogValue::constant(parse_q(&repr.constant)?);
        for (k, c) in &repr.terms {
            let atom = Atom::from_key(k).ok_or_else(|| D::Error::custom(format!("bad atom {k:?}")))?;
            if let Atom::Unit(d) = atom {
                if fundamental_unit(d).is_none() {
                    return Err(D::Error::custom(format!("no fundamental unit found for {d}")));
                }
            }
            out.push(atom, parse_q(c)?);
        }
        Ok(out)
    }
}

/// `ceil(x)` as an integer when the sign of `x - n` can be decided near the
/// candidates; used for integer lower bounds like `ceil(c/C * n)`.
pub fn ceil_decided(x: &LogValue, max_prec: u64) -> Option<BigInt> {
    let enc = x.enclose(64);
    let guess = enc.lo().ceil().to_integer();
    for n in [&guess - 1u32, guess.clone(), &guess + 1u32] {
        let below = x.compare(&LogValue::constant(Rational::from_integer(&n - 1u32)), max_prec)?;
        let at = x.compare(&LogValue::constant(Rational::from_integer(n.clone())), max_prec)?;
        if below == Ordering::Greater && at != Ordering::Greater {
            return Some(n);
        }
    }
    None
}

/// Decimal helper for reports.
pub fn approx(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
