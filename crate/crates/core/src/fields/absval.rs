//! Absolute values on the supported fields and their certified logarithms.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::{ExtendedGcd, Integer};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{is_prime, legendre, sqrt_mod_prime, valuation};
use crate::error::{Error, Result};
use crate::fields::interval::Interval;
use crate::fields::logvalue::LogValue;
use crate::fields::prime::factor_fp_poly;
use crate::fields::rational::rational_roots;
use crate::fields::{BaseDescriptor, FieldDescriptor, FieldElement, QuadSurd, RatFunc};
use crate::poly::Poly;
use crate::scalar::{Field, Rational};

/// The family an absolute value belongs to.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum AvKind {
    Trivial,
    PAdic(u64),
    ArchimedeanRational,
    /// `e^(deg num - deg den)` on a function field.
    DegreeValuation,
    /// `e^(-v_pi)` for a monic irreducible `pi` in the polynomial ring,
    /// stored as an element of the function field.
    PolyAdic(FieldElement),
    /// `|sigma(x)|` with `sigma(sqrt d) = +sqrt d` (`true`) or `-sqrt d`.
    QuadraticEmbedding(bool),
    /// `p^(-v)` for the prime above `p` on which `sqrt d = root (mod p)`.
    QuadraticPAdic { p: u64, root: u64 },
}

/// A named absolute value on a fixed field.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AbsoluteValue {
    kind: AvKind,
    target: FieldDescriptor,
}

fn mismatch(kind: &str, target: &FieldDescriptor) -> Error {
    Error::AbsoluteValueMismatch { av: kind.to_string(), field: target.to_string() }
}

impl AbsoluteValue {
    pub fn new(kind: AvKind, target: FieldDescriptor) -> Result<Self> {
        match (&kind, &target) {
            (AvKind::Trivial, _) => {}
            (AvKind::PAdic(p), FieldDescriptor::Rationals) => {
                if !is_prime(*p) {
                    return Err(Error::InvalidParameter(format!("{p} is not prime")));
                }
            }
            (AvKind::ArchimedeanRational, FieldDescriptor::Rationals) => {}
            (AvKind::DegreeValuation, FieldDescriptor::FunctionField { .. }) => {}
            (AvKind::PolyAdic(pi), FieldDescriptor::FunctionField { .. }) => {
                pi.expect_field(&target)?;
                check_irreducible(pi)?;
            }
            (AvKind::QuadraticEmbedding(_), FieldDescriptor::RealQuadratic(_)) => {}
            (AvKind::QuadraticPAdic { p, root }, FieldDescriptor::RealQuadratic(d)) => {
                if *p == 2 || !is_prime(*p) || d % p == 0 || legendre(*d, *p) != 1 {
                    return Err(Error::NotQuadraticResidue { d: *d, p: *p });
                }
                if root >= p || (root * root) % p != d % p {
                    return Err(Error::InvalidParameter(format!("{root} is not a square root of {d} mod {p}")));
                }
            }
            _ => return Err(mismatch(&kind_name(&kind), &target)),
        }
        Ok(AbsoluteValue { kind, target })
    }

    pub fn trivial(target: FieldDescriptor) -> Self {
        AbsoluteValue { kind: AvKind::Trivial, target }
    }

    pub fn p_adic(p: u64) -> Result<Self> {
        Self::new(AvKind::PAdic(p), FieldDescriptor::Rationals)
    }

    pub fn archimedean() -> Self {
        AbsoluteValue { kind: AvKind::ArchimedeanRational, target: FieldDescriptor::Rationals }
    }

    pub fn degree(target: FieldDescriptor) -> Result<Self> {
        Self::new(AvKind::DegreeValuation, target)
    }

    /// The `pi`-adic absolute value; `pi` is made monic.
    pub fn poly_adic(pi: &FieldElement) -> Result<Self> {
        let target = pi.descriptor();
        let monic = match pi {
            FieldElement::RationalFunction(f) => {
                FieldElement::RationalFunction(RatFunc::from_poly(f.num().monic(), f.var().clone()))
            }
            FieldElement::PrimeFunction(f) => {
                FieldElement::PrimeFunction(RatFunc::from_poly(f.num().monic(), f.var().clone()))
            }
            _ => return Err(mismatch("poly-adic", &target)),
        };
        Self::new(AvKind::PolyAdic(monic), target)
    }

    pub fn embedding(d: u64, positive: bool) -> Result<Self> {
        Self::new(AvKind::QuadraticEmbedding(positive), FieldDescriptor::real_quadratic(d)?)
    }

    /// The `p`-adic absolute value on `Q(sqrt(d))` for the branch of `sqrt d
    /// mod p` selected by `upper` (the larger of the two residues when true).
    pub fn quadratic_p_adic(d: u64, p: u64, upper: bool) -> Result<Self> {
        let target = FieldDescriptor::real_quadratic(d)?;
        if p == 2 || !is_prime(p) || d.is_multiple_of(p) {
            return Err(Error::NotQuadraticResidue { d, p });
        }
        let r = sqrt_mod_prime(d % p, p).ok_or(Error::NotQuadraticResidue { d, p })?;
        let (lo, hi) = if r <= p - r { (r, p - r) } else { (p - r, r) };
        Self::new(AvKind::QuadraticPAdic { p, root: if upper { hi } else { lo } }, target)
    }

    pub fn kind(&self) -> &AvKind {
        &self.kind
    }

    pub fn target(&self) -> &FieldDescriptor {
        &self.target
    }

    pub fn is_archimedean(&self) -> bool {
        matches!(self.kind, AvKind::ArchimedeanRational | AvKind::QuadraticEmbedding(_))
    }

    /// Kinds with an integer valuation and `log eps = -v * log(base)`.
    pub fn is_discrete(&self) -> bool {
        matches!(
            self.kind,
            AvKind::PAdic(_) | AvKind::DegreeValuation | AvKind::PolyAdic(_) | AvKind::QuadraticPAdic { .. }
        )
    }

    /// `log(base)` of a discrete kind: `ln p` for the p-adic kinds and `1`
    /// for the function-field kinds.
    pub fn base_log(&self) -> Option<LogValue> {
        match self.kind {
            AvKind::PAdic(p) | AvKind::QuadraticPAdic { p, .. } => Some(LogValue::ln_prime(p)),
            AvKind::DegreeValuation | AvKind::PolyAdic(_) => Some(LogValue::from_integer(1)),
            _ => None,
        }
    }

    fn check(&self, x: &FieldElement) -> Result<()> {
        if x.descriptor() != self.target {
            return Err(mismatch(&self.to_string(), &x.descriptor()));
        }
        if x.vanishes() {
            return Err(Error::LogOfZero);
        }
        Ok(())
    }

    /// Exact integer valuation of a nonzero element, for discrete kinds.
    pub fn valuation(&self, x: &FieldElement) -> Result<Option<i64>> {
        self.check(x)?;
        Ok(match (&self.kind, x) {
            (AvKind::PAdic(p), FieldElement::Rational(q)) => {
                Some(valuation(q.numer(), *p) as i64 - valuation(q.denom(), *p) as i64)
            }
            (AvKind::DegreeValuation, FieldElement::RationalFunction(f)) => f.degree().map(|d| -d),
            (AvKind::DegreeValuation, FieldElement::PrimeFunction(f)) => f.degree().map(|d| -d),
            (AvKind::PolyAdic(FieldElement::RationalFunction(pi)), FieldElement::RationalFunction(f)) => {
                f.poly_valuation(pi.num())
            }
            (AvKind::PolyAdic(FieldElement::PrimeFunction(pi)), FieldElement::PrimeFunction(f)) => {
                f.poly_valuation(pi.num())
            }
            (AvKind::QuadraticPAdic { p, root }, FieldElement::Quadratic(z)) => Some(quadratic_valuation(z, *p, *root)),
            _ => None,
        })
    }

    /// Exact symbolic `log eps(x)`.
    pub fn log_abs(&self, x: &FieldElement) -> Result<LogValue> {
        self.check(x)?;
        if let Some(v) = self.valuation(x)? {
            let base = self.base_log().expect("discrete kind");
            return Ok(base.scale(&Rational::from_integer((-v).into())));
        }
        Ok(match (&self.kind, x) {
            (AvKind::Trivial, _) => LogValue::zero(),
            (AvKind::ArchimedeanRational, FieldElement::Rational(q)) => LogValue::ln_abs_rational(q),
            (AvKind::QuadraticEmbedding(s), FieldElement::Quadratic(z)) => LogValue::ln_abs_embedded(z, *s),
            _ => unreachable!("kind and field were validated together"),
        })
    }

    /// For archimedean kinds, the element `y` with `sigma(y) = |sigma(x)|`,
    /// so sums of absolute values stay exact.
    pub fn embedded_abs(&self, x: &FieldElement) -> Option<FieldElement> {
        match (&self.kind, x) {
            (AvKind::ArchimedeanRational, FieldElement::Rational(q)) => Some(FieldElement::Rational(q.abs())),
            (AvKind::QuadraticEmbedding(s), FieldElement::Quadratic(z)) => {
                Some(FieldElement::Quadratic(z.abs_embedded(*s)))
            }
            _ => None,
        }
    }

    /// Exact comparison of `eps(x)` and `eps(y)` for archimedean kinds.
    pub fn cmp_embedded(&self, x: &FieldElement, y: &FieldElement) -> Option<Ordering> {
        match (&self.kind, x, y) {
            (AvKind::ArchimedeanRational, FieldElement::Rational(a), FieldElement::Rational(b)) => {
                Some(a.abs().cmp(&b.abs()))
            }
            (AvKind::QuadraticEmbedding(s), FieldElement::Quadratic(a), FieldElement::Quadratic(b)) => {
                Some(a.cmp_abs_embedded(b, *s))
            }
            _ => None,
        }
    }

    /// Certified evaluation of `log eps(x)`.
    pub fn eval(&self, x: &FieldElement, precision: u64) -> Result<LogMagnitude> {
        let value = self.log_abs(x)?;
        let valuation = self.valuation(x)?;
        let enclosure = value.enclose(precision).round_outward(precision + 2);
        Ok(LogMagnitude { value, valuation, precision, enclosure, provenance: Some((self.clone(), x.clone())) })
    }
}

fn kind_name(kind: &AvKind) -> String {
    match kind {
        AvKind::Trivial => "trivial".into(),
        AvKind::PAdic(p) => format!("{p}-adic"),
        AvKind::ArchimedeanRational => "archimedean".into(),
        AvKind::DegreeValuation => "degree".into(),
        AvKind::PolyAdic(pi) => format!("({pi})-adic"),
        AvKind::QuadraticEmbedding(true) => "embedding(+)".into(),
        AvKind::QuadraticEmbedding(false) => "embedding(-)".into(),
        AvKind::QuadraticPAdic { p, root } => format!("{p}-adic[sqrt={root}]"),
    }
}

impl fmt::Display for AbsoluteValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&kind_name(&self.kind))
    }
}

fn check_irreducible(pi: &FieldElement) -> Result<()> {
    let bad = |m: &str| Error::InvalidParameter(format!("{pi}: {m}"));
    match pi {
        FieldElement::RationalFunction(f) => {
            if !f.den().is_one() || f.num().degree().unwrap_or(0) == 0 {
                return Err(bad("not a nonconstant polynomial"));
            }
            let deg = f.num().degree().expect("nonzero");
            if deg > 3 {
                return Err(bad("irreducibility over Q is only certified up to degree 3"));
            }
            if deg > 1 && !rational_roots(f.num())?.is_empty() {
                return Err(bad("reducible"));
            }
        }
        FieldElement::PrimeFunction(f) => {
            if !f.den().is_one() || f.num().degree().unwrap_or(0) == 0 {
                return Err(bad("not a nonconstant polynomial"));
            }
            let (factors, rest) = factor_fp_poly(f.num(), 1 << 16);
            let irreducible = rest.is_one() && factors.len() == 1 && factors[0].1 == 1;
            if !irreducible {
                return Err(bad("reducible or too large to certify"));
            }
        }
        _ => return Err(bad("not a function-field element")),
    }
    Ok(())
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let ExtendedGcd { gcd, x, .. } = a.mod_floor(m).extended_gcd(m);
    debug_assert!(gcd.is_one());
    x.mod_floor(m)
}

/// `sqrt(d)` in `Z / p^k`, Hensel-lifted from `root`.
fn hensel_sqrt(d: u64, p: u64, root: u64, k: u32) -> BigInt {
    let modulus = BigInt::from(p).pow(k);
    let d = BigInt::from(d);
    let mut r = BigInt::from(root);
    let mut prec = 1u32;
    while prec < k {
        prec = (prec * 2).min(k);
        let m = BigInt::from(p).pow(prec);
        let f = (&r * &r - &d).mod_floor(&m);
        let inv = mod_inverse(&(&r * 2u32), &m);
        r = (&r - f * inv).mod_floor(&m);
    }
    r.mod_floor(&modulus)
}

/// Valuation of `z` at the prime above `p` where `sqrt d = root (mod p)`,
/// computed in `Z_p` with `sqrt d` lifted until the image stops vanishing.
fn quadratic_valuation(z: &QuadSurd, p: u64, root: u64) -> i64 {
    let den = z.a().denom().lcm(z.b().denom());
    let a = (z.a() * Rational::from_integer(den.clone())).to_integer();
    let b = (z.b() * Rational::from_integer(den.clone())).to_integer();
    let shift = valuation(&den, p) as i64;
    let mut k = 8u32;
    loop {
        let modulus = BigInt::from(p).pow(k);
        let r = hensel_sqrt(z.d(), p, root, k);
        let image = (&a + &b * r).mod_floor(&modulus);
        if !image.is_zero() {
            return valuation(&image, p) as i64 - shift;
        }
        k *= 2;
    }
}

/// A certified enclosure of `log eps(x)` together with its exact symbolic
/// value and, for discrete kinds, the integer valuation.
#[derive(Clone, Debug, PartialEq)]
pub struct LogMagnitude {
    value: LogValue,
    valuation: Option<i64>,
    precision: u64,
    enclosure: Interval,
    provenance: Option<(AbsoluteValue, FieldElement)>,
}

impl LogMagnitude {
    /// A magnitude built from an exact value without a single-element origin.
    pub fn from_value(value: LogValue, precision: u64) -> Self {
        let enclosure = value.enclose(precision).round_outward(precision + 2);
        LogMagnitude { value, valuation: None, precision, enclosure, provenance: None }
    }

    pub fn lower(&self) -> &Rational {
        self.enclosure.lo()
    }
    pub fn upper(&self) -> &Rational {
        self.enclosure.hi()
    }
    pub fn enclosure(&self) -> &Interval {
        &self.enclosure
    }
    pub fn value(&self) -> &LogValue {
        &self.value
    }
    pub fn valuation(&self) -> Option<i64> {
        self.valuation
    }
    pub fn precision(&self) -> u64 {
        self.precision
    }
    pub fn provenance(&self) -> Option<&(AbsoluteValue, FieldElement)> {
        self.provenance.as_ref()
    }

    /// Recomputes at `extra` more bits and intersects with the current
    /// enclosure, so the interval never widens.
    pub fn refine(&self, extra: u64) -> Self {
        let precision = self.precision + extra;
        let fresh = self.value.enclose(precision).round_outward(precision + 2);
        let enclosure = fresh.intersect(&self.enclosure).expect("both enclosures contain the true value");
        LogMagnitude { precision, enclosure, ..self.clone() }
    }
}

impl fmt::Display for LogMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.valuation {
            Some(v) => write!(f, "v={v}, log={} in {}", self.value, self.enclosure),
            None => write!(f, "log={} in {}", self.value, self.enclosure),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct AvRepr {
    field: FieldDescriptor,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    sign: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    root: Option<u64>,
}

impl Serialize for AbsoluteValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut repr = AvRepr { field: self.target.clone(), kind: String::new(), p: None, pi: None, sign: None, root: None };
        repr.kind = match &self.kind {
            AvKind::Trivial => "trivial",
            AvKind::PAdic(p) => {
                repr.p = Some(*p);
                "p-adic"
            }
            AvKind::ArchimedeanRational => "archimedean",
            AvKind::DegreeValuation => "degree",
            AvKind::PolyAdic(pi) => {
                repr.pi = Some(pi.to_string());
                "poly-adic"
            }
            AvKind::QuadraticEmbedding(pos) => {
                repr.sign = Some(if *pos { "+" } else { "-" }.into());
                "embedding"
            }
            AvKind::QuadraticPAdic { p, root } => {
                repr.p = Some(*p);
                repr.root = Some(*root);
                "quadratic-p-adic"
            }
        }
        .to_string();
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AbsoluteValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = AvRepr::deserialize(d)?;
        let need = |o: Option<u64>, what: &str| o.ok_or_else(|| D::Error::custom(format!("missing {what}")));
        let kind = match repr.kind.as_str() {
            "trivial" => AvKind::Trivial,
            "p-adic" => AvKind::PAdic(need(repr.p, "p")?),
            "archimedean" => AvKind::ArchimedeanRational,
            "degree" => AvKind::DegreeValuation,
            "poly-adic" => {
                let text = repr.pi.ok_or_else(|| D::Error::custom("missing pi"))?;
                AvKind::PolyAdic(repr.field.parse_element(&text).map_err(D::Error::custom)?)
            }
            "embedding" => AvKind::QuadraticEmbedding(match repr.sign.as_deref() {
                Some("+") => true,
                Some("-") => false,
                _ => return Err(D::Error::custom("embedding sign must be + or -")),
            }),
            "quadratic-p-adic" => AvKind::QuadraticPAdic { p: need(repr.p, "p")?, root: need(repr.root, "root")? },
            other => return Err(D::Error::custom(format!("unknown absolute value kind {other:?}"))),
        };
        AbsoluteValue::new(kind, repr.field).map_err(D::Error::custom)
    }
}

/// Monic irreducible factors of a polynomial over the base of a function
/// field, as poly-adic candidates. Over `Q` only linear factors and the
/// leftover cofactor (when of degree at most 3) are returned.
pub fn poly_adic_candidates(x: &FieldElement) -> Vec<FieldElement> {
    fn collect<K: crate::fields::BaseField>(
        f: &RatFunc<K>,
        wrap: impl Fn(RatFunc<K>) -> FieldElement,
        out: &mut Vec<FieldElement>,
    ) {
        for poly in [f.num(), f.den()] {
            if poly.is_constant() {
                continue;
            }
            if let Ok((factors, rest)) = K::factor(poly) {
                let mut polys: Vec<Poly<K>> = factors.into_iter().map(|(g, _)| g).collect();
                if rest.degree().is_some_and(|d| d > 0) {
                    polys.push(rest);
                }
                for g in polys {
                    let e = wrap(RatFunc::from_poly(g, f.var().clone()));
                    if !out.contains(&e) {
                        out.push(e);
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    match x {
        FieldElement::RationalFunction(f) => collect(f, FieldElement::RationalFunction, &mut out),
        FieldElement::PrimeFunction(f) => collect(f, FieldElement::PrimeFunction, &mut out),
        _ => {}
    }
    out
}

/// Base descriptor of a function field, if `desc` is one.
pub fn function_base(desc: &FieldDescriptor) -> Option<BaseDescriptor> {
    match desc {
        FieldDescriptor::FunctionField { base, .. } => Some(*base),
        _ => None,
    }
}
