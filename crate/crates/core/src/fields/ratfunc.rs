//! Rational function fields `K(t)` over `K = Q` or `K = GF(p)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::prime::{factor_fp_poly, Fp};
use crate::fields::rational::linear_factors;
use crate::poly::Poly;
use crate::scalar::{Field, Rational, RootOfUnityTest};

/// Number of candidate degrees a trial factorization over `GF(p)` may use.
const FACTOR_BUDGET: u64 = 1 << 16;
/// Cap on the monic divisors enumerated for a single coefficient.
const DIVISOR_CAP: usize = 1 << 12;

/// The base of a function field.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum BaseDescriptor {
    Rationals,
    Prime(u64),
}

/// Coefficient fields a function field may be built on.
pub trait BaseField: Field {
    fn base_descriptor(ctx: &Self::Ctx) -> BaseDescriptor;

    /// Monic factors with multiplicities, plus a monic cofactor that was left
    /// unfactored (one when the factorization is complete).
    fn factor(p: &Poly<Self>) -> Result<(Vec<(Poly<Self>, u32)>, Poly<Self>)>;
}

impl BaseField for Rational {
    fn base_descriptor(_: &()) -> BaseDescriptor {
        BaseDescriptor::Rationals
    }
    fn factor(p: &Poly<Self>) -> Result<(Vec<(Poly<Self>, u32)>, Poly<Self>)> {
        let (lin, rest) = linear_factors(p)?;
        Ok((lin.into_iter().filter(|(_, e)| *e > 0).collect(), rest))
    }
}

impl BaseField for Fp {
    fn base_descriptor(p: &u64) -> BaseDescriptor {
        BaseDescriptor::Prime(*p)
    }
    fn factor(p: &Poly<Self>) -> Result<(Vec<(Poly<Self>, u32)>, Poly<Self>)> {
        Ok(factor_fp_poly(p, FACTOR_BUDGET))
    }
}

/// Context of `K(t)`: the base context and the variable name.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FnCtx<K: Field> {
    pub base: K::Ctx,
    pub var: Arc<str>,
}

/// `num / den` with `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc<K: Field> {
    num: Poly<K>,
    den: Poly<K>,
    var: Arc<str>,
}

impl<K: BaseField> RatFunc<K> {
    pub fn new(num: Poly<K>, den: Poly<K>, var: Arc<str>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::reduce(num, den, var))
    }

    fn reduce(num: Poly<K>, den: Poly<K>, var: Arc<str>) -> Self {
        if num.is_zero() {
            let one = Poly::one(den.ctx());
            return RatFunc { num, den: one, var };
        }
        let g = num.gcd(&den);
        let mut num = num.exact_div(&g).expect("gcd divides");
        let mut den = den.exact_div(&g).expect("gcd divides");
        let lead = den.leading().expect("nonzero").inv().expect("nonzero");
        num = num.scale(&lead);
        den = den.scale(&lead);
        RatFunc { num, den, var }
    }

    pub fn from_poly(num: Poly<K>, var: Arc<str>) -> Self {
        let den = Poly::one(num.ctx());
        RatFunc { num, den, var }
    }

    pub fn constant(c: K, var: Arc<str>) -> Self {
        Self::from_poly(Poly::constant(c), var)
    }

    /// The transcendental `t`.
    pub fn variable(base: &K::Ctx, var: Arc<str>) -> Self {
        Self::from_poly(Poly::x(base), var)
    }

    pub fn num(&self) -> &Poly<K> {
        &self.num
    }
    pub fn den(&self) -> &Poly<K> {
        &self.den
    }
    pub fn var(&self) -> &Arc<str> {
        &self.var
    }

    /// The base-field value when this is a constant.
    pub fn as_constant(&self) -> Option<K> {
        (self.num.is_constant() && self.den.is_one()).then(|| self.num.coeff(0))
    }

    /// `deg num - deg den`; `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        Some(self.num.degree()? as i64 - self.den.degree().expect("nonzero") as i64)
    }

    /// Exponent of the irreducible `pi` in this element; `None` for zero.
    pub fn poly_valuation(&self, pi: &Poly<K>) -> Option<i64> {
        if self.num.is_zero() {
            return None;
        }
        let count = |p: &Poly<K>| {
            let mut rest = p.clone();
            let mut e = 0i64;
            while let Some(q) = rest.exact_div(pi) {
                rest = q;
                e += 1;
            }
            e
        };
        Some(count(&self.num) - count(&self.den))
    }
}

impl<K: BaseField> fmt::Display for RatFunc<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.num.display_with(&self.var);
        if self.den.is_one() {
            f.write_str(&num)
        } else {
            write!(f, "({num}) / ({})", self.den.display_with(&self.var))
        }
    }
}

fn poly_lcm<K: Field>(a: &Poly<K>, b: &Poly<K>) -> Poly<K> {
    a.mul(b).exact_div(&a.gcd(b)).expect("gcd divides").monic()
}

/// Every monic divisor of a polynomial with the given factorization.
fn monic_divisors<K: Field>(factors: &[(Poly<K>, u32)], ctx: &K::Ctx) -> Result<Vec<Poly<K>>> {
    let count: usize = factors.iter().map(|(_, e)| *e as usize + 1).product();
    if count > DIVISOR_CAP {
        return Err(Error::NeedsExtension("too many divisor candidates for root search".into()));
    }
    let mut divs = vec![Poly::one(ctx)];
    for (f, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (*e as usize + 1));
        for d in &divs {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..*e {
                acc = acc.mul(f);
                next.push(acc.clone());
            }
        }
        divs = next;
    }
    Ok(divs)
}

fn with_cofactor<K: BaseField>(p: &Poly<K>) -> Result<Vec<(Poly<K>, u32)>> {
    let (mut factors, rest) = K::factor(p)?;
    if rest.degree().is_some_and(|d| d > 0) {
        factors.push((rest, 1));
    }
    Ok(factors)
}

impl<K: BaseField> Field for RatFunc<K> {
    type Ctx = FnCtx<K>;

    fn ctx(&self) -> FnCtx<K> {
        FnCtx { base: self.num.ctx().clone(), var: self.var.clone() }
    }
    fn zero_in(ctx: &FnCtx<K>) -> Self {
        Self::from_poly(Poly::zero(&ctx.base), ctx.var.clone())
    }
    fn one_in(ctx: &FnCtx<K>) -> Self {
        Self::from_poly(Poly::one(&ctx.base), ctx.var.clone())
    }
    fn from_i64(ctx: &FnCtx<K>, n: i64) -> Self {
        Self::from_poly(Poly::new(vec![K::from_i64(&ctx.base, n)], ctx.base.clone()), ctx.var.clone())
    }
    fn from_bigint(ctx: &FnCtx<K>, n: &num_bigint::BigInt) -> Self {
        Self::from_poly(Poly::new(vec![K::from_bigint(&ctx.base, n)], ctx.base.clone()), ctx.var.clone())
    }
    fn characteristic(ctx: &FnCtx<K>) -> u64 {
        K::characteristic(&ctx.base)
    }
    fn vanishes(&self) -> bool {
        self.num.is_zero()
    }
    fn is_unity(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
    fn add(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            return Self::reduce(self.num.add(&rhs.num), self.den.clone(), self.var.clone());
        }
        Self::reduce(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
            self.var.clone(),
        )
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        Self::reduce(self.num.mul(&rhs.num), self.den.mul(&rhs.den), self.var.clone())
    }
    fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone(), var: self.var.clone() }
    }
    fn inv(&self) -> Option<Self> {
        (!self.num.is_zero()).then(|| Self::reduce(self.den.clone(), self.num.clone(), self.var.clone()))
    }

    /// Roots `c * u / w` where `u` and `w` run over monic divisors of the
    /// trailing and leading coefficients (after clearing denominators) and
    /// the constant `c` solves the coefficient equations over the base.
    /// Complete over `GF(p)` bases; over `Q` the divisors come from linear
    /// factors plus the unfactored cofactor, so roots whose numerator or
    /// denominator needs a nonlinear factor of that cofactor may be missed.
    fn roots(poly: &Poly<Self>) -> Result<Vec<Self>> {
        if poly.is_zero() {
            return Err(Error::InvalidParameter("roots of the zero polynomial".into()));
        }
        let ctx = poly.ctx().clone();
        let base = ctx.base.clone();
        let l = poly.coeffs().iter().fold(Poly::one(&base), |acc, c| poly_lcm(&acc, &c.den));
        let mut b: Vec<Poly<K>> = poly
            .coeffs()
            .iter()
            .map(|c| c.num.mul(&l.exact_div(&c.den).expect("lcm")))
            .collect();
        let mut found = Vec::new();
        let shift = b.iter().take_while(|c| c.is_zero()).count();
        if shift > 0 {
            found.push(Self::zero_in(&ctx));
            b.drain(..shift);
        }
        let n = b.len() - 1;
        if n == 0 {
            return Ok(found);
        }
        let us = monic_divisors(&with_cofactor(&b[0])?, &base)?;
        let ws = monic_divisors(&with_cofactor(&b[n])?, &base)?;
        for u in &us {
            for w in &ws {
                if !u.gcd(w).is_one() {
                    continue;
                }
                // h_i = b_i u^i w^(n-i); sum_i h_i c^i = 0 coefficientwise in t
                let h: Vec<Poly<K>> = (0..=n)
                    .map(|i| b[i].mul(&u.pow(i as u64)).mul(&w.pow((n - i) as u64)))
                    .collect();
                let top = h.iter().filter_map(Poly::degree).max().unwrap_or(0);
                let mut g = Poly::zero(&base);
                for k in 0..=top {
                    let eq = Poly::new(h.iter().map(|hi| hi.coeff(k)).collect(), base.clone());
                    g = g.gcd(&eq);
                    if g.is_one() {
                        break;
                    }
                }
                if g.is_zero() || g.is_constant() {
                    continue;
                }
                for c in K::roots(&g)? {
                    if c.vanishes() {
                        continue;
                    }
                    let r = Self::reduce(u.scale(&c), w.clone(), ctx.var.clone());
                    if !found.contains(&r) && poly.eval(&r).vanishes() {
                        found.push(r);
                    }
                }
            }
        }
        Ok(found)
    }

    /// Roots of unity in an algebraic closure of `K(t)` are algebraic over
    /// `K`, so a monic polynomial all of whose roots are roots of unity has
    /// constant coefficients.
    fn root_of_unity_test(poly: &Poly<Self>) -> RootOfUnityTest {
        let monic = poly.monic();
        let consts: Option<Vec<K>> = monic.coeffs().iter().map(RatFunc::as_constant).collect();
        match consts {
            Some(cs) => K::root_of_unity_test(&Poly::new(cs, poly.ctx().base.clone())),
            None => RootOfUnityTest::Never,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var() -> Arc<str> {
        Arc::from("t")
    }

    fn fp_poly(cs: &[i64], p: u64) -> Poly<Fp> {
        Poly::new(cs.iter().map(|&c| Fp::new(c, p)).collect(), p)
    }

    fn q_poly(cs: &[i64]) -> Poly<Rational> {
        Poly::new(cs.iter().map(|&c| Rational::from_i64(&(), c)).collect(), ())
    }

    #[test]
    fn common_factor_cancels() {
        // (t^2 + t) / t over GF(2)
        let x = RatFunc::new(fp_poly(&[0, 1, 1], 2), fp_poly(&[0, 1], 2), var()).unwrap();
        assert_eq!(x.num(), &fp_poly(&[1, 1], 2));
        assert!(x.den().is_one());
        assert_eq!(x.to_string(), "t + 1");
    }

    #[test]
    fn denominator_made_monic() {
        // 1 / (2t) over Q
        let x = RatFunc::new(q_poly(&[1]), q_poly(&[0, 2]), var()).unwrap();
        assert_eq!(x.to_string(), "(1/2) / (t)");
        assert_eq!(x.degree(), Some(-1));
        assert!(RatFunc::new(q_poly(&[1]), q_poly(&[]), var()).is_err());
    }

    #[test]
    fn roots_over_function_field() {
        let ctx = FnCtx::<Rational> { base: (), var: var() };
        let t = RatFunc::variable(&(), var());
        let one = RatFunc::one_in(&ctx);
        // (x - t)(x - 1)
        let p = Poly::linear(&t).mul(&Poly::linear(&one));
        let roots = RatFunc::roots(&p).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.contains(&t) && roots.contains(&one));
        // (x - 2/(t+1)) * (x + t^2)
        let r = RatFunc::new(q_poly(&[2]), q_poly(&[1, 1]), var()).unwrap();
        let s = RatFunc::from_poly(q_poly(&[0, 0, -1]), var());
        let p = Poly::linear(&r).mul(&Poly::linear(&s));
        let roots = RatFunc::roots(&p).unwrap();
        assert!(roots.contains(&r) && roots.contains(&s));
        // x^2 - t has no root
        let p = Poly::new(vec![t.neg(), RatFunc::zero_in(&ctx), one], ctx);
        assert!(RatFunc::roots(&p).unwrap().is_empty());
    }

    #[test]
    fn roots_over_prime_base() {
        let t = RatFunc::variable(&3, var());
        let one = RatFunc::one_in(&FnCtx { base: 3, var: var() });
        let p = Poly::linear(&t.add(&one)).mul(&Poly::linear(&t));
        let roots = RatFunc::<Fp>::roots(&p).unwrap();
        assert_eq!(roots.len(), 2);
    }
}
