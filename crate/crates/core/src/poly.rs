//! Dense univariate polynomials over any [`Field`].
//!
//! Coefficients are stored in ascending degree order with no trailing zeros,
//! so equal polynomials have identical representations.

use std::fmt;

use crate::scalar::Field;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<S: Field> {
    coeffs: Vec<S>,
    ctx: S::Ctx,
}

impl<S: Field> Poly<S> {
    pub fn new(mut coeffs: Vec<S>, ctx: S::Ctx) -> Self {
        while coeffs.last().is_some_and(|c| c.vanishes()) {
            coeffs.pop();
        }
        Poly { coeffs, ctx }
    }

    pub fn zero(ctx: &S::Ctx) -> Self {
        Poly { coeffs: Vec::new(), ctx: ctx.clone() }
    }

    pub fn one(ctx: &S::Ctx) -> Self {
        Self::constant(S::one_in(ctx))
    }

    pub fn constant(c: S) -> Self {
        let ctx = c.ctx();
        Self::new(vec![c], ctx)
    }

    /// The indeterminate.
    pub fn x(ctx: &S::Ctx) -> Self {
        Poly { coeffs: vec![S::zero_in(ctx), S::one_in(ctx)], ctx: ctx.clone() }
    }

    /// `x - root`.
    pub fn linear(root: &S) -> Self {
        let ctx = root.ctx();
        Poly { coeffs: vec![root.neg(), S::one_in(&ctx)], ctx }
    }

    pub fn monomial(c: S, deg: usize) -> Self {
        let ctx = c.ctx();
        let mut coeffs = vec![S::zero_in(&ctx); deg + 1];
        coeffs[deg] = c;
        Self::new(coeffs, ctx)
    }

    pub fn ctx(&self) -> &S::Ctx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_unity()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> S {
        self.coeffs.get(i).cloned().unwrap_or_else(|| S::zero_in(&self.ctx))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).add(&rhs.coeff(i))).collect();
        Self::new(coeffs, self.ctx.clone())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).sub(&rhs.coeff(i))).collect();
        Self::new(coeffs, self.ctx.clone())
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(S::neg).collect(), ctx: self.ctx.clone() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(&self.ctx);
        }
        let mut out = vec![S::zero_in(&self.ctx); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.vanishes() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out, self.ctx.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.mul(c)).collect(), self.ctx.clone())
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Euclidean division; `None` when dividing by zero.
    pub fn div_rem(&self, divisor: &Self) -> Option<(Self, Self)> {
        let dd = divisor.degree()?;
        let lead_inv = divisor.leading()?.inv()?;
        let mut rem = self.coeffs.clone();
        if rem.len() < divisor.coeffs.len() {
            return Some((Self::zero(&self.ctx), self.clone()));
        }
        let mut quot = vec![S::zero_in(&self.ctx); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].mul(&lead_inv);
            if c.vanishes() {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].sub(&c.mul(b));
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Some((Self::new(quot, self.ctx.clone()), Self::new(rem, self.ctx.clone())))
    }

    pub fn rem(&self, divisor: &Self) -> Option<Self> {
        self.div_rem(divisor).map(|(_, r)| r)
    }

    /// Exact quotient when `divisor` divides `self`.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(divisor)?;
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.rem(self).is_some_and(|r| r.is_zero())
    }

    /// Scaled to leading coefficient one; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading().and_then(S::inv) {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero_in(&self.ctx), |acc, c| acc.mul(x).add(c))
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&S::from_i64(&self.ctx, i as i64)))
            .collect();
        Self::new(coeffs, self.ctx.clone())
    }

    /// `self^e mod modulus`.
    pub fn pow_mod(&self, mut e: u64, modulus: &Self) -> Self {
        let mut base = self.rem(modulus).expect("nonzero modulus");
        let mut acc = Self::one(&self.ctx).rem(modulus).expect("nonzero modulus");
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(modulus).expect("nonzero modulus");
            }
            base = base.mul(&base).rem(modulus).expect("nonzero modulus");
            e >>= 1;
        }
        acc
    }

    pub fn map<T: Field>(&self, ctx: &T::Ctx, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(f).collect(), ctx.clone())
    }

    /// Fallible coefficient map.
    pub fn try_map<T: Field, E>(&self, ctx: &T::Ctx, f: impl Fn(&S) -> Result<T, E>) -> Result<Poly<T>, E> {
        Ok(Poly::new(self.coeffs.iter().map(f).collect::<Result<_, _>>()?, ctx.clone()))
    }

    /// Multiplicity of `root` as a root of `self` (zero polynomial reports 0).
    pub fn root_multiplicity(&self, root: &S) -> usize {
        if self.is_zero() {
            return 0;
        }
        let lin = Self::linear(root);
        let mut p = self.clone();
        let mut m = 0;
        while let Some(q) = p.exact_div(&lin) {
            p = q;
            m += 1;
        }
        m
    }

    /// Renders with the given variable name, e.g. `x^2 - 3*x + 1/2`.
    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.vanishes() {
                continue;
            }
            let mut cs = c.to_string();
            let compound = cs.contains(' ');
            let negative = !compound && cs.starts_with('-');
            if negative {
                cs.remove(0);
            }
            if compound {
                cs = format!("({cs})");
            }
            let term = match i {
                0 => cs,
                _ => {
                    let mono = if i == 1 { var.to_string() } else { format!("{var}^{i}") };
                    if cs == "1" {
                        mono
                    } else {
                        format!("{cs}*{mono}")
                    }
                }
            };
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        out
    }
}

impl<S: Field> fmt::Debug for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self.display_with("x"))
    }
}

impl<S: Field> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("x"))
    }
}

/// Squarefree part `p / gcd(p, p')`, valid in characteristic zero.
pub fn squarefree_part<S: Field>(p: &Poly<S>) -> Poly<S> {
    let g = p.gcd(&p.derivative());
    p.exact_div(&g).expect("gcd divides").monic()
}

/// Strips the roots in `roots` (with multiplicity) from `p`, returning the
/// multiplicities and the cofactor.
pub fn deflate<S: Field>(p: &Poly<S>, roots: &[S]) -> (Vec<usize>, Poly<S>) {
    let mut rest = p.clone();
    let mut mults = Vec::with_capacity(roots.len());
    for r in roots {
        let lin = Poly::linear(r);
        let mut m = 0;
        while let Some(q) = rest.exact_div(&lin) {
            rest = q;
            m += 1;
        }
        mults.push(m);
    }
    (mults, rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(coeffs: &[i64]) -> Poly<Rational> {
        Poly::new(coeffs.iter().map(|&c| Rational::from_i64(&(), c)).collect(), ())
    }

    #[test]
    fn division_and_gcd() {
        let a = q(&[-1, 0, 1]); // x^2 - 1
        let b = q(&[1, 1]); // x + 1
        let (quot, rem) = a.div_rem(&b).unwrap();
        assert_eq!(quot, q(&[-1, 1]));
        assert!(rem.is_zero());
        assert_eq!(a.gcd(&q(&[-1, 0, 0, 1])), q(&[-1, 1]));
    }

    #[test]
    fn display_signs() {
        assert_eq!(q(&[1, -3, 1]).display_with("x"), "x^2 - 3*x + 1");
        assert_eq!(q(&[0, -1]).display_with("t"), "-t");
    }

    #[test]
    fn squarefree_and_multiplicity() {
        let p = q(&[1, -2, 1]).mul(&q(&[2, 1]));
        assert_eq!(p.root_multiplicity(&Rational::from_i64(&(), 1)), 2);
        assert_eq!(squarefree_part(&p), q(&[-1, 1]).mul(&q(&[2, 1])));
    }
}
