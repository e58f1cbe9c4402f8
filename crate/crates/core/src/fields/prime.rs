//! The prime field `GF(p)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::arith::{mul_mod, pow_mod};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{Field, RootOfUnityTest};

/// Largest modulus for which exhaustive root search is attempted.
pub const ROOT_SEARCH_LIMIT: u64 = 1 << 20;

/// A residue in `[0, p)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn new(value: i64, modulus: u64) -> Self {
        Fp { value: value.rem_euclid(modulus as i64) as u64, modulus }
    }

    pub fn from_residue(value: u64, modulus: u64) -> Self {
        Fp { value: value % modulus, modulus }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Field for Fp {
    type Ctx = u64;

    fn ctx(&self) -> u64 {
        self.modulus
    }
    fn zero_in(p: &u64) -> Self {
        Fp { value: 0, modulus: *p }
    }
    fn one_in(p: &u64) -> Self {
        Fp { value: 1 % *p, modulus: *p }
    }
    fn from_i64(p: &u64, n: i64) -> Self {
        Fp { value: (n as i128).rem_euclid(*p as i128) as u64, modulus: *p }
    }
    fn from_bigint(p: &u64, n: &BigInt) -> Self {
        let r = n.mod_floor(&BigInt::from(*p));
        Fp { value: r.to_u64().expect("residue fits"), modulus: *p }
    }
    fn characteristic(p: &u64) -> u64 {
        *p
    }
    fn vanishes(&self) -> bool {
        self.value == 0
    }
    fn is_unity(&self) -> bool {
        self.value == 1
    }
    fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let s = self.value as u128 + rhs.value as u128;
        Fp { value: (s % self.modulus as u128) as u64, modulus: self.modulus }
    }
    fn sub(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let s = self.value as u128 + self.modulus as u128 - rhs.value as u128;
        Fp { value: (s % self.modulus as u128) as u64, modulus: self.modulus }
    }
    fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Fp { value: mul_mod(self.value, rhs.value, self.modulus), modulus: self.modulus }
    }
    fn neg(&self) -> Self {
        Fp { value: (self.modulus - self.value) % self.modulus, modulus: self.modulus }
    }
    fn inv(&self) -> Option<Self> {
        (self.value != 0).then(|| Fp {
            value: pow_mod(self.value, self.modulus - 2, self.modulus),
            modulus: self.modulus,
        })
    }

    /// Exhaustive search over all residues.
    fn roots(poly: &Poly<Self>) -> Result<Vec<Self>> {
        let p = *poly.ctx();
        if poly.is_zero() {
            return Err(Error::InvalidParameter("roots of the zero polynomial".into()));
        }
        if p > ROOT_SEARCH_LIMIT {
            return Err(Error::NeedsExtension(format!(
                "exhaustive root search in GF({p}) exceeds the supported modulus bound"
            )));
        }
        Ok((0..p)
            .map(|v| Fp { value: v, modulus: p })
            .filter(|x| poly.eval(x).vanishes())
            .collect())
    }

    fn root_of_unity_test(poly: &Poly<Self>) -> RootOfUnityTest {
        // every nonzero element of an algebraic closure of GF(p) has finite order
        if poly.coeff(0).vanishes() {
            RootOfUnityTest::Never
        } else {
            RootOfUnityTest::Always
        }
    }
}

/// Every monic polynomial of degree `deg` over `GF(p)`, in lexicographic order
/// of coefficients.
pub(crate) fn monic_polys(p: u64, deg: usize) -> impl Iterator<Item = Poly<Fp>> {
    let count = p.checked_pow(deg as u32).unwrap_or(u64::MAX);
    (0..count).map(move |mut idx| {
        let mut coeffs = Vec::with_capacity(deg + 1);
        for _ in 0..deg {
            coeffs.push(Fp::from_residue(idx % p, p));
            idx /= p;
        }
        coeffs.push(Fp::one_in(&p));
        Poly::new(coeffs, p)
    })
}

/// Factorization over `GF(p)` by trial division with monic polynomials of
/// increasing degree. Gives up (returning the unfactored cofactor) once the
/// candidate count for a degree exceeds `budget`.
pub(crate) fn factor_fp_poly(f: &Poly<Fp>, budget: u64) -> (Vec<(Poly<Fp>, u32)>, Poly<Fp>) {
    let p = *f.ctx();
    let mut rest = f.monic();
    let mut out = Vec::new();
    let mut deg = 1;
    while rest.degree().is_some_and(|d| d >= 2 * deg) {
        if p.checked_pow(deg as u32).is_none_or(|c| c > budget) {
            return (out, rest);
        }
        for cand in monic_polys(p, deg) {
            let mut e = 0;
            while let Some(q) = rest.exact_div(&cand) {
                rest = q;
                e += 1;
            }
            if e > 0 {
                out.push((cand, e));
            }
        }
        deg += 1;
    }
    if rest.degree().is_some_and(|d| d > 0) {
        out.push((rest.clone(), 1));
        rest = Poly::one(&p);
    }
    (out, rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_mod_seven() {
        let a = Fp::new(3, 7);
        let b = Fp::new(-2, 7);
        assert_eq!(b.value(), 5);
        assert_eq!(a.mul(&b).value(), 1);
        assert_eq!(a.inv().unwrap(), b);
        assert_eq!(a.sub(&b).value(), 5);
        assert!(Fp::zero_in(&7).inv().is_none());
    }

    #[test]
    fn factoring_small_polys() {
        // x^3 + x = x (x^2 + 1) over GF(2) = x (x + 1)^2
        let f = Poly::new(vec![Fp::new(0, 2), Fp::new(1, 2), Fp::new(0, 2), Fp::new(1, 2)], 2);
        let (factors, rest) = factor_fp_poly(&f, 1000);
        assert!(rest.is_one());
        let degs: Vec<(usize, u32)> = factors.iter().map(|(g, e)| (g.degree().unwrap(), *e)).collect();
        assert_eq!(degs, vec![(1, 1), (1, 2)]);
    }
}
