//! Root finding and partial factorization over `Q`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::divisors;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::Rational;

const DIVISOR_TRIAL_BOUND: u64 = 1 << 20;
const DIVISOR_LIMIT: usize = 1 << 14;

/// Integer coefficients of `c * p` for the least positive `c` clearing all
/// denominators.
pub fn integer_coefficients(p: &Poly<Rational>) -> Vec<BigInt> {
    let lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    p.coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect()
}

/// All rational roots, by the rational root theorem, in descending order.
pub fn rational_roots(p: &Poly<Rational>) -> Result<Vec<Rational>> {
    if p.is_zero() {
        return Err(Error::InvalidParameter("roots of the zero polynomial".into()));
    }
    let mut ints = integer_coefficients(p);
    let mut roots = Vec::new();
    if ints[0].is_zero() {
        roots.push(Rational::zero());
        let shift = ints.iter().take_while(|c| c.is_zero()).count();
        ints.drain(..shift);
    }
    if ints.len() > 1 {
        let a0 = ints[0].abs().to_biguint().expect("nonnegative");
        let an = ints[ints.len() - 1].abs().to_biguint().expect("nonnegative");
        let (Some(num_divs), Some(den_divs)) = (
            divisors(&a0, DIVISOR_TRIAL_BOUND, DIVISOR_LIMIT),
            divisors(&an, DIVISOR_TRIAL_BOUND, DIVISOR_LIMIT),
        ) else {
            return Err(Error::NeedsExtension(
                "rational root candidates too large to enumerate".into(),
            ));
        };
        let reduced = Poly::new(ints.iter().map(|c| Rational::from_integer(c.clone())).collect(), ());
        for u in &num_divs {
            for w in &den_divs {
                if !u.gcd(w).is_one() {
                    continue;
                }
                for sign in [Sign::Plus, Sign::Minus] {
                    let cand = Rational::new(BigInt::from_biguint(sign, u.clone()), BigInt::from(w.clone()));
                    if reduced.eval(&cand).is_zero() {
                        roots.push(cand);
                    }
                }
            }
        }
    }
    roots.sort_by(|a, b| b.cmp(a));
    roots.dedup();
    Ok(roots)
}

/// Linear factors over `Q` with multiplicities plus the remaining cofactor
/// (which has no rational roots).
pub fn linear_factors(p: &Poly<Rational>) -> Result<(Vec<(Poly<Rational>, u32)>, Poly<Rational>)> {
    let roots = rational_roots(p)?;
    let mut rest = p.monic();
    let mut out = Vec::new();
    for r in roots {
        let lin = Poly::linear(&r);
        let mut e = 0;
        while let Some(q) = rest.exact_div(&lin) {
            rest = q;
            e += 1;
        }
        out.push((lin, e));
    }
    Ok((out, rest))
}

/// The `m`-th cyclotomic polynomial.
pub fn cyclotomic(m: u64) -> Poly<Rational> {
    let one = Rational::one();
    let mut p = Poly::monomial(one.clone(), m as usize).sub(&Poly::constant(one));
    for d in 1..m {
        if m.is_multiple_of(d) {
            p = p.exact_div(&cyclotomic(d)).expect("cyclotomic divides");
        }
    }
    p
}

/// Square root in `Q`, when it exists.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}
