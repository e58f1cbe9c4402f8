//! Integer helpers: primality, trial factorization, modular square roots.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let (factors, rest) = trial_factor(&BigUint::from(n), u64::MAX);
    debug_assert!(rest.is_one());
    factors.iter().all(|&(_, e)| e == 1)
}

/// Trial division of `n` by primes up to `bound` (and at most up to the
/// square root of the running cofactor). Returns the prime factorization found
/// and the unfactored cofactor, which is 1, a prime, or a number with no prime
/// factor below `bound`.
pub fn trial_factor(n: &BigUint, bound: u64) -> (Vec<(u64, u32)>, BigUint) {
    let mut rest = n.clone();
    let mut out = Vec::new();
    if rest.is_zero() {
        return (out, rest);
    }
    let mut p = 2u64;
    while p <= bound {
        if let Some(r) = rest.to_u64() {
            if r == 1 {
                break;
            }
            if p.saturating_mul(p) > r {
                out.push((r, 1));
                rest = BigUint::one();
                break;
            }
        } else if BigUint::from(p) * BigUint::from(p) > rest {
            break;
        }
        let bp = BigUint::from(p);
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    out.sort_unstable();
    let mut merged: Vec<(u64, u32)> = Vec::with_capacity(out.len());
    for (p, e) in out {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    (merged, rest)
}

/// Complete factorization of a small integer.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    trial_factor(&BigUint::from(n), u64::MAX).0
}

/// All positive divisors, when `n` factors completely below `bound` and has
/// at most `limit` divisors.
pub fn divisors(n: &BigUint, bound: u64, limit: usize) -> Option<Vec<BigUint>> {
    if n.is_zero() {
        return None;
    }
    let (factors, rest) = trial_factor(n, bound);
    if !rest.is_one() {
        return None;
    }
    let count: usize = factors.iter().map(|&(_, e)| e as usize + 1).product();
    if count > limit {
        return None;
    }
    let mut divs = vec![BigUint::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = d.clone();
            next.push(pk.clone());
            for _ in 0..e {
                pk *= p;
                next.push(pk.clone());
            }
        }
        divs = next;
    }
    divs.sort();
    Some(divs)
}

/// Exponent of the prime `p` in the nonzero integer `n`.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let bp = BigInt::from(p);
    let mut rest = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = rest.div_rem(&bp);
        if !r.is_zero() {
            return e;
        }
        rest = q;
        e += 1;
    }
}

/// Legendre symbol for an odd prime `p`: 1, `p - 1` (for -1) or 0.
pub fn legendre(a: u64, p: u64) -> u64 {
    pow_mod(a % p, (p - 1) / 2, p)
}

/// Square root of `a` modulo an odd prime `p` (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while legendre(z, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    factor_u64(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_factors() {
        assert!(is_prime(2) && is_prime(97) && !is_prime(91) && is_prime(1_000_000_007));
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factor_u64(49), vec![(7, 2)]);
        assert!(is_squarefree(5) && !is_squarefree(12));
        assert_eq!(totient(12), 4);
    }

    #[test]
    fn divisor_enumeration() {
        let d = divisors(&BigUint::from(12u32), 1000, 100).unwrap();
        let d: Vec<u32> = d.iter().map(|x| x.to_u32().unwrap()).collect();
        assert_eq!(d, vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn modular_square_roots() {
        for p in [7u64, 11, 13, 29, 41] {
            for a in 1..p {
                if let Some(r) = sqrt_mod_prime(a, p) {
                    assert_eq!(mul_mod(r, r, p), a);
                }
            }
        }
        assert!(sqrt_mod_prime(5, 7).is_none());
    }
}
