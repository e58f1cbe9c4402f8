//! Certified rank and the left-inverse lower bound `||Vn||_inf >= c ||n||_1`.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::interval::Interval;
use crate::fields::logvalue::LogValue;
use crate::scalar::Rational;

use super::rational_str;

/// Doublings of the working precision tried before giving up.
const RETRIES: u32 = 3;

pub(crate) fn enclose_rows(v: &[Vec<LogValue>], precision: u64) -> Vec<Vec<Interval>> {
    v.iter().map(|row| row.iter().map(|x| x.enclose(precision)).collect()).collect()
}

/// Smallest absolute value in an interval that excludes zero.
fn magnitude(x: &Interval) -> Option<Rational> {
    match x.sign()? {
        Ordering::Greater => Some(x.lo().clone()),
        Ordering::Less => Some(-x.hi().clone()),
        Ordering::Equal => None,
    }
}

/// Interval Gaussian elimination with full pivoting. Returns the pivot
/// `(row, column)` pairs; their count is a certified lower bound on the rank.
pub(crate) fn certified_pivots(mut a: Vec<Vec<Interval>>, bits: u64) -> Vec<(usize, usize)> {
    let cols = a.first().map_or(0, Vec::len);
    let mut row_used = vec![false; a.len()];
    let mut col_used = vec![false; cols];
    let mut pivots = Vec::new();
    loop {
        let mut best: Option<(Rational, usize, usize)> = None;
        for (r, row) in a.iter().enumerate().filter(|(r, _)| !row_used[*r]) {
            for (c, x) in row.iter().enumerate().filter(|(c, _)| !col_used[*c]) {
                if let Some(m) = magnitude(x) {
                    if best.as_ref().is_none_or(|(b, _, _)| m > *b) {
                        best = Some((m, r, c));
                    }
                }
            }
        }
        let Some((_, pr, pc)) = best else { break };
        row_used[pr] = true;
        col_used[pc] = true;
        pivots.push((pr, pc));
        let inv = a[pr][pc].recip().expect("pivot excludes zero");
        let pivot_row = a[pr].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if row_used[r] || (row[pc].is_point() && row[pc].lo().is_zero()) {
                continue;
            }
            let factor = row[pc].mul(&inv);
            for c in 0..cols {
                if !col_used[c] {
                    row[c] = row[c].sub(&factor.mul(&pivot_row[c])).round_outward(bits);
                }
            }
        }
    }
    pivots
}

/// Certified rank of `v` with the rows realising it, refining the precision
/// up to `RETRIES` doublings.
pub(crate) fn certified_rank(v: &[Vec<LogValue>], precision: u64) -> (usize, Vec<usize>) {
    let cols = v.first().map_or(0, Vec::len);
    let mut best: Vec<(usize, usize)> = Vec::new();
    let mut prec = precision;
    for _ in 0..=RETRIES {
        let pivots = certified_pivots(enclose_rows(v, prec), prec + 16);
        if pivots.len() > best.len() {
            best = pivots;
        }
        if best.len() == cols.min(v.len()) {
            break;
        }
        prec *= 2;
    }
    (best.len(), best.into_iter().map(|(r, _)| r).collect())
}

/// Interval inverse of a square interval matrix by Gauss-Jordan elimination.
fn interval_inverse(b: &[Vec<Interval>], bits: u64) -> Option<Vec<Vec<Interval>>> {
    let m = b.len();
    let one = Interval::point(Rational::from_integer(1.into()));
    let mut aug: Vec<Vec<Interval>> = b
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..m).map(|j| if i == j { one.clone() } else { Interval::zero() }));
            r
        })
        .collect();
    for col in 0..m {
        let (pr, _) = (col..m)
            .filter_map(|r| magnitude(&aug[r][col]).map(|mag| (r, mag)))
            .max_by(|x, y| x.1.cmp(&y.1))?;
        aug.swap(col, pr);
        let inv = aug[col][col].recip()?;
        aug[col] = aug[col].iter().map(|x| x.mul(&inv).round_outward(bits)).collect();
        let pivot_row = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r == col {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x = x.sub(&factor.mul(p)).round_outward(bits);
            }
        }
    }
    Some(aug.into_iter().map(|row| row[m..].to_vec()).collect())
}

/// A left inverse `W` of an invertible row submatrix of `V` and the constant
/// `c = 1 / sum |W_ij|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeBound {
    /// Indices of the rows of `V` forming the invertible submatrix.
    pub rows: Vec<usize>,
    pub w: Vec<Vec<Interval>>,
    pub w_abs_sum: Interval,
    /// Certified lower bound for `c`.
    #[serde(with = "rational_str")]
    pub c: Rational,
    /// `c` exactly, in the rank-one case.
    pub c_exact: Option<LogValue>,
    pub precision: u64,
}

/// Chooses `m` rows of `V` (`m` = number of columns) with a certified
/// invertible submatrix and bounds `||Vn||_inf >= c ||n||_1` through its
/// interval inverse.
pub fn lattice_bound(v: &[Vec<LogValue>], precision: u64) -> Result<LatticeBound> {
    let m = v.first().map_or(0, Vec::len);
    if m == 0 || v.iter().any(|r| r.len() != m) {
        return Err(Error::DimensionMismatch("V must be a nonempty matrix with equal row lengths".into()));
    }
    let mut prec = precision;
    let mut rank = 0;
    for _ in 0..=RETRIES {
        let pivots = certified_pivots(enclose_rows(v, prec), prec + 16);
        rank = rank.max(pivots.len());
        if pivots.len() == m {
            let mut rows: Vec<usize> = pivots.into_iter().map(|(r, _)| r).collect();
            rows.sort_unstable();
            let sub: Vec<Vec<Interval>> = rows.iter().map(|&r| v[r].iter().map(|x| x.enclose(prec)).collect()).collect();
            if let Some(w) = interval_inverse(&sub, prec + 16) {
                let w_abs_sum = w.iter().flatten().fold(Interval::zero(), |acc, x| acc.add(&x.abs()));
                if w_abs_sum.hi().is_positive() {
                    let c = w_abs_sum.hi().recip();
                    let c_exact = (m == 1).then(|| abs_exact(&v[rows[0]][0], prec * 4)).flatten();
                    return Ok(LatticeBound { rows, w, w_abs_sum, c, c_exact, precision: prec });
                }
            }
        }
        prec *= 2;
    }
    if rank < m {
        Err(Error::RankDeficient(format!("certified rank {rank} of {m} at {prec} bits")))
    } else {
        Err(Error::PrecisionExhausted(format!("interval inverse too wide at {prec} bits")))
    }
}

/// `|x|` when the sign of `x` is decided.
pub(crate) fn abs_exact(x: &LogValue, max_prec: u64) -> Option<LogValue> {
    match x.sign(max_prec)? {
        Ordering::Less => Some(x.neg()),
        _ => Some(x.clone()),
    }
}

/// `V n` for an integer vector `n`, exactly.
pub fn apply(v: &[Vec<LogValue>], n: &[i64]) -> Vec<LogValue> {
    v.iter()
        .map(|row| {
            row.iter()
                .zip(n)
                .fold(LogValue::zero(), |acc, (x, &k)| acc.add(&x.scale(&Rational::from_integer(k.into()))))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln(p: u64) -> LogValue {
        LogValue::ln_prime(p)
    }

    #[test]
    fn diagonal_logs() {
        let v = vec![vec![ln(2).neg(), LogValue::zero()], vec![LogValue::zero(), ln(3).neg()]];
        let b = lattice_bound(&v, 64).unwrap();
        assert_eq!(b.rows, vec![0, 1]);
        // 1 / (1/ln 2 + 1/ln 3) = 0.4250012...
        let lo = Rational::new(425001.into(), 1000000.into());
        let hi = Rational::new(425002.into(), 1000000.into());
        assert!(b.c > lo && b.c < hi, "{}", b.c);
        assert!(b.c_exact.is_none());
    }

    #[test]
    fn rank_one_is_exact() {
        let v = vec![vec![LogValue::from_integer(1)], vec![LogValue::from_integer(1)]];
        let b = lattice_bound(&v, 64).unwrap();
        assert_eq!(b.c, Rational::from_integer(1.into()));
        assert_eq!(b.c_exact, Some(LogValue::from_integer(1)));
        let v = vec![vec![ln(2).neg()], vec![LogValue::zero()]];
        let b = lattice_bound(&v, 64).unwrap();
        assert_eq!(b.rows, vec![0]);
        assert_eq!(b.c_exact, Some(ln(2)));
    }

    #[test]
    fn rank_deficient() {
        let v = vec![vec![ln(2), ln(2).scale(&Rational::from_integer(2.into()))]];
        assert!(matches!(lattice_bound(&v, 64), Err(Error::RankDeficient(_))));
        let v = vec![vec![LogValue::zero()]];
        assert!(matches!(lattice_bound(&v, 64), Err(Error::RankDeficient(_))));
    }
}
