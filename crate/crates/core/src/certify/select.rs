//! Greedy choice of absolute values separating the diagonal of a
//! triangularized abelian subgroup.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, legendre, trial_factor};
use crate::error::Result;
use crate::fields::absval::{poly_adic_candidates, AbsoluteValue};
use crate::fields::logvalue::LogValue;
use crate::fields::{FieldDescriptor, FieldElement};
use crate::scalar::{Field, Rational};

use super::lattice::certified_rank;

const FACTOR_BOUND: u64 = 1 << 20;

/// One row of `V`: `log eps((a_j)_ll)` for every basis element `a_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VRow {
    /// Index into the chosen absolute values.
    pub av: usize,
    /// Diagonal position `l`.
    pub position: usize,
    pub entries: Vec<LogValue>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub absolute_values: Vec<AbsoluteValue>,
    pub rows: Vec<VRow>,
    /// Certified rank of `V`.
    pub rank: usize,
}

impl Selection {
    pub fn matrix(&self) -> Vec<Vec<LogValue>> {
        self.rows.iter().map(|r| r.entries.clone()).collect()
    }
}

/// Why no separating family was found.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionFailure {
    pub diagnosis: String,
    /// An exponent combination whose diagonal entries are all roots of unity.
    pub combination: Option<Vec<i64>>,
    pub rank: usize,
    pub tried: Vec<String>,
}

fn push_primes(n: &BigInt, out: &mut Vec<u64>) {
    let (factors, rest) = trial_factor(n.magnitude(), FACTOR_BOUND);
    out.extend(factors.into_iter().map(|(p, _)| p));
    if rest > BigUint::one() {
        if let Some(r) = rest.to_u64().filter(|&r| is_prime(r)) {
            out.push(r);
        }
    }
}

/// Candidate absolute values for the given diagonal entries, discrete kinds
/// first and archimedean ones last.
pub fn av_library(desc: &FieldDescriptor, entries: &[FieldElement]) -> Vec<AbsoluteValue> {
    let mut out = Vec::new();
    match desc {
        FieldDescriptor::Rationals => {
            let mut primes = Vec::new();
            for q in entries.iter().filter_map(FieldElement::as_rational) {
                push_primes(q.numer(), &mut primes);
                push_primes(q.denom(), &mut primes);
            }
            primes.sort_unstable();
            primes.dedup();
            out.extend(primes.into_iter().filter_map(|p| AbsoluteValue::p_adic(p).ok()));
            out.push(AbsoluteValue::archimedean());
        }
        FieldDescriptor::RealQuadratic(d) => {
            let mut primes = Vec::new();
            for z in entries.iter().filter_map(FieldElement::as_quadratic) {
                // z = (A + B sqrt d) / D, so only primes of D and of A^2 - d B^2 matter
                let den = z.a().denom() * z.b().denom();
                let scale = Rational::from_integer(den.clone());
                let a = (z.a() * &scale).to_integer();
                let b = (z.b() * &scale).to_integer();
                push_primes(&den, &mut primes);
                let norm = &a * &a - BigInt::from(*d) * &b * &b;
                if norm != BigInt::from(0) {
                    push_primes(&norm, &mut primes);
                }
            }
            primes.sort_unstable();
            primes.dedup();
            for p in primes.into_iter().filter(|&p| p != 2 && d % p != 0 && legendre(*d, p) == 1) {
                for upper in [false, true] {
                    out.extend(AbsoluteValue::quadratic_p_adic(*d, p, upper).ok());
                }
            }
            out.extend([true, false].into_iter().filter_map(|s| AbsoluteValue::embedding(*d, s).ok()));
        }
        FieldDescriptor::FunctionField { .. } => {
            for x in entries {
                for pi in poly_adic_candidates(x) {
                    if let Ok(av) = AbsoluteValue::poly_adic(&pi) {
                        if !out.contains(&av) {
                            out.push(av);
                        }
                    }
                }
            }
            out.extend(AbsoluteValue::degree(desc.clone()).ok());
        }
        FieldDescriptor::PrimeField(_) => {}
    }
    out
}

fn rows_for(av: &AbsoluteValue, diagonals: &[Vec<FieldElement>]) -> Result<Vec<Vec<LogValue>>> {
    let d = diagonals.first().map_or(0, Vec::len);
    (0..d).map(|l| diagonals.iter().map(|diag| av.log_abs(&diag[l])).collect()).collect()
}

/// `x^e = 1` with `e = 2` in characteristic zero and `p - 1` in
/// characteristic `p`; over the implemented fields this detects exactly the
/// roots of unity among constants.
fn is_root_of_unity(x: &FieldElement) -> bool {
    let p = x.descriptor().characteristic();
    let e = if p == 0 { 2 } else { p - 1 };
    x.pow(e).is_unity()
}

/// Scans the library in order and keeps every absolute value whose rows
/// raise the certified rank, until `V` has rank `m`. `diagonals[j]` holds the
/// diagonal of the triangularized `j`-th basis element.
pub fn select_absolute_values(
    desc: &FieldDescriptor,
    diagonals: &[Vec<FieldElement>],
    precision: u64,
) -> std::result::Result<Selection, SelectionFailure> {
    let m = diagonals.len();
    let entries: Vec<FieldElement> = diagonals.iter().flatten().cloned().collect();
    let library = av_library(desc, &entries);
    let scanned: Vec<(AbsoluteValue, Result<Vec<Vec<LogValue>>>)> =
        library.into_par_iter().map(|av| (av.clone(), rows_for(&av, diagonals))).collect();
    let mut sel = Selection { absolute_values: Vec::new(), rows: Vec::new(), rank: 0 };
    let mut tried = Vec::new();
    for (av, rows) in scanned {
        if sel.rank == m {
            break;
        }
        tried.push(av.to_string());
        let Ok(rows) = rows else { continue };
        if rows.iter().flatten().all(LogValue::is_zero) {
            continue;
        }
        let mut candidate = sel.matrix();
        candidate.extend(rows.iter().cloned());
        let (rank, _) = certified_rank(&candidate, precision);
        if rank > sel.rank {
            let idx = sel.absolute_values.len();
            sel.absolute_values.push(av);
            sel.rows.extend(rows.into_iter().enumerate().map(|(position, entries)| VRow { av: idx, position, entries }));
            sel.rank = rank;
        }
    }
    if sel.rank == m {
        return Ok(sel);
    }
    let (diagnosis, combination) = if entries.iter().all(FieldElement::is_unity) {
        ("no separating family: all diagonal entries are 1".to_string(), None)
    } else if let Some(j) = diagonals.iter().position(|diag| diag.iter().all(is_root_of_unity)) {
        let mut n = vec![0; m];
        n[j] = 1;
        (format!("no separating family: the diagonal entries of basis element {} are roots of unity", j + 1), Some(n))
    } else {
        (format!("library exhausted at certified rank {} of {m}; a separating absolute value may still exist", sel.rank), None)
    };
    Err(SelectionFailure { diagnosis, combination, rank: sel.rank, tried })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::absval::AvKind;

    #[test]
    fn two_and_three() {
        let q = FieldDescriptor::Rationals;
        let diags = vec![vec![FieldElement::rational(2, 1)], vec![FieldElement::rational(3, 1)]];
        let sel = select_absolute_values(&q, &diags, 64).unwrap();
        let kinds: Vec<&AvKind> = sel.absolute_values.iter().map(|a| a.kind()).collect();
        assert_eq!(kinds, vec![&AvKind::PAdic(2), &AvKind::PAdic(3)]);
        assert_eq!(sel.matrix()[0], vec![LogValue::ln_prime(2).neg(), LogValue::zero()]);
        assert_eq!(sel.matrix()[1], vec![LogValue::zero(), LogValue::ln_prime(3).neg()]);
    }

    #[test]
    fn golden_unit_needs_embeddings() {
        let d = FieldDescriptor::real_quadratic(5).unwrap();
        let phi2 = d.parse_element("(3 + sqrt(5))/2").unwrap();
        let one = FieldElement::one_in(&d);
        let sel = select_absolute_values(&d, &[vec![phi2.clone(), one]], 64).unwrap();
        assert_eq!(sel.absolute_values, vec![AbsoluteValue::embedding(5, true).unwrap()]);
        let av = &sel.absolute_values[0];
        assert_eq!(sel.rows[0].entries[0], av.log_abs(&phi2).unwrap());
    }

    #[test]
    fn unipotent_basis_fails() {
        let d = FieldDescriptor::real_quadratic(5).unwrap();
        let one = FieldElement::one_in(&d);
        let err = select_absolute_values(&d, &[vec![one.clone(), one.clone()], vec![one.clone(), one]], 64).unwrap_err();
        assert!(err.diagnosis.contains("all diagonal entries are 1"));
        let q = FieldDescriptor::Rationals;
        let err = select_absolute_values(&q, &[vec![FieldElement::rational(-1, 1)]], 64).unwrap_err();
        assert_eq!(err.combination, Some(vec![1]));
    }
}
