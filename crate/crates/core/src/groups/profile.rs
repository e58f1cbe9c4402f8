//! Distortion profiles of abelian subgroups and translation-length estimates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrices::SquareMatrix;
use crate::scalar::Field;

use super::{CayleyBall, MatrixGroup, Word, WordLength};

/// What is known about `l_S(a(n))` for one exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    pub exponents: Vec<i64>,
    pub l1: u64,
    /// Exact word length from the ball.
    pub exact: Option<u32>,
    /// The element is outside the ball, so its length exceeds this radius.
    pub greater_than: Option<u32>,
    /// Length of a verified identity word for the element.
    pub upper: Option<u32>,
    pub upper_word: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "value", rename_all = "kebab-case")]
pub enum ProfileStatus {
    Exact(u32),
    Upper(u32),
    GreaterThan(u32),
    NotInGroup,
}

impl ProfileRow {
    pub fn status(&self) -> ProfileStatus {
        match (self.exact, self.upper, self.greater_than) {
            (Some(n), _, _) => ProfileStatus::Exact(n),
            (None, Some(u), _) => ProfileStatus::Upper(u),
            (None, None, Some(r)) => ProfileStatus::GreaterThan(r),
            (None, None, None) => ProfileStatus::NotInGroup,
        }
    }

    /// Best known upper bound on the word length.
    pub fn best_upper(&self) -> Option<u32> {
        self.exact.or(self.upper)
    }
}

/// Word lengths of subgroup elements `a_1^n_1 ... a_m^n_m`.
#[derive(Clone, Debug, Serialize)]
pub struct DistortionProfile {
    pub basis: Vec<String>,
    pub radius: u32,
    pub range: u64,
    pub rows: Vec<ProfileRow>,
}

impl DistortionProfile {
    pub fn row(&self, exponents: &[i64]) -> Option<&ProfileRow> {
        self.rows.iter().find(|r| r.exponents == exponents)
    }

    /// Largest observed `||n||_1 / l_S(a(n))` using exact values or upper
    /// bounds (each gives a valid lower bound on the true ratio), with the
    /// row attaining it.
    pub fn max_ratio(&self) -> Option<(f64, &ProfileRow)> {
        self.rows
            .iter()
            .filter_map(|r| r.best_upper().filter(|&u| u > 0).map(|u| (r.l1 as f64 / u as f64, r)))
            .max_by(|a, b| a.0.total_cmp(&b.0))
    }

    /// CSV with columns `exponents..., l1, status, value`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = self.basis.iter().map(|b| format!("n_{b}")).collect();
        header.extend(["l1", "status", "value"].map(String::from));
        w.write_record(&header).map_err(csv_err)?;
        for row in &self.rows {
            let mut rec: Vec<String> = row.exponents.iter().map(|n| n.to_string()).collect();
            rec.push(row.l1.to_string());
            let (status, value) = match row.status() {
                ProfileStatus::Exact(n) => ("exact", n.to_string()),
                ProfileStatus::Upper(n) => ("upper", n.to_string()),
                ProfileStatus::GreaterThan(r) => ("greater-than", r.to_string()),
                ProfileStatus::NotInGroup => ("not-in-group", String::new()),
            };
            rec.push(status.into());
            rec.push(value);
            w.write_record(&rec).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidParameter(format!("csv: {e}"))
}

/// Exponent vectors of dimension `m` with `||n||_1 <= n_max`, ordered by
/// `l1` then lexicographically.
pub fn exponent_vectors(m: usize, n_max: u64) -> Vec<Vec<i64>> {
    fn rec(m: usize, budget: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == m {
            out.push(prefix.clone());
            return;
        }
        for v in -budget..=budget {
            prefix.push(v);
            rec(m, budget - v.abs(), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, n_max as i64, &mut Vec::new(), &mut out);
    out.sort_by_key(|v| (v.iter().map(|x| x.unsigned_abs()).sum::<u64>(), v.clone()));
    out
}

/// `a_1^n_1 ... a_m^n_m`.
pub fn subgroup_element<S: Field>(basis: &[SquareMatrix<S>], exponents: &[i64]) -> Result<SquareMatrix<S>> {
    let first = basis.first().ok_or_else(|| Error::InvalidParameter("empty basis".into()))?;
    let mut acc = SquareMatrix::identity(first.dim(), first.ctx());
    for (a, &n) in basis.iter().zip(exponents) {
        acc = acc.mul(&a.pow_signed(n).ok_or(Error::NotInvertible)?);
    }
    Ok(acc)
}

/// Profile of the abelian subgroup with the given basis over all exponent
/// vectors with `||n||_1 <= range`, merged with upper bounds from identity
/// words `(n, w)`, each checked to evaluate to `a(n)`.
pub fn distortion_profile<S: Field>(
    group: &MatrixGroup<S>,
    basis: &[(String, SquareMatrix<S>)],
    range: u64,
    ball: &CayleyBall<S>,
    identities: &[(Vec<i64>, Word)],
) -> Result<DistortionProfile> {
    let mats: Vec<SquareMatrix<S>> = basis.iter().map(|(_, m)| m.clone()).collect();
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            if !mats[i].commutes_with(&mats[j]) {
                return Err(Error::NonCommuting(format!("{} and {}", basis[i].0, basis[j].0)));
            }
        }
    }
    let make_row = |exponents: Vec<i64>| -> Result<ProfileRow> {
        let el = subgroup_element(&mats, &exponents)?;
        let l1 = exponents.iter().map(|x| x.unsigned_abs()).sum();
        let (exact, greater_than) = match ball.length(&el) {
            WordLength::Exact(n) => (Some(n), None),
            WordLength::GreaterThan(r) => (None, Some(r)),
            WordLength::NotInGroup => (None, None),
        };
        Ok(ProfileRow { exponents, l1, exact, greater_than, upper: None, upper_word: None })
    };
    let mut rows = exponent_vectors(mats.len(), range).into_iter().map(make_row).collect::<Result<Vec<_>>>()?;
    for (n, w) in identities {
        if n.len() != mats.len() {
            return Err(Error::DimensionMismatch(format!("exponent vector {n:?} for a rank {} basis", mats.len())));
        }
        let target = subgroup_element(&mats, n)?;
        if group.evaluate_word(w)? != target {
            return Err(Error::IdentityFailure(format!("{} does not evaluate to a^{n:?}", group.format_word(w))));
        }
        let pos = match rows.iter().position(|r| &r.exponents == n) {
            Some(p) => p,
            None => {
                rows.push(make_row(n.clone())?);
                rows.len() - 1
            }
        };
        let row = &mut rows[pos];
        if row.upper.is_none_or(|u| (w.len() as u32) < u) {
            row.upper = Some(w.len() as u32);
            row.upper_word = Some(group.format_word(w));
        }
    }
    Ok(DistortionProfile {
        basis: basis.iter().map(|(l, _)| l.clone()).collect(),
        radius: ball.completed_radius(),
        range,
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TranslationSample {
    pub n: u64,
    pub length: u32,
    /// `l_S(g^n) / n`.
    pub ratio: f64,
    /// `min_{k <= n} l_S(g^k) / k`, non-increasing in `n`.
    pub running_min: f64,
}

/// Samples of `l_S(g^n) / n`; the running minimum estimates the
/// translation length from above.
#[derive(Clone, Debug, Serialize)]
pub struct TranslationEstimate {
    pub radius: u32,
    pub samples: Vec<TranslationSample>,
    pub caveat: String,
}

impl TranslationEstimate {
    pub fn estimate(&self) -> Option<f64> {
        self.samples.last().map(|s| s.running_min)
    }
}

/// `l_S(g^n)/n` for every `n <= max_n` with `g^n` in the ball.
pub fn translation_length_estimate<S: Field>(
    g: &SquareMatrix<S>,
    ball: &CayleyBall<S>,
    max_n: u64,
) -> Result<TranslationEstimate> {
    if !ball.contains(g) {
        return Err(Error::InvalidParameter(format!("{g} is not in the ball of radius {}", ball.completed_radius())));
    }
    let mut samples = Vec::new();
    let mut power = g.clone();
    let mut best = f64::INFINITY;
    for n in 1..=max_n {
        if let WordLength::Exact(length) = ball.length(&power) {
            let ratio = length as f64 / n as f64;
            best = best.min(ratio);
            samples.push(TranslationSample { n, length, ratio, running_min: best });
        }
        power = power.mul(g);
    }
    Ok(TranslationEstimate {
        radius: ball.completed_radius(),
        samples,
        caveat: format!("estimate from radius {}", ball.completed_radius()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldDescriptor;
    use crate::groups::{bfs_ball, Group};
    use crate::Matrix;

    #[test]
    fn exponent_vector_counts() {
        assert_eq!(exponent_vectors(1, 3).len(), 7);
        assert_eq!(exponent_vectors(2, 2).len(), 13);
        assert_eq!(exponent_vectors(2, 2)[0], vec![0, 0]);
    }

    #[test]
    fn free_abelian_baseline() {
        let q = FieldDescriptor::Rationals;
        let a = Matrix::from_ints(&q, &[&[2, 0], &[0, 1]]);
        let b = Matrix::from_ints(&q, &[&[3, 0], &[0, 1]]);
        let g = Group::new(vec![("a".into(), a.clone()), ("b".into(), b.clone())]).unwrap();
        let ball = bfs_ball(&g, 6, usize::MAX);
        let prof = distortion_profile(&g, &[("a".into(), a.clone()), ("b".into(), b)], 6, &ball, &[]).unwrap();
        for row in &prof.rows {
            assert_eq!(row.exact, Some(row.l1 as u32));
        }
        let est = translation_length_estimate(&a, &ball, 6).unwrap();
        assert!(est.samples.iter().all(|s| s.ratio == 1.0));
        let csv = prof.to_csv().unwrap();
        assert!(csv.starts_with("n_a,n_b,l1,status,value\n"));
    }

    #[test]
    fn identity_words_are_checked() {
        let q = FieldDescriptor::Rationals;
        let a = Matrix::from_ints(&q, &[&[1, 1], &[0, 1]]);
        let t = Matrix::from_ints(&q, &[&[2, 0], &[0, 1]]);
        let g = Group::new(vec![("a".into(), a.clone()), ("t".into(), t)]).unwrap();
        let ball = bfs_ball(&g, 3, usize::MAX);
        let good = g.parse_word("t^3 a t^-3").unwrap();
        let prof = distortion_profile(&g, &[("a".into(), a.clone())], 2, &ball, &[(vec![8], good)]).unwrap();
        assert_eq!(prof.row(&[8]).unwrap().upper, Some(7));
        let bad = g.parse_word("t^3 a t^-2").unwrap();
        assert!(matches!(
            distortion_profile(&g, &[("a".into(), a)], 2, &ball, &[(vec![8], bad)]),
            Err(Error::IdentityFailure(_))
        ));
    }
}
