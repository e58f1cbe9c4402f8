//! Non-distortion certificates and their independent verification.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::absval::AbsoluteValue;
use crate::fields::interval::Interval;
use crate::fields::logvalue::LogValue;
use crate::groups::{exponent_vectors, subgroup_element, CayleyBall, Group, GroupDefinition, Word, WordLength};
use crate::matrices::triangularize_commuting;
use crate::poly::Poly;
use crate::scalar::Rational;
use crate::{FieldElement, Matrix};

use super::lattice::lattice_bound;
use super::select::{select_absolute_values, VRow};
use super::{rational_str, WitnessFunction};

/// One generator of the certified subgroup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisElement {
    pub word: String,
    pub matrix: Vec<Vec<String>>,
    /// Eigenvalues with multiplicity, read off the triangularized form.
    pub diagonal: Vec<String>,
}

/// A proof that `A = <a_1, ..., a_m>` is undistorted in `G`:
/// `l_S(a_1^n_1 ... a_m^n_m) >= (c / C) (|n_1| + ... + |n_m|)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub group: GroupDefinition,
    pub basis: Vec<BasisElement>,
    /// `P` with `P a_j P^-1` upper triangular.
    pub change_of_basis: Vec<Vec<String>>,
    pub absolute_values: Vec<AbsoluteValue>,
    pub v: Vec<VRow>,
    /// Rows of `V` whose square submatrix is inverted.
    pub chosen_rows: Vec<usize>,
    pub w: Vec<Vec<Interval>>,
    pub w_abs_sum: Interval,
    /// Certified lower bound on `c`.
    #[serde(with = "rational_str")]
    pub c: Rational,
    pub c_exact: Option<LogValue>,
    /// `f(s)` for each generator `s` (equal to `f(s^-1)`).
    pub generator_f: Vec<(String, LogValue)>,
    /// Certified upper bound on `C = max f(s^{+-1})`.
    #[serde(rename = "C", with = "rational_str")]
    pub big_c: Rational,
    #[serde(rename = "C_exact")]
    pub big_c_exact: Option<LogValue>,
    /// Certified lower bound on `c / C`.
    #[serde(with = "rational_str")]
    pub ratio: Rational,
    pub ratio_exact: Option<String>,
    pub precision: u64,
    pub statement: String,
}

impl Certificate {
    pub fn rebuild_group(&self) -> Result<Group> {
        self.group.build()
    }

    pub fn witness_function(&self) -> WitnessFunction {
        WitnessFunction::new(self.absolute_values.clone(), self.precision)
    }

    pub fn basis_matrices(&self) -> Result<Vec<Matrix>> {
        self.basis.iter().map(|b| Matrix::parse(&self.group.field, &b.matrix)).collect()
    }

    pub fn v_matrix(&self) -> Vec<Vec<LogValue>> {
        self.v.iter().map(|r| r.entries.clone()).collect()
    }

    /// The strongest form of `c` on record.
    fn c_value(&self) -> LogValue {
        self.c_exact.clone().unwrap_or_else(|| LogValue::constant(self.c.clone()))
    }

    fn big_c_value(&self) -> LogValue {
        self.big_c_exact.clone().unwrap_or_else(|| LogValue::constant(self.big_c.clone()))
    }

    /// `ratio`, or the exact ratio when both constants are exact multiples.
    pub fn ratio_value(&self) -> Rational {
        self.ratio_exact.as_deref().and_then(|r| r.parse().ok()).unwrap_or_else(|| self.ratio.clone())
    }

    /// Doubles `c`; used to check that verification notices a wrong bound.
    pub fn with_scaled_c(&self, k: i64) -> Certificate {
        let k = Rational::from_integer(k.into());
        let mut out = self.clone();
        out.c = &self.c * &k;
        out.c_exact = self.c_exact.as_ref().map(|c| c.scale(&k));
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureStage {
    Input,
    Triangularize,
    SelectAbsoluteValues,
    LatticeBound,
    Constants,
}

impl fmt::Display for FailureStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureStage::Input => "input",
            FailureStage::Triangularize => "triangularize",
            FailureStage::SelectAbsoluteValues => "select-absolute-values",
            FailureStage::LatticeBound => "lattice-bound",
            FailureStage::Constants => "constants",
        })
    }
}

/// A structured failure to certify. It is never a proof of distortion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifyFailure {
    pub stage: FailureStage,
    pub reason: String,
    pub combination: Option<Vec<i64>>,
    pub tried: Vec<String>,
    pub note: String,
}

const NOT_A_PROOF: &str = "failure to certify is not a proof of distortion";

impl CertifyFailure {
    fn new(stage: FailureStage, reason: impl Into<String>) -> Self {
        CertifyFailure { stage, reason: reason.into(), combination: None, tried: Vec::new(), note: NOT_A_PROOF.into() }
    }
}

impl fmt::Display for CertifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "certification failed at {}: {} ({})", self.stage, self.reason, self.note)
    }
}

fn char_poly_of(eigenvalues: &[FieldElement], desc: &crate::FieldDescriptor) -> Poly<FieldElement> {
    eigenvalues.iter().fold(Poly::one(desc), |acc, l| acc.mul(&Poly::linear(l)))
}

/// Runs triangularization, absolute-value selection, the lattice bound and
/// the generator constant for the subgroup spanned by `basis`.
/// An empty basis gives the vacuous certificate.
pub fn certify_undistorted(
    group: &Group,
    basis: &[Word],
    precision: u64,
) -> std::result::Result<Certificate, CertifyFailure> {
    let input = |e: Error| CertifyFailure::new(FailureStage::Input, e.to_string());
    let desc = group.descriptor().clone();
    let mats: Vec<Matrix> = basis.iter().map(|w| group.evaluate_word(w)).collect::<Result<_>>().map_err(input)?;
    let max_prec = (precision * 4).max(256);
    let (p, diagonals) = if mats.is_empty() {
        (Matrix::identity(group.dim(), &desc), Vec::new())
    } else {
        let tf = triangularize_commuting(&mats)
            .map_err(|e| CertifyFailure::new(FailureStage::Triangularize, e.to_string()))?;
        (tf.change_of_basis().clone(), tf.diagonals())
    };
    let (avs, v_rows, lb) = if mats.is_empty() {
        (Vec::new(), Vec::new(), None)
    } else {
        let sel = select_absolute_values(&desc, &diagonals, precision).map_err(|f| CertifyFailure {
            stage: FailureStage::SelectAbsoluteValues,
            reason: f.diagnosis,
            combination: f.combination,
            tried: f.tried,
            note: NOT_A_PROOF.into(),
        })?;
        let lb = lattice_bound(&sel.matrix(), precision)
            .map_err(|e| CertifyFailure::new(FailureStage::LatticeBound, e.to_string()))?;
        (sel.absolute_values, sel.rows, Some(lb))
    };
    let wf = WitnessFunction::new(avs.clone(), precision);
    let mut generator_f = Vec::new();
    for (label, g) in group.labels().iter().zip(group.generators()) {
        let f = wf.value(g).map_err(|e| CertifyFailure::new(FailureStage::Constants, e.to_string()))?;
        generator_f.push((label.clone(), f));
    }
    let mut big_c_exact = Some(LogValue::zero());
    let mut big_c = Rational::zero();
    for (_, f) in &generator_f {
        big_c_exact = big_c_exact.and_then(|c| c.max(f, max_prec));
        big_c = big_c.max(f.enclose(precision).round_outward(precision + 2).hi().clone());
    }
    if let Some(c) = &big_c_exact {
        if c.is_rational() {
            big_c = c.constant_part().clone();
        }
    }
    let (c, c_exact, chosen_rows, w, w_abs_sum) = match &lb {
        Some(lb) => (lb.c.clone(), lb.c_exact.clone(), lb.rows.clone(), lb.w.clone(), lb.w_abs_sum.clone()),
        None => (Rational::from_integer(1.into()), None, Vec::new(), Vec::new(), Interval::zero()),
    };
    if !mats.is_empty() && big_c_exact.as_ref().map_or(big_c.is_zero(), |c| c.is_zero()) {
        return Err(CertifyFailure::new(FailureStage::Constants, "f vanishes on every generator"));
    }
    let (ratio, ratio_exact) = if mats.is_empty() {
        (Rational::zero(), None)
    } else {
        let exact = match (&c_exact, &big_c_exact) {
            (Some(c), Some(cc)) => c.ratio(cc),
            _ => None,
        };
        (exact.clone().unwrap_or_else(|| &c / &big_c), exact)
    };
    let words: Vec<String> = basis.iter().map(|w| group.format_word(w)).collect();
    let statement = if mats.is_empty() {
        "trivial subgroup: nothing to prove".to_string()
    } else {
        let ns: Vec<String> = (1..=words.len()).map(|i| format!("|n_{i}|")).collect();
        let shown = ratio_exact.as_ref().map_or_else(|| format!(">= {:.6}", crate::fields::logvalue::approx(&ratio)), |r| r.to_string());
        format!(
            "l_S({}) >= (c/C) ({}) with c/C {}",
            words.iter().enumerate().map(|(i, w)| format!("({w})^n_{}", i + 1)).collect::<Vec<_>>().join(" "),
            ns.join(" + "),
            shown
        )
    };
    Ok(Certificate {
        group: group.definition(),
        basis: words
            .into_iter()
            .zip(&mats)
            .enumerate()
            .map(|(j, (word, m))| BasisElement {
                word,
                matrix: m.string_rows(),
                diagonal: diagonals[j].iter().map(|x| x.to_string()).collect(),
            })
            .collect(),
        change_of_basis: p.string_rows(),
        absolute_values: avs,
        v: v_rows,
        chosen_rows,
        w,
        w_abs_sum,
        c,
        c_exact,
        generator_f,
        big_c,
        big_c_exact,
        ratio,
        ratio_exact: ratio_exact.map(|r| r.to_string()),
        precision,
        statement,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckOutcome {
    Holds,
    Violated,
    /// Nothing violated, but some comparisons were undecided at the precision cap.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub violated: usize,
    pub undecided: usize,
    pub first_violation: Option<String>,
    pub outcome: CheckOutcome,
}

impl CheckReport {
    fn from_results(name: &str, results: Vec<(Option<bool>, String)>) -> Self {
        let checked = results.len();
        let violated = results.iter().filter(|(ok, _)| *ok == Some(false)).count();
        let undecided = results.iter().filter(|(ok, _)| ok.is_none()).count();
        let first_violation = results.into_iter().find(|(ok, _)| *ok == Some(false)).map(|(_, what)| what);
        let outcome = if violated > 0 {
            CheckOutcome::Violated
        } else if undecided > 0 {
            CheckOutcome::Inconclusive
        } else {
            CheckOutcome::Holds
        };
        CheckReport { name: name.into(), checked, violated, undecided, first_violation, outcome }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub radius: u32,
    pub ball_size: usize,
    pub ball_complete: bool,
    pub precision: u64,
    pub checks: Vec<CheckReport>,
    /// No check was violated.
    pub valid: bool,
    /// Every comparison was decided.
    pub conclusive: bool,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Exponent vectors with `||n||_1 <= range` are checked against `c`.
    pub range: u64,
    /// Random ball pairs for the subadditivity check.
    pub pairs: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { range: 20, pairs: 1000, seed: 0 }
    }
}

/// `lhs <= rhs`, `None` when undecided.
fn le(lhs: &LogValue, rhs: &LogValue, max_prec: u64) -> Option<bool> {
    lhs.compare(rhs, max_prec).map(|o| o != Ordering::Greater)
}

fn q(n: u64) -> Rational {
    Rational::from_integer(n.into())
}

/// Rechecks a certificate from scratch against a ball of its group:
/// consistency of `V`, `W`, `c` and `C` with the recorded data, then
/// (a) `f(g) <= C l_S(g)` on the ball, (b) `f(a(n)) >= c ||n||_1` for
/// `||n||_1 <= range`, (c) subadditivity on random ball pairs and
/// (d) `l_S(a(n)) >= ceil((c/C) ||n||_1)` for subgroup elements in the ball.
pub fn verify_certificate(cert: &Certificate, ball: &CayleyBall<FieldElement>, opts: &VerifyOptions) -> Result<VerificationReport> {
    let group = cert.rebuild_group()?;
    let desc = group.descriptor().clone();
    if ball.iter().next().is_some_and(|(m, _)| m.dim() != group.dim() || m.descriptor() != &desc) {
        return Err(Error::DimensionMismatch("the ball does not belong to the certificate's group".into()));
    }
    if ball.completed_radius() >= 1 && group.generators().iter().any(|g| !ball.contains(g)) {
        return Err(Error::InvalidParameter("the ball does not belong to the certificate's group".into()));
    }
    let wf = cert.witness_function();
    let max_prec = (cert.precision * 4).max(256);
    let mats = cert.basis_matrices()?;
    let mut checks = Vec::new();

    // consistency
    let mut consistency = Vec::new();
    for (b, m) in cert.basis.iter().zip(&mats) {
        let word = group.parse_word(&b.word)?;
        consistency.push((Some(group.evaluate_word(&word)? == *m), format!("basis word {} evaluates to its matrix", b.word)));
        let eig: Vec<FieldElement> = b.diagonal.iter().map(|s| desc.parse_element(s)).collect::<Result<_>>()?;
        consistency.push((Some(char_poly_of(&eig, &desc) == m.char_poly()), format!("diagonal of {} is its spectrum", b.word)));
    }
    for (i, row) in cert.v.iter().enumerate() {
        let av = cert.absolute_values.get(row.av).ok_or(Error::IndexOutOfRange(row.av))?;
        for (j, b) in cert.basis.iter().enumerate() {
            let lam = desc.parse_element(b.diagonal.get(row.position).ok_or(Error::IndexOutOfRange(row.position))?)?;
            let ok = row.entries.get(j) == Some(&av.log_abs(&lam)?);
            consistency.push((Some(ok), format!("V[{i}][{j}] = log {av}({lam})")));
        }
    }
    if !mats.is_empty() {
        let v = cert.v_matrix();
        let m = mats.len();
        let sub: Vec<Vec<Interval>> = cert
            .chosen_rows
            .iter()
            .map(|&r| v.get(r).map(|row| row.iter().map(|x| x.enclose(cert.precision)).collect()).ok_or(Error::IndexOutOfRange(r)))
            .collect::<Result<_>>()?;
        let mut inverse_ok = sub.len() == m && cert.w.len() == m;
        if inverse_ok {
            for i in 0..m {
                for j in 0..m {
                    let entry = (0..m).fold(Interval::zero(), |acc, k| acc.add(&cert.w[i][k].mul(&sub[k][j])));
                    inverse_ok &= entry.contains(&q(u64::from(i == j)));
                }
            }
        }
        consistency.push((Some(inverse_ok), "W V_chosen contains the identity".into()));
        let sum = cert.w.iter().flatten().fold(Interval::zero(), |acc, x| acc.add(&x.abs()));
        consistency.push((
            Some(cert.c.is_positive() && &cert.c * sum.hi() <= q(1)),
            "0 < c <= 1 / sum |W_ij|".into(),
        ));
        if let Some(ce) = &cert.c_exact {
            consistency.push((le(&LogValue::constant(cert.c.clone()), ce, max_prec), "c <= c_exact".into()));
            if m == 1 {
                let best = cert.chosen_rows.first().and_then(|&r| v.get(r)).map(|row| row[0].clone());
                let ok = best.map(|b| super::lattice::abs_exact(&b, max_prec) == Some(ce.clone()));
                consistency.push((ok.filter(|&o| o), "c_exact = |V[row][0]|".into()));
            }
        }
    }
    for (label, g) in group.labels().iter().zip(group.generators()) {
        let f = wf.value(g)?;
        consistency.push((le(&f, &LogValue::constant(cert.big_c.clone()), max_prec), format!("f({label}) <= C")));
        if let Some(ce) = &cert.big_c_exact {
            consistency.push((le(&f, ce, max_prec), format!("f({label}) <= C_exact")));
        }
    }
    if !mats.is_empty() {
        let ratio = cert.ratio_value();
        let decided = cert.c_value().compare(&cert.big_c_value().scale(&ratio), max_prec);
        consistency.push((decided.map(|o| o != Ordering::Less), "c/C >= ratio".into()));
    }
    checks.push(CheckReport::from_results("consistency", consistency));

    // (a)
    let big_c = cert.big_c_value();
    let a: Vec<(Option<bool>, String)> = (0..ball.len())
        .into_par_iter()
        .map(|i| {
            let (g, len) = ball.element(i).expect("in range");
            match wf.value(g) {
                Ok(f) => (le(&f, &big_c.scale(&q(len as u64)), max_prec), format!("f(g) > C * {len} for g = {g}")),
                Err(e) => (Some(false), e.to_string()),
            }
        })
        .collect();
    checks.push(CheckReport::from_results("upper-bound", a));

    // (b)
    let c = cert.c_value();
    let exps = exponent_vectors(mats.len(), if mats.is_empty() { 0 } else { opts.range });
    let b: Vec<(Option<bool>, String)> = exps
        .par_iter()
        .map(|n| {
            let l1: u64 = n.iter().map(|x| x.unsigned_abs()).sum();
            let el = if mats.is_empty() { Ok(group.identity()) } else { subgroup_element(&mats, n) };
            match el.and_then(|el| wf.value(&el)) {
                Ok(f) => (le(&c.scale(&q(l1)), &f, max_prec), format!("f(a^{n:?}) < c * {l1}")),
                Err(e) => (Some(false), e.to_string()),
            }
        })
        .collect();
    checks.push(CheckReport::from_results("lower-bound", b));

    // (c)
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pairs: Vec<(usize, usize)> =
        (0..opts.pairs).map(|_| (rng.gen_range(0..ball.len()), rng.gen_range(0..ball.len()))).collect();
    let c_res: Vec<(Option<bool>, String)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (g, _) = ball.element(i).expect("in range");
            let (h, _) = ball.element(j).expect("in range");
            match (wf.value(&g.mul(h)), wf.value(g), wf.value(h)) {
                (Ok(fgh), Ok(fg), Ok(fh)) => (le(&fgh, &fg.add(&fh), max_prec), format!("f(gh) > f(g) + f(h) for g = {g}, h = {h}")),
                _ => (Some(false), "f failed to evaluate".into()),
            }
        })
        .collect();
    checks.push(CheckReport::from_results("subadditivity", c_res));

    // (d)
    let ratio = cert.ratio_value();
    let d_res: Vec<(Option<bool>, String)> = exps
        .par_iter()
        .filter_map(|n| {
            let el = if mats.is_empty() { group.identity() } else { subgroup_element(&mats, n).ok()? };
            let WordLength::Exact(len) = ball.length(&el) else { return None };
            let l1: u64 = n.iter().map(|x| x.unsigned_abs()).sum();
            let need = (&ratio * q(l1)).ceil();
            Some((Some(q(len as u64) >= need), format!("l_S(a^{n:?}) = {len} < {need}")))
        })
        .collect();
    checks.push(CheckReport::from_results("word-length", d_res));

    let valid = checks.iter().all(|c| c.outcome != CheckOutcome::Violated);
    let conclusive = checks.iter().all(|c| c.outcome == CheckOutcome::Holds);
    Ok(VerificationReport {
        radius: ball.completed_radius(),
        ball_size: ball.len(),
        ball_complete: ball.is_complete(),
        precision: cert.precision,
        checks,
        valid,
        conclusive,
    })
}
