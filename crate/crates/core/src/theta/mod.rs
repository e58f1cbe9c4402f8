//! The subdeterminant homomorphism `theta` attached to a central abelian
//! subgroup, kernel audits, and ball-scale splitting witnesses.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{lattice_bound, select_absolute_values, VRow};
use crate::error::{Error, Result};
use crate::fields::absval::AbsoluteValue;
use crate::fields::interval::Interval;
use crate::fields::logvalue::LogValue;
use crate::fields::FieldElement;
use crate::groups::{exponent_vectors, subgroup_element};
use crate::matrices::{block_determinants, central_block_split, BlockDecomposition, ElementOrder};
use crate::scalar::{Field, Rational};
use crate::{Ball, Group, Matrix};

/// Precision doublings tried for an undecided exponent extraction.
const RETRIES: u32 = 3;

/// `g -> (det_1(g), ..., det_k(g))` over the blocks cut out by a central
/// subgroup `A`.
#[derive(Clone, Debug)]
pub struct ThetaHom {
    dec: BlockDecomposition<FieldElement>,
    a_gens: Vec<Matrix>,
}

/// JSON summary of a [`ThetaHom`].
#[derive(Clone, Debug, Serialize)]
pub struct ThetaSummary {
    /// `d_j = dim V_j`.
    pub block_dims: Vec<usize>,
    /// `mu[i][j]`: eigenvalue of central generator `i` on block `j`.
    pub mu: Vec<Vec<String>>,
    pub change_of_basis: Vec<Vec<String>>,
}

pub fn build_theta(g_gens: &[Matrix], a_gens: &[Matrix]) -> Result<ThetaHom> {
    let dec = central_block_split(g_gens, a_gens)?;
    Ok(ThetaHom { dec, a_gens: a_gens.to_vec() })
}

impl ThetaHom {
    pub fn decomposition(&self) -> &BlockDecomposition<FieldElement> {
        &self.dec
    }

    pub fn num_blocks(&self) -> usize {
        self.dec.num_blocks()
    }

    pub fn block_dims(&self) -> &[usize] {
        self.dec.dims()
    }

    pub fn central_generators(&self) -> &[Matrix] {
        &self.a_gens
    }

    pub fn eval(&self, g: &Matrix) -> Result<Vec<FieldElement>> {
        block_determinants(&self.dec, g)
    }

    pub fn is_trivial_at(&self, g: &Matrix) -> Result<bool> {
        Ok(self.eval(g)?.iter().all(FieldElement::is_unity))
    }

    /// `mu_j(a)^{d_j}` for `a = prod a_i^{n_i}`, the value `theta(a)` must take.
    pub fn predicted(&self, exponents: &[i64]) -> Result<Vec<FieldElement>> {
        let mu = self.dec.eigenvalues();
        (0..self.num_blocks())
            .map(|j| {
                let mut acc = FieldElement::one_in(self.a_gens[0].ctx());
                for (i, &n) in exponents.iter().enumerate() {
                    let x = if n >= 0 { mu[i][j].clone() } else { mu[i][j].inv().ok_or(Error::NotInvertible)? };
                    acc = acc.mul(&x.pow(n.unsigned_abs()));
                }
                Ok(acc.pow(self.block_dims()[j] as u64))
            })
            .collect()
    }

    pub fn summary(&self) -> ThetaSummary {
        ThetaSummary {
            block_dims: self.block_dims().to_vec(),
            mu: self.dec.eigenvalues().iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect(),
            change_of_basis: self.dec.change_of_basis().string_rows(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelVerdict {
    /// An infinite-order element of `A` lies in `ker theta`.
    NotNiu,
    /// Every kernel element found has finite order.
    TorsionAsTested,
    /// No nontrivial element of the test set lies in the kernel.
    TrivialOnTestSet,
    /// Some kernel element has an order that was not decided up to the bound.
    Undecided,
}

impl KernelVerdict {
    pub fn statement(self) -> &'static str {
        match self {
            KernelVerdict::NotNiu => "infinite-order element in ker theta ∩ A: the representation is not NIU",
            KernelVerdict::TorsionAsTested => "ker theta ∩ A is torsion as far as tested",
            KernelVerdict::TrivialOnTestSet => "ker theta ∩ A is trivial on the test set",
            KernelVerdict::Undecided => "a kernel element of undecided order was found",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelElement {
    pub exponents: Vec<i64>,
    pub matrix: Vec<Vec<String>>,
    pub order: ElementOrder,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelAudit {
    pub verdict: KernelVerdict,
    pub statement: String,
    /// Exponent vectors `n != 0` with `||n||_1 <= range`.
    pub range: u64,
    pub order_bound: u64,
    pub tested: usize,
    /// Test vectors with `a(n) = I`.
    pub identities: usize,
    pub kernel: Vec<KernelElement>,
    pub scope: String,
}

/// Tests `a(n) = prod a_i^{n_i}` for `0 < ||n||_1 <= range`; kernel elements
/// get an order check up to `order_bound`.
pub fn kernel_audit(theta: &ThetaHom, a_basis: &[Matrix], range: u64, order_bound: u64) -> Result<KernelAudit> {
    let vectors: Vec<Vec<i64>> =
        exponent_vectors(a_basis.len(), range).into_iter().filter(|n| n.iter().any(|&x| x != 0)).collect();
    let mut kernel = Vec::new();
    let mut identities = 0;
    for n in &vectors {
        let a = subgroup_element(a_basis, n)?;
        if a.is_identity() {
            identities += 1;
            continue;
        }
        if theta.is_trivial_at(&a)? {
            let order = a.order(order_bound)?;
            kernel.push(KernelElement { exponents: n.clone(), matrix: a.string_rows(), order });
        }
    }
    let verdict = if kernel.iter().any(|k| k.order == ElementOrder::Infinite) {
        KernelVerdict::NotNiu
    } else if kernel.iter().any(|k| matches!(k.order, ElementOrder::Unknown { .. })) {
        KernelVerdict::Undecided
    } else if kernel.is_empty() {
        KernelVerdict::TrivialOnTestSet
    } else {
        KernelVerdict::TorsionAsTested
    };
    let scope = match verdict {
        KernelVerdict::NotNiu => "witnessed: exact infinite-order kernel element".to_string(),
        _ => format!("test set ||n||_1 <= {range}, orders checked up to {order_bound}; not a statement about all of A"),
    };
    Ok(KernelAudit {
        verdict,
        statement: verdict.statement().to_string(),
        range,
        order_bound,
        tested: vectors.len(),
        identities,
        kernel,
        scope,
    })
}

/// One ball element written as `g = k a(n)`.
#[derive(Clone, Debug, Serialize)]
pub struct Factorization {
    pub word: String,
    pub exponents: Vec<i64>,
    pub k: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SplittingWitness {
    pub theta: ThetaSummary,
    /// Absolute values whose `log |theta_j|` rows define `phi`.
    pub absolute_values: Vec<AbsoluteValue>,
    pub rows: Vec<VRow>,
    pub radius: u32,
    pub ball_size: usize,
    pub ball_complete: bool,
    /// Ball elements in `KA`, each with a verified factorization.
    pub factored: usize,
    /// Ball elements with non-integral `phi theta`: outside `KA`.
    pub outside: usize,
    /// Ball elements whose exponent extraction stayed undecided.
    pub undecided: usize,
    /// Distinct `k` found.
    pub kernel_size: usize,
    /// `a(n)` for `0 < ||n||_1 <= range` checked to satisfy `phi theta(a(n)) = n`.
    pub a_checked: usize,
    pub range: u64,
    pub precision: u64,
    pub sample: Vec<Factorization>,
    pub complete: bool,
    pub scope: String,
}

enum Extraction {
    Integral(Vec<i64>),
    NonIntegral,
    Undecided,
}

/// `phi theta` through `log |theta_j|` rows: `n = W L(g)` with `W` an
/// interval inverse of the chosen rows `B`, confirmed by `L(g) = B n` exactly.
struct Phi {
    absolute_values: Vec<AbsoluteValue>,
    rows: Vec<VRow>,
    chosen: Vec<usize>,
    /// `W` at increasing precision.
    levels: Vec<(u64, Vec<Vec<Interval>>)>,
}

impl Phi {
    fn precision(&self) -> u64 {
        self.levels[0].0
    }

    fn b(&self) -> Vec<Vec<LogValue>> {
        self.chosen.iter().map(|&r| self.rows[r].entries.clone()).collect()
    }

    fn logs(&self, theta: &ThetaHom, g: &Matrix) -> Result<Vec<LogValue>> {
        let t = theta.eval(g)?;
        self.chosen
            .iter()
            .map(|&r| {
                let row = &self.rows[r];
                self.absolute_values[row.av].log_abs(&t[row.position])
            })
            .collect()
    }

    fn extract(&self, logs: &[LogValue]) -> Extraction {
        let one = Rational::from_integer(1.into());
        'levels: for (prec, w) in &self.levels {
            let x: Vec<Interval> = logs.iter().map(|l| l.enclose(*prec)).collect();
            let mut n = Vec::with_capacity(w.len());
            for w_row in w {
                let y = w_row.iter().zip(&x).fold(Interval::zero(), |acc, (a, b)| acc.add(&a.mul(b)));
                if y.width() >= one {
                    continue 'levels;
                }
                // an interval narrower than 1 can only contain the integer nearest its midpoint
                let k = y.midpoint_f64().round() as i64;
                if !y.contains(&Rational::from_integer(k.into())) {
                    return Extraction::NonIntegral;
                }
                n.push(k);
            }
            if crate::certify::apply_v(&self.b(), &n).as_slice() == logs {
                return Extraction::Integral(n);
            }
        }
        Extraction::Undecided
    }
}

fn build_phi(theta: &ThetaHom, a_basis: &[Matrix], precision: u64) -> Result<Phi> {
    let values: Vec<Vec<FieldElement>> = a_basis.iter().map(|a| theta.eval(a)).collect::<Result<_>>()?;
    let desc = a_basis[0].descriptor();
    let sel = select_absolute_values(desc, &values, precision).map_err(|f| {
        let trivial: Vec<String> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.iter().all(FieldElement::is_unity))
            .map(|(i, _)| format!("theta(a_{}) = 1", i + 1))
            .collect();
        let detail = if trivial.is_empty() { f.diagnosis } else { format!("{}; {}", trivial.join(", "), f.diagnosis) };
        Error::InjectivityFailure(detail)
    })?;
    let bound = lattice_bound(&sel.matrix(), precision).map_err(|e| Error::InjectivityFailure(e.to_string()))?;
    let chosen = bound.rows;
    let b: Vec<Vec<LogValue>> = chosen.iter().map(|&r| sel.rows[r].entries.clone()).collect();
    let mut levels = vec![(bound.precision, bound.w)];
    for i in 1..=RETRIES {
        let prec = bound.precision << i;
        if let Ok(finer) = lattice_bound(&b, prec) {
            levels.push((prec, finer.w));
        }
    }
    Ok(Phi { absolute_values: sel.absolute_values, rows: sel.rows, chosen, levels })
}

const SAMPLE: usize = 12;

/// Builds `phi theta : G -> Z^m` for a central free abelian `A` with basis
/// `a_basis` and checks on `ball` that every element with integral
/// `phi theta` factors as `k a` with `k` in the kernel commuting with `A`,
/// and that `phi theta(a(n)) = n` for `||n||_1 <= range`.
pub fn splitting_audit(group: &Group, a_basis: &[Matrix], ball: &Ball, range: u64, precision: u64) -> Result<SplittingWitness> {
    if a_basis.is_empty() {
        return Err(Error::InvalidParameter("empty central basis".into()));
    }
    let theta = build_theta(group.generators(), a_basis)?;
    let phi = build_phi(&theta, a_basis, precision)?;
    let b = phi.b();

    let mut a_checked = 0;
    for n in exponent_vectors(a_basis.len(), range).into_iter().filter(|n| n.iter().any(|&x| x != 0)) {
        let a = subgroup_element(a_basis, &n)?;
        if a.is_identity() || phi.logs(&theta, &a)? != crate::certify::apply_v(&b, &n) {
            return Err(Error::InjectivityFailure(format!("phi theta(a({n:?})) != {n:?}")));
        }
        a_checked += 1;
    }

    let elements: Vec<&Matrix> = ball.iter().map(|(m, _)| m).collect();
    let outcomes: Vec<Result<(Extraction, Option<Matrix>)>> = elements
        .par_iter()
        .map(|g| {
            let logs = phi.logs(&theta, g)?;
            match phi.extract(&logs) {
                Extraction::Integral(n) => {
                    let a = subgroup_element(a_basis, &n)?;
                    let k = g.mul(&a.inverse().ok_or(Error::NotInvertible)?);
                    let in_kernel = phi.logs(&theta, &k)?.iter().all(LogValue::is_zero);
                    if !in_kernel || a_basis.iter().any(|x| !x.commutes_with(&k)) || k.mul(&a) != **g {
                        return Err(Error::FactorizationFailure(format!("{g} = k a({n:?}) with k = {k}")));
                    }
                    Ok((Extraction::Integral(n), Some(k)))
                }
                other => Ok((other, None)),
            }
        })
        .collect();

    let (mut factored, mut outside, mut undecided) = (0, 0, 0);
    let mut kernel: HashSet<Matrix> = HashSet::new();
    let mut sample = Vec::new();
    for (g, outcome) in elements.iter().zip(outcomes) {
        match outcome? {
            (Extraction::Integral(n), Some(k)) => {
                factored += 1;
                if sample.len() < SAMPLE {
                    let word = ball.word(g).map(|w| group.format_word(&w)).unwrap_or_default();
                    sample.push(Factorization { word, exponents: n, k: k.string_rows() });
                }
                kernel.insert(k);
            }
            (Extraction::NonIntegral, _) => outside += 1,
            _ => undecided += 1,
        }
    }
    let complete = undecided == 0;
    let scope = if complete {
        format!(
            "witnessed on the {} ball of radius {}: {factored} elements factor as k a, {outside} lie outside KA",
            if ball.is_complete() { "complete" } else { "truncated" },
            ball.completed_radius()
        )
    } else {
        format!("inconclusive: {undecided} elements need more than {} bits", phi.levels.last().map_or(0, |l| l.0))
    };
    Ok(SplittingWitness {
        theta: theta.summary(),
        absolute_values: phi.absolute_values.clone(),
        rows: phi.chosen.iter().map(|&r| phi.rows[r].clone()).collect(),
        radius: ball.completed_radius(),
        ball_size: ball.len(),
        ball_complete: ball.is_complete(),
        factored,
        outside,
        undecided,
        kernel_size: kernel.len(),
        a_checked,
        range,
        precision: phi.precision(),
        sample,
        complete,
        scope,
    })
}
