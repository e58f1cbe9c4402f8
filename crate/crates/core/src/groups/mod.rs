//! Finitely generated matrix groups with their word metric.

mod audit;
mod ball;
mod profile;

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FieldDescriptor, FieldElement};
use crate::matrices::SquareMatrix;
use crate::scalar::Field;

pub use audit::{audit_unipotents, AuditVerdict, OrderReport, UnipotentAudit, UnipotentWitness};
pub use ball::{bfs_ball, bfs_ball_with, word_length, CayleyBall, Schedule, WordLength};
pub use profile::{
    distortion_profile, exponent_vectors, subgroup_element, translation_length_estimate, DistortionProfile, ProfileRow, ProfileStatus,
    TranslationEstimate, TranslationSample,
};

/// A generator or the inverse of one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }
}

/// A word in the generators, read left to right as a matrix product.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// `self^k` for any integer `k`.
    pub fn power(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        Word(base.0.iter().copied().cycle().take(base.len() * k.unsigned_abs() as usize).collect())
    }

    /// The word `g^k` for a single generator.
    pub fn gen_power(gen: usize, k: i64) -> Word {
        Word(vec![Letter { gen, inverse: k < 0 }; k.unsigned_abs() as usize])
    }
}

/// A group given by labelled invertible generators, with the symmetric
/// generating set built from them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixGroup<S: Field> {
    dim: usize,
    ctx: S::Ctx,
    labels: Vec<String>,
    gens: Vec<SquareMatrix<S>>,
    inverses: Vec<SquareMatrix<S>>,
    /// The symmetric generating set, without repeated matrices.
    letters: Vec<Letter>,
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '.') && !s.starts_with(|c: char| c.is_ascii_digit())
}

impl<S: Field> MatrixGroup<S> {
    pub fn new(gens: Vec<(String, SquareMatrix<S>)>) -> Result<Self> {
        let first = gens.first().ok_or_else(|| Error::InvalidParameter("a group needs at least one generator".into()))?;
        let (dim, ctx) = (first.1.dim(), first.1.ctx().clone());
        let mut labels = Vec::with_capacity(gens.len());
        let mut mats = Vec::with_capacity(gens.len());
        let mut inverses = Vec::with_capacity(gens.len());
        for (label, m) in gens {
            if !valid_label(&label) {
                return Err(Error::InvalidParameter(format!("invalid generator label {label:?}")));
            }
            if labels.contains(&label) {
                return Err(Error::InvalidParameter(format!("duplicate generator label {label:?}")));
            }
            if m.dim() != dim {
                return Err(Error::DimensionMismatch(format!("generator {label} is {0}x{0}, expected {dim}x{dim}", m.dim())));
            }
            if *m.ctx() != ctx {
                return Err(Error::FieldMismatch { expected: format!("{ctx:?}"), found: format!("{:?}", m.ctx()) });
            }
            let inv = m.inverse().ok_or(Error::NotInvertible)?;
            labels.push(label);
            mats.push(m);
            inverses.push(inv);
        }
        let mut letters = Vec::new();
        let mut seen: Vec<&SquareMatrix<S>> = Vec::new();
        for i in 0..mats.len() {
            for (inverse, m) in [(false, &mats[i]), (true, &inverses[i])] {
                if !seen.contains(&m) {
                    seen.push(m);
                    letters.push(Letter { gen: i, inverse });
                }
            }
        }
        Ok(MatrixGroup { dim, ctx, labels, gens: mats, inverses, letters })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ctx(&self) -> &S::Ctx {
        &self.ctx
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn generators(&self) -> &[SquareMatrix<S>] {
        &self.gens
    }

    pub fn generator(&self, label: &str) -> Result<&SquareMatrix<S>> {
        self.index_of(label).map(|i| &self.gens[i])
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// The symmetric generating set.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn letter_matrix(&self, l: Letter) -> Result<&SquareMatrix<S>> {
        if l.gen >= self.gens.len() {
            return Err(Error::IndexOutOfRange(l.gen));
        }
        Ok(if l.inverse { &self.inverses[l.gen] } else { &self.gens[l.gen] })
    }

    /// Matrices of the symmetric generating set.
    pub fn symmetric_set(&self) -> Vec<&SquareMatrix<S>> {
        self.letters.iter().map(|&l| self.letter_matrix(l).expect("valid letter")).collect()
    }

    pub fn identity(&self) -> SquareMatrix<S> {
        SquareMatrix::identity(self.dim, &self.ctx)
    }

    pub fn evaluate_word(&self, w: &Word) -> Result<SquareMatrix<S>> {
        let mut acc = self.identity();
        for &l in w.letters() {
            acc = acc.mul(self.letter_matrix(l)?);
        }
        Ok(acc)
    }

    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        let ls = w.letters();
        while i < ls.len() {
            let mut j = i;
            while j < ls.len() && ls[j] == ls[i] {
                j += 1;
            }
            let label = self.labels.get(ls[i].gen).map(String::as_str).unwrap_or("?");
            let k = (j - i) as i64 * if ls[i].inverse { -1 } else { 1 };
            parts.push(if k == 1 { label.to_string() } else { format!("{label}^{k}") });
            i = j;
        }
        parts.join(" ")
    }

    /// Parses words such as `t a t^-1` or `x^-3*y^-3*x^3*y^3`.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for tok in text.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
            if tok == "1" {
                continue;
            }
            let (label, exp) = match tok.split_once('^') {
                Some((l, e)) => (l, e.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?),
                None => (tok, 1),
            };
            let gen = self.index_of(label)?;
            letters.extend(Word::gen_power(gen, exp).0);
        }
        Ok(Word(letters))
    }

    /// Block-diagonal generators `g (+) I` and `I (+) h`.
    pub fn direct_product(&self, other: &Self) -> Result<Self> {
        if self.ctx != other.ctx {
            return Err(Error::FieldMismatch { expected: format!("{:?}", self.ctx), found: format!("{:?}", other.ctx) });
        }
        let clash = self.labels.iter().any(|l| other.labels.contains(l));
        let rename = |l: &String, side: usize| if clash { format!("{l}_{side}") } else { l.clone() };
        let id1 = self.identity();
        let id2 = other.identity();
        let mut gens = Vec::new();
        for (l, g) in self.labels.iter().zip(&self.gens) {
            gens.push((rename(l, 1), g.direct_sum(&id2)));
        }
        for (l, h) in other.labels.iter().zip(&other.gens) {
            gens.push((rename(l, 2), id1.direct_sum(h)));
        }
        Self::new(gens)
    }
}

impl<S: Field> fmt::Display for MatrixGroup<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}> in GL({})", self.labels.join(", "), self.dim)
    }
}

/// A group over any supported field.
pub type Group = MatrixGroup<FieldElement>;

/// JSON form of a group: a field and named generator matrices.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GroupDefinition {
    pub field: FieldDescriptor,
    pub generators: IndexMap<String, Vec<Vec<String>>>,
}

impl GroupDefinition {
    pub fn build(&self) -> Result<Group> {
        let gens = self
            .generators
            .iter()
            .map(|(l, rows)| Ok((l.clone(), SquareMatrix::parse(&self.field, rows)?)))
            .collect::<Result<Vec<_>>>()?;
        Group::new(gens)
    }
}

impl MatrixGroup<FieldElement> {
    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.ctx
    }

    pub fn definition(&self) -> GroupDefinition {
        GroupDefinition {
            field: self.ctx.clone(),
            generators: self.labels.iter().cloned().zip(self.gens.iter().map(|g| g.string_rows())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Matrix;

    fn bs12() -> Group {
        let q = FieldDescriptor::Rationals;
        Group::new(vec![
            ("a".into(), Matrix::from_ints(&q, &[&[1, 1], &[0, 1]])),
            ("t".into(), Matrix::from_ints(&q, &[&[2, 0], &[0, 1]])),
        ])
        .unwrap()
    }

    #[test]
    fn words_evaluate() {
        let g = bs12();
        assert!(g.evaluate_word(&Word::empty()).unwrap().is_identity());
        let w = g.parse_word("t a t^-1").unwrap();
        assert_eq!(g.evaluate_word(&w).unwrap(), Matrix::from_ints(&FieldDescriptor::Rationals, &[&[1, 2], &[0, 1]]));
        assert_eq!(g.format_word(&w), "t a t^-1");
        assert!(matches!(g.evaluate_word(&Word(vec![Letter { gen: 5, inverse: false }])), Err(Error::IndexOutOfRange(5))));
        assert!(matches!(g.parse_word("b"), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn involutions_are_not_doubled() {
        let q = FieldDescriptor::Rationals;
        let g = Group::new(vec![("s".into(), Matrix::from_ints(&q, &[&[-1, 0], &[0, 1]]))]).unwrap();
        assert_eq!(g.letters().len(), 1);
        assert_eq!(bs12().letters().len(), 4);
    }

    #[test]
    fn rejects_singular_and_duplicate() {
        let q = FieldDescriptor::Rationals;
        let sing = Matrix::from_ints(&q, &[&[1, 1], &[1, 1]]);
        assert!(matches!(Group::new(vec![("s".into(), sing)]), Err(Error::NotInvertible)));
        let a = Matrix::identity(2, &q);
        assert!(Group::new(vec![("a".into(), a.clone()), ("a".into(), a)]).is_err());
    }

    #[test]
    fn definition_round_trip() {
        let g = bs12();
        let json = serde_json::to_string(&g.definition()).unwrap();
        let back: GroupDefinition = serde_json::from_str(&json).unwrap();
        assert_eq!(back.build().unwrap(), g);
    }
}
