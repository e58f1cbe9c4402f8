//! Exact dense square matrices over any [`Field`].

mod blocks;
mod linalg;
mod triangular;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fields::rational::cyclotomic;
use crate::fields::{FieldDescriptor, FieldElement};
use crate::poly::{squarefree_part, Poly};
use crate::scalar::{Field, Rational, RootOfUnityTest};

pub use blocks::{block_determinants, central_block_split, BlockDecomposition};
pub use linalg::Subspace;
pub use triangular::{triangularize_commuting, TriangularForm};

/// A `d x d` matrix stored row-major. Entries are canonical, so `==` and
/// `Hash` are exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SquareMatrix<S: Field> {
    dim: usize,
    entries: Vec<S>,
    ctx: S::Ctx,
}

impl<S: Field> SquareMatrix<S> {
    /// Builds a matrix from rows, checking shape and that all entries share
    /// one field.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        let ctx = rows[0][0].ctx();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(format!("row of length {} in a {dim}x{dim} matrix", row.len())));
            }
            for x in row {
                if x.ctx() != ctx {
                    return Err(Error::FieldMismatch { expected: format!("{ctx:?}"), found: format!("{:?}", x.ctx()) });
                }
                entries.push(x);
            }
        }
        Ok(SquareMatrix { dim, entries, ctx })
    }

    /// Builds a matrix from a row-major entry list without checks.
    pub fn from_fn(dim: usize, ctx: &S::Ctx, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        SquareMatrix { dim, entries, ctx: ctx.clone() }
    }

    pub fn identity(dim: usize, ctx: &S::Ctx) -> Self {
        let (zero, one) = (S::zero_in(ctx), S::one_in(ctx));
        Self::from_fn(dim, ctx, |i, j| if i == j { one.clone() } else { zero.clone() })
    }

    pub fn zero(dim: usize, ctx: &S::Ctx) -> Self {
        let zero = S::zero_in(ctx);
        Self::from_fn(dim, ctx, |_, _| zero.clone())
    }

    pub fn diagonal(diag: Vec<S>) -> Result<Self> {
        let dim = diag.len();
        let ctx = diag.first().ok_or_else(|| Error::DimensionMismatch("empty diagonal".into()))?.ctx();
        let zero = S::zero_in(&ctx);
        Ok(Self::from_fn(dim, &ctx, |i, j| if i == j { diag[i].clone() } else { zero.clone() }))
    }

    /// Block-diagonal sum `diag(self, other)`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        let zero = S::zero_in(&self.ctx);
        Self::from_fn(a + b, &self.ctx, |i, j| match (i < a, j < a) {
            (true, true) => self.get(i, j).clone(),
            (false, false) => other.get(i - a, j - a).clone(),
            _ => zero.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ctx(&self) -> &S::Ctx {
        &self.ctx
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.entries.chunks(self.dim)
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.dim).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn diagonal_entries(&self) -> Vec<S> {
        (0..self.dim).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn map<T: Field>(&self, ctx: &T::Ctx, f: impl Fn(&S) -> T) -> SquareMatrix<T> {
        SquareMatrix { dim: self.dim, entries: self.entries.iter().map(f).collect(), ctx: ctx.clone() }
    }

    fn check_dim(&self, rhs: &Self) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.check_dim(rhs);
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.add(b)).collect();
        SquareMatrix { dim: self.dim, entries, ctx: self.ctx.clone() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.check_dim(rhs);
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.sub(b)).collect();
        SquareMatrix { dim: self.dim, entries, ctx: self.ctx.clone() }
    }

    pub fn scale(&self, c: &S) -> Self {
        let entries = self.entries.iter().map(|a| a.mul(c)).collect();
        SquareMatrix { dim: self.dim, entries, ctx: self.ctx.clone() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.check_dim(rhs);
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = S::zero_in(&self.ctx);
                for k in 0..n {
                    let a = self.get(i, k);
                    if a.vanishes() {
                        continue;
                    }
                    let b = rhs.get(k, j);
                    if !b.vanishes() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                entries.push(acc);
            }
        }
        SquareMatrix { dim: n, entries, ctx: self.ctx.clone() }
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim).fold(S::zero_in(&self.ctx), |acc, j| acc.add(&self.get(i, j).mul(&v[j])))
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, &self.ctx, |i, j| self.get(j, i).clone())
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.dim, &self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `self^e` for any integer `e`; `None` if `e < 0` and `self` is singular.
    pub fn pow_signed(&self, e: i64) -> Option<Self> {
        if e >= 0 {
            Some(self.pow(e as u64))
        } else {
            Some(self.inverse()?.pow(e.unsigned_abs()))
        }
    }

    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| if i == j { self.get(i, j).is_unity() } else { self.get(i, j).vanishes() }))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.vanishes())
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j).vanishes()))
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.mul(other) == other.mul(self)
    }

    pub fn trace(&self) -> S {
        (0..self.dim).fold(S::zero_in(&self.ctx), |acc, i| acc.add(self.get(i, i)))
    }

    pub fn determinant(&self) -> S {
        linalg::determinant(self)
    }

    pub fn inverse(&self) -> Option<Self> {
        linalg::inverse(self)
    }

    /// Principal submatrix on the index range `start..start + len`.
    pub fn principal_block(&self, start: usize, len: usize) -> Self {
        Self::from_fn(len, &self.ctx, |i, j| self.get(start + i, start + j).clone())
    }

    /// `det(x I - self)`, computed division-free by Berkowitz's algorithm.
    pub fn char_poly(&self) -> Poly<S> {
        let ctx = &self.ctx;
        let n = self.dim;
        let zero = S::zero_in(ctx);
        // coefficients in descending order of degree
        let mut c: Vec<S> = vec![S::one_in(ctx), self.get(0, 0).neg()];
        for r in 1..n {
            let a = self.principal_block(0, r);
            let row: Vec<S> = (0..r).map(|j| self.get(r, j).clone()).collect();
            let mut col: Vec<S> = (0..r).map(|i| self.get(i, r).clone()).collect();
            let mut first = vec![S::one_in(ctx), self.get(r, r).neg()];
            for _ in 0..r {
                let dot = row.iter().zip(&col).fold(zero.clone(), |acc, (x, y)| acc.add(&x.mul(y)));
                first.push(dot.neg());
                col = a.mul_vec(&col);
            }
            // lower-triangular Toeplitz (r+2) x (r+1) times c
            let mut next = Vec::with_capacity(r + 2);
            for i in 0..r + 2 {
                let mut acc = zero.clone();
                for (j, cj) in c.iter().enumerate() {
                    if i >= j {
                        acc = acc.add(&first[i - j].mul(cj));
                    }
                }
                next.push(acc);
            }
            c = next;
        }
        c.reverse();
        Poly::new(c, ctx.clone())
    }

    /// Evaluates a polynomial at this matrix.
    pub fn eval_poly(&self, p: &Poly<S>) -> Self {
        let id = Self::identity(self.dim, &self.ctx);
        p.coeffs()
            .iter()
            .rev()
            .fold(Self::zero(self.dim, &self.ctx), |acc, c| acc.mul(self).add(&id.scale(c)))
    }

    /// True iff `(self - I)^d = 0`.
    pub fn is_unipotent(&self) -> bool {
        let n = self.sub(&Self::identity(self.dim, &self.ctx));
        n.pow(self.dim as u64).is_zero()
    }

    /// The order of a unipotent matrix: a power of `p` in characteristic
    /// `p`, and infinite in characteristic zero unless the matrix is `I`.
    pub fn unipotent_order(&self) -> UnipotentOrder {
        debug_assert!(self.is_unipotent());
        if self.is_identity() {
            return UnipotentOrder::Finite(1);
        }
        let p = S::characteristic(&self.ctx);
        if p == 0 {
            return UnipotentOrder::Infinite;
        }
        let mut m = self.clone();
        let mut order = 1u64;
        while !m.is_identity() {
            m = m.pow(p);
            order = order.saturating_mul(p);
        }
        UnipotentOrder::Finite(order)
    }

    /// Smallest `k` with `self^k` unipotent.
    ///
    /// When the characteristic polynomial reduces to one over `Q` the answer
    /// is exact (cyclotomic factor test) and may exceed `bound`; otherwise
    /// powers up to `bound` are tried and a negative answer is only a bound.
    pub fn virtually_unipotent(&self, bound: u64) -> Result<VirtualUnipotence> {
        if bound < 1 {
            return Err(Error::InvalidParameter("order bound must be at least 1".into()));
        }
        if self.is_unipotent() {
            return Ok(VirtualUnipotence::Power(1));
        }
        match S::root_of_unity_test(&self.char_poly()) {
            RootOfUnityTest::Never => return Ok(VirtualUnipotence::Never),
            RootOfUnityTest::Rational(q) => {
                return Ok(match cyclotomic_exponent(&q) {
                    Some(k) => VirtualUnipotence::Power(k),
                    None => VirtualUnipotence::Never,
                })
            }
            RootOfUnityTest::Always | RootOfUnityTest::Unknown => {}
        }
        let mut m = self.clone();
        for k in 2..=bound {
            m = m.mul(self);
            if m.is_unipotent() {
                return Ok(VirtualUnipotence::Power(k));
            }
        }
        Ok(VirtualUnipotence::NoneUpTo(bound))
    }

    /// Order of the matrix, exact whenever [`Self::virtually_unipotent`] is.
    pub fn order(&self, bound: u64) -> Result<ElementOrder> {
        Ok(match self.virtually_unipotent(bound)? {
            VirtualUnipotence::Never => ElementOrder::Infinite,
            VirtualUnipotence::NoneUpTo(k) => ElementOrder::Unknown { checked_up_to: k },
            VirtualUnipotence::Power(k) => match self.pow(k).unipotent_order() {
                UnipotentOrder::Finite(m) => ElementOrder::Finite(k.saturating_mul(m)),
                UnipotentOrder::Infinite => ElementOrder::Infinite,
            },
        })
    }
}

/// `lcm` of the orders of the roots of `q` if they are all roots of unity.
fn cyclotomic_exponent(q: &Poly<Rational>) -> Option<u64> {
    let mut rest = squarefree_part(q);
    let deg = rest.degree().unwrap_or(0) as u64;
    let mut k = 1u64;
    let mut m = 1u64;
    // phi(m) >= sqrt(m / 2), so phi(m) <= deg forces m <= 2 deg^2
    while !rest.is_constant() && m <= 2 * deg * deg.max(1) {
        if crate::arith::totient(m) <= deg {
            let phi = cyclotomic(m);
            if let Some(q) = rest.exact_div(&phi) {
                rest = q;
                k = num_integer::lcm(k, m);
            }
        }
        m += 1;
    }
    rest.is_constant().then_some(k)
}

/// Result of [`SquareMatrix::virtually_unipotent`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", content = "k", rename_all = "kebab-case")]
pub enum VirtualUnipotence {
    /// `M^k` is unipotent and no smaller power is.
    Power(u64),
    /// No power up to the bound is unipotent; larger ones were not tried.
    NoneUpTo(u64),
    /// No power is unipotent (some eigenvalue is not a root of unity).
    Never,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "order", content = "value", rename_all = "kebab-case")]
pub enum UnipotentOrder {
    Finite(u64),
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "order", rename_all = "kebab-case")]
pub enum ElementOrder {
    Finite(u64),
    Infinite,
    Unknown { checked_up_to: u64 },
}

impl<S: Field> fmt::Debug for SquareMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<S: Field> fmt::Display for SquareMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl SquareMatrix<FieldElement> {
    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.ctx
    }

    /// Parses rows of element strings in `desc`.
    pub fn parse(desc: &FieldDescriptor, rows: &[Vec<String>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| desc.parse_element(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let m = Self::from_rows(rows)?;
        Ok(m)
    }

    /// Convenience constructor from small integers.
    pub fn from_ints(desc: &FieldDescriptor, rows: &[&[i64]]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&x| FieldElement::from_i64(desc, x)).collect()).collect();
        Self::from_rows(rows).expect("well-formed integer rows")
    }

    pub fn string_rows(&self) -> Vec<Vec<String>> {
        self.rows().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    field: FieldDescriptor,
    rows: Vec<Vec<String>>,
}

impl Serialize for SquareMatrix<FieldElement> {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        MatrixRepr { field: self.ctx.clone(), rows: self.string_rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SquareMatrix<FieldElement> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        Self::parse(&repr.field, &repr.rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldDescriptor;

    type M = SquareMatrix<FieldElement>;

    fn q() -> FieldDescriptor {
        FieldDescriptor::Rationals
    }

    fn poly(coeffs: &[i64]) -> Poly<FieldElement> {
        Poly::new(coeffs.iter().map(|&c| FieldElement::from_i64(&q(), c)).collect(), q())
    }

    #[test]
    fn char_polys() {
        assert_eq!(M::from_ints(&q(), &[&[1, 1], &[0, 1]]).char_poly(), poly(&[1, -2, 1]));
        assert_eq!(M::from_ints(&q(), &[&[2, 0], &[0, 1]]).char_poly(), poly(&[2, -3, 1]));
        assert_eq!(M::from_ints(&q(), &[&[0, 1], &[1, 1]]).char_poly(), poly(&[-1, -1, 1]));
        let m = M::from_ints(&q(), &[&[2, 1, 0, 3], &[0, -1, 4, 1], &[5, 0, 1, 1], &[1, 2, 0, 7]]);
        let chi = m.char_poly();
        assert!(m.eval_poly(&chi).is_zero());
        assert_eq!(chi.coeff(0), m.determinant());
        assert_eq!(chi.coeff(3), m.trace().neg());
    }

    #[test]
    fn unipotence() {
        assert!(M::from_ints(&q(), &[&[1, 1], &[0, 1]]).is_unipotent());
        assert!(!M::from_ints(&q(), &[&[2, 0], &[0, 1]]).is_unipotent());
        assert!(M::identity(3, &q()).is_unipotent());
    }

    #[test]
    fn virtual_unipotence() {
        let flip = M::from_ints(&q(), &[&[-1, 0], &[0, 1]]);
        assert_eq!(flip.virtually_unipotent(10).unwrap(), VirtualUnipotence::Power(2));
        let t = M::from_ints(&q(), &[&[2, 0], &[0, 1]]);
        assert_eq!(t.virtually_unipotent(10).unwrap(), VirtualUnipotence::Never);
        let rot6 = M::from_ints(&q(), &[&[1, -1], &[1, 0]]);
        assert_eq!(rot6.virtually_unipotent(3).unwrap(), VirtualUnipotence::Power(6));
        assert_eq!(rot6.order(3).unwrap(), ElementOrder::Finite(6));
        let gf2t: FieldDescriptor = "GF(2)(t)".parse().unwrap();
        let a = M::from_ints(&gf2t, &[&[1, 1], &[0, 1]]);
        assert_eq!(a.virtually_unipotent(4).unwrap(), VirtualUnipotence::Power(1));
        assert_eq!(a.unipotent_order(), UnipotentOrder::Finite(2));
        assert!(matches!(a.virtually_unipotent(0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn inverse_and_signed_powers() {
        let t = M::from_ints(&q(), &[&[2, 1], &[0, 1]]);
        let inv = t.inverse().unwrap();
        assert!(t.mul(&inv).is_identity());
        assert_eq!(t.pow_signed(-2).unwrap(), inv.mul(&inv));
        assert!(M::from_ints(&q(), &[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn json_round_trip() {
        let d = FieldDescriptor::real_quadratic(5).unwrap();
        let m = M::parse(&d, &[vec!["1".into(), "(-1 + sqrt(5))/2".into()], vec!["0".into(), "1".into()]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<M>(&s).unwrap(), m);
    }
}
