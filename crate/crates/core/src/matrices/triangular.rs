//! Simultaneous triangularization of commuting matrices.

use crate::error::{Error, Result};
use crate::poly::deflate;
use crate::scalar::Field;

use super::linalg::Subspace;
use super::SquareMatrix;

/// A basis change `P` with `P g P^-1` upper triangular for every recorded `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularForm<S: Field> {
    p: SquareMatrix<S>,
    p_inv: SquareMatrix<S>,
    transformed: Vec<SquareMatrix<S>>,
}

impl<S: Field> TriangularForm<S> {
    pub fn change_of_basis(&self) -> &SquareMatrix<S> {
        &self.p
    }

    pub fn change_of_basis_inverse(&self) -> &SquareMatrix<S> {
        &self.p_inv
    }

    pub fn transformed(&self) -> &[SquareMatrix<S>] {
        &self.transformed
    }

    /// Diagonal of each transformed generator.
    pub fn diagonals(&self) -> Vec<Vec<S>> {
        self.transformed.iter().map(|t| t.diagonal_entries()).collect()
    }

    /// `P g P^-1` for any `g`.
    pub fn conjugate(&self, g: &SquareMatrix<S>) -> SquareMatrix<S> {
        self.p.mul(g).mul(&self.p_inv)
    }

    /// Diagonal of `P g P^-1`, if that matrix is upper triangular.
    pub fn diagonal_of(&self, g: &SquareMatrix<S>) -> Option<Vec<S>> {
        let t = self.conjugate(g);
        t.is_upper_triangular().then(|| t.diagonal_entries())
    }
}

/// Checks that the characteristic polynomial of `m` splits over its field.
pub(super) fn require_split<S: Field>(m: &SquareMatrix<S>) -> Result<Vec<(S, usize)>> {
    let chi = m.char_poly();
    let roots = S::roots(&chi)?;
    let (mults, rest) = deflate(&chi, &roots);
    if !rest.is_constant() {
        return Err(Error::NeedsExtension(format!("characteristic polynomial {chi} does not split; factor {rest} remains")));
    }
    Ok(roots.into_iter().zip(mults).collect())
}

fn common_eigenvector<S: Field>(gens: &[SquareMatrix<S>], dim: usize, ctx: &S::Ctx) -> Result<Vec<S>> {
    let mut w = Subspace::full(dim, ctx);
    for g in gens {
        let r = w.restrict(g).expect("eigenspaces of commuting matrices are invariant");
        let roots = S::roots(&r.char_poly())?;
        let lambda = roots
            .first()
            .ok_or_else(|| Error::NeedsExtension(format!("{g} has no eigenvalue in the field")))?;
        w = w.generalized_eigenspace(g, lambda, 1).expect("invariant");
    }
    Ok(w.basis()[0].clone())
}

/// Columns of the returned `B` form a basis in which every `g` is upper
/// triangular.
fn flag_basis<S: Field>(gens: &[SquareMatrix<S>], dim: usize, ctx: &S::Ctx) -> Result<SquareMatrix<S>> {
    if dim == 1 {
        return Ok(SquareMatrix::identity(1, ctx));
    }
    let v = common_eigenvector(gens, dim, ctx)?;
    let i0 = v.iter().position(|x| !x.vanishes()).expect("eigenvectors are nonzero");
    let zero = S::zero_in(ctx);
    let one = S::one_in(ctx);
    let others: Vec<usize> = (0..dim).filter(|&j| j != i0).collect();
    let b0 = SquareMatrix::from_fn(dim, ctx, |i, j| {
        if j == 0 {
            v[i].clone()
        } else if i == others[j - 1] {
            one.clone()
        } else {
            zero.clone()
        }
    });
    let b0_inv = b0.inverse().expect("completed basis");
    let subs: Vec<SquareMatrix<S>> =
        gens.iter().map(|g| b0_inv.mul(g).mul(&b0).principal_block(1, dim - 1)).collect();
    let q = flag_basis(&subs, dim - 1, ctx)?;
    Ok(b0.mul(&SquareMatrix::identity(1, ctx).direct_sum(&q)))
}

/// Finds `P` with `P g P^-1` upper triangular for all `gens`, which must
/// pairwise commute and have split characteristic polynomials. Input that
/// is already upper triangular is returned with `P = I`.
pub fn triangularize_commuting<S: Field>(gens: &[SquareMatrix<S>]) -> Result<TriangularForm<S>> {
    let first = gens.first().ok_or_else(|| Error::InvalidParameter("no generators to triangularize".into()))?;
    let (dim, ctx) = (first.dim(), first.ctx().clone());
    if let Some(g) = gens.iter().find(|g| g.dim() != dim) {
        return Err(Error::DimensionMismatch(format!("{}x{} and {}x{}", dim, dim, g.dim(), g.dim())));
    }
    for (i, g) in gens.iter().enumerate() {
        for (j, h) in gens.iter().enumerate().skip(i + 1) {
            if !g.commutes_with(h) {
                return Err(Error::NonCommuting(format!("generators {i} and {j}")));
            }
        }
    }
    if gens.iter().all(|g| g.is_upper_triangular()) {
        let id = SquareMatrix::identity(dim, &ctx);
        return Ok(TriangularForm { p: id.clone(), p_inv: id, transformed: gens.to_vec() });
    }
    for g in gens {
        require_split(g)?;
    }
    let b = flag_basis(gens, dim, &ctx)?;
    let p = b.inverse().expect("basis");
    let transformed: Vec<_> = gens.iter().map(|g| p.mul(g).mul(&b)).collect();
    debug_assert!(transformed.iter().all(|t| t.is_upper_triangular()));
    Ok(TriangularForm { p, p_inv: b, transformed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{FieldDescriptor, FieldElement};

    type M = SquareMatrix<FieldElement>;

    #[test]
    fn swap_matrix_diagonalizes() {
        let q = FieldDescriptor::Rationals;
        let s = M::from_ints(&q, &[&[0, 1], &[1, 0]]);
        let tf = triangularize_commuting(&[s]).unwrap();
        assert_eq!(tf.diagonals()[0], vec![FieldElement::from_i64(&q, 1), FieldElement::from_i64(&q, -1)]);
        assert!(tf.transformed()[0].is_upper_triangular());
    }

    #[test]
    fn heisenberg_checks() {
        let q = FieldDescriptor::Rationals;
        let x = M::from_ints(&q, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        let y = M::from_ints(&q, &[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]);
        let z = M::from_ints(&q, &[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]]);
        assert!(matches!(triangularize_commuting(&[x.clone(), y, z.clone()]), Err(Error::NonCommuting(_))));
        let tf = triangularize_commuting(std::slice::from_ref(&z)).unwrap();
        assert_eq!(tf.transformed()[0], z);
        assert!(tf.change_of_basis().is_identity());
        assert!(triangularize_commuting(&[x, z]).unwrap().change_of_basis().is_identity());
    }

    #[test]
    fn rotation_needs_extension() {
        let q = FieldDescriptor::Rationals;
        let r = M::from_ints(&q, &[&[0, -1], &[1, 0]]);
        assert!(matches!(triangularize_commuting(&[r]), Err(Error::NeedsExtension(_))));
    }

    #[test]
    fn commuting_pair_with_shared_eigenvectors() {
        let q = FieldDescriptor::Rationals;
        let a = M::from_ints(&q, &[&[2, 1], &[1, 2]]);
        let b = M::from_ints(&q, &[&[0, 1], &[1, 0]]);
        let tf = triangularize_commuting(&[a.clone(), b.clone()]).unwrap();
        for g in [&a, &b, &a.mul(&b)] {
            assert!(tf.conjugate(g).is_upper_triangular());
        }
        let da = tf.diagonal_of(&a).unwrap();
        let db = tf.diagonal_of(&b).unwrap();
        let dab = tf.diagonal_of(&a.mul(&b)).unwrap();
        for i in 0..2 {
            assert_eq!(dab[i], da[i].mul(&db[i]));
        }
    }
}
