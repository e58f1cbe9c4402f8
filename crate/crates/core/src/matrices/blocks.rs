//! Block decompositions induced by a central commuting family.

use crate::error::{Error, Result};
use crate::scalar::Field;

use super::linalg::Subspace;
use super::triangular::{require_split, triangularize_commuting};
use super::SquareMatrix;

/// A basis change `P` after which the ambient generators are block diagonal
/// and each central generator is, on every block, upper triangular with a
/// single eigenvalue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition<S: Field> {
    dims: Vec<usize>,
    p: SquareMatrix<S>,
    p_inv: SquareMatrix<S>,
    /// `eigenvalues[i][j]`: the eigenvalue of central generator `i` on block `j`.
    eigenvalues: Vec<Vec<S>>,
}

impl<S: Field> BlockDecomposition<S> {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    pub fn change_of_basis(&self) -> &SquareMatrix<S> {
        &self.p
    }

    pub fn eigenvalues(&self) -> &[Vec<S>] {
        &self.eigenvalues
    }

    fn offsets(&self) -> Vec<usize> {
        self.dims
            .iter()
            .scan(0, |acc, d| {
                let start = *acc;
                *acc += d;
                Some(start)
            })
            .collect()
    }

    pub fn conjugate(&self, g: &SquareMatrix<S>) -> SquareMatrix<S> {
        self.p.mul(g).mul(&self.p_inv)
    }

    /// True when `m` has exact zeros outside the diagonal blocks.
    pub fn is_block_diagonal(&self, m: &SquareMatrix<S>) -> bool {
        let mut owner = Vec::with_capacity(m.dim());
        for (b, &d) in self.dims.iter().enumerate() {
            owner.extend(std::iter::repeat_n(b, d));
        }
        (0..m.dim()).all(|i| (0..m.dim()).all(|j| owner[i] == owner[j] || m.get(i, j).vanishes()))
    }

    /// Diagonal blocks of `P g P^-1`, or an error if `g` mixes blocks.
    pub fn blocks_of(&self, g: &SquareMatrix<S>) -> Result<Vec<SquareMatrix<S>>> {
        let c = self.conjugate(g);
        if !self.is_block_diagonal(&c) {
            return Err(Error::BlockStructure(format!("{g}")));
        }
        Ok(self.offsets().iter().zip(&self.dims).map(|(&s, &d)| c.principal_block(s, d)).collect())
    }
}

/// Splits `K^d` into generalized eigenspaces of the central generators
/// `a_gens`, refining one generator at a time, and checks that every
/// generator in `g_gens` preserves the result.
pub fn central_block_split<S: Field>(
    g_gens: &[SquareMatrix<S>],
    a_gens: &[SquareMatrix<S>],
) -> Result<BlockDecomposition<S>> {
    let first = a_gens
        .first()
        .or(g_gens.first())
        .ok_or_else(|| Error::InvalidParameter("no generators".into()))?;
    let (dim, ctx) = (first.dim(), first.ctx().clone());
    for (i, a) in a_gens.iter().enumerate() {
        for (j, g) in g_gens.iter().enumerate() {
            if !a.commutes_with(g) {
                return Err(Error::NotCentral(format!("central generator {i} and generator {j} do not commute")));
            }
        }
        for (j, b) in a_gens.iter().enumerate().skip(i + 1) {
            if !a.commutes_with(b) {
                return Err(Error::NotCentral(format!("central generators {i} and {j} do not commute")));
            }
        }
    }
    let mut blocks = vec![Subspace::full(dim, &ctx)];
    for a in a_gens {
        let mut refined = Vec::new();
        for w in &blocks {
            let r = w.restrict(a).expect("blocks are invariant under central elements");
            for (lambda, mult) in require_split(&r)? {
                refined.push(w.generalized_eigenspace(a, &lambda, mult as u64).expect("invariant"));
            }
        }
        blocks = refined;
    }
    let lead = |w: &Subspace<S>| {
        w.basis().iter().filter_map(|v| v.iter().position(|x| !x.vanishes())).min().unwrap_or(usize::MAX)
    };
    blocks.sort_by_key(lead);
    let mut columns: Vec<Vec<S>> = Vec::with_capacity(dim);
    let mut dims = Vec::with_capacity(blocks.len());
    for w in &blocks {
        let w = if a_gens.is_empty() {
            w.clone()
        } else {
            let restricted: Vec<_> = a_gens.iter().map(|a| w.restrict(a).expect("invariant")).collect();
            let tf = triangularize_commuting(&restricted)?;
            let q_inv = tf.change_of_basis_inverse();
            let coords: Vec<Vec<S>> = (0..w.dim()).map(|j| q_inv.column(j)).collect();
            w.span_coords(&coords, &ctx)
        };
        dims.push(w.dim());
        columns.extend(w.basis().iter().cloned());
    }
    let b = SquareMatrix::from_fn(dim, &ctx, |i, j| columns[j][i].clone());
    let p = b.inverse().expect("generalized eigenspaces span the space");
    let mut dec = BlockDecomposition { dims, p, p_inv: b, eigenvalues: Vec::new() };
    for a in a_gens {
        let mut per_block = Vec::with_capacity(dec.num_blocks());
        for blk in dec.blocks_of(a)? {
            let mu = blk.get(0, 0).clone();
            debug_assert!(blk.is_upper_triangular() && blk.diagonal_entries().iter().all(|x| *x == mu));
            per_block.push(mu);
        }
        dec.eigenvalues.push(per_block);
    }
    for g in g_gens {
        dec.blocks_of(g)?;
    }
    Ok(dec)
}

/// `(det_1(g), ..., det_k(g))` over the blocks of `dec`.
pub fn block_determinants<S: Field>(dec: &BlockDecomposition<S>, g: &SquareMatrix<S>) -> Result<Vec<S>> {
    Ok(dec.blocks_of(g)?.iter().map(|b| b.determinant()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{FieldDescriptor, FieldElement};

    type M = SquareMatrix<FieldElement>;

    fn q() -> FieldDescriptor {
        FieldDescriptor::Rationals
    }

    fn ints(xs: &[i64]) -> Vec<FieldElement> {
        xs.iter().map(|&x| FieldElement::from_i64(&q(), x)).collect()
    }

    #[test]
    fn distinct_eigenvalues_give_singletons() {
        let a = M::from_ints(&q(), &[&[2, 0], &[0, 3]]);
        let dec = central_block_split(std::slice::from_ref(&a), std::slice::from_ref(&a)).unwrap();
        assert_eq!(dec.dims(), &[1, 1]);
        assert_eq!(block_determinants(&dec, &a).unwrap(), ints(&[2, 3]));
    }

    #[test]
    fn heisenberg_centre_is_one_block() {
        let x = M::from_ints(&q(), &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        let y = M::from_ints(&q(), &[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]);
        let z = M::from_ints(&q(), &[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]]);
        let dec = central_block_split(&[x.clone(), y.clone(), z.clone()], std::slice::from_ref(&z)).unwrap();
        assert_eq!(dec.dims(), &[3]);
        assert_eq!(block_determinants(&dec, &z).unwrap(), ints(&[1]));
        assert!(matches!(central_block_split(&[x.clone(), y], &[x]), Err(Error::NotCentral(_))));
    }

    #[test]
    fn repeated_eigenvalue_block() {
        let a = M::from_ints(&q(), &[&[2, 0, 0], &[0, 2, 0], &[0, 0, 3]]);
        let g = M::from_ints(&q(), &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 5]]);
        let dec = central_block_split(&[g.clone(), a.clone()], std::slice::from_ref(&a)).unwrap();
        let mut dims = dec.dims().to_vec();
        dims.sort();
        assert_eq!(dims, vec![1, 2]);
        let dets = block_determinants(&dec, &g).unwrap();
        let dets_sq = block_determinants(&dec, &g.mul(&g)).unwrap();
        for (d, d2) in dets.iter().zip(&dets_sq) {
            assert_eq!(d.mul(d), *d2);
        }
    }
}
