//! Gaussian elimination and subspaces given by column bases.

use crate::scalar::Field;

use super::SquareMatrix;

/// Reduced row echelon form in place; returns pivot columns.
fn rref<S: Field>(rows: &mut [Vec<S>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].vanishes()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].vanishes() {
                let f = rows[i][c].clone();
                let (pivot_row, row) = if i < r {
                    let (a, b) = rows.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = rows.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (x, y) in row.iter_mut().zip(pivot_row) {
                    *x = x.sub(&f.mul(y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub(super) fn determinant<S: Field>(m: &SquareMatrix<S>) -> S {
    let n = m.dim();
    let mut rows: Vec<Vec<S>> = m.rows().map(|r| r.to_vec()).collect();
    let mut det = S::one_in(m.ctx());
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !rows[i][c].vanishes()) else {
            return S::zero_in(m.ctx());
        };
        if p != c {
            rows.swap(p, c);
            det = det.neg();
        }
        let pivot = rows[c][c].clone();
        det = det.mul(&pivot);
        let inv = pivot.inv().expect("nonzero pivot");
        for i in c + 1..n {
            if rows[i][c].vanishes() {
                continue;
            }
            let f = rows[i][c].mul(&inv);
            for j in c..n {
                let v = rows[i][j].sub(&f.mul(&rows[c][j]));
                rows[i][j] = v;
            }
        }
    }
    det
}

pub(super) fn inverse<S: Field>(m: &SquareMatrix<S>) -> Option<SquareMatrix<S>> {
    let n = m.dim();
    let ctx = m.ctx();
    let mut rows: Vec<Vec<S>> = m
        .rows()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.to_vec();
            row.extend((0..n).map(|j| if i == j { S::one_in(ctx) } else { S::zero_in(ctx) }));
            row
        })
        .collect();
    let pivots = rref(&mut rows, n);
    if pivots.len() < n {
        return None;
    }
    Some(SquareMatrix::from_fn(n, ctx, |i, j| rows[i][n + j].clone()))
}

/// Basis of the null space of `m`.
pub(super) fn kernel<S: Field>(m: &SquareMatrix<S>) -> Vec<Vec<S>> {
    let n = m.dim();
    let ctx = m.ctx();
    let mut rows: Vec<Vec<S>> = m.rows().map(|r| r.to_vec()).collect();
    let pivots = rref(&mut rows, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero_in(ctx); n];
            v[f] = S::one_in(ctx);
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = rows[r][f].neg();
            }
            v
        })
        .collect()
}

/// A subspace of `K^d` with a fixed column basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace<S: Field> {
    ambient: usize,
    basis: Vec<Vec<S>>,
}

impl<S: Field> Subspace<S> {
    pub fn full(dim: usize, ctx: &S::Ctx) -> Self {
        let basis = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { S::one_in(ctx) } else { S::zero_in(ctx) }).collect())
            .collect();
        Subspace { ambient: dim, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<S>] {
        &self.basis
    }

    /// Coordinates of `v` in the basis, if `v` lies in the subspace.
    pub fn coords(&self, v: &[S]) -> Option<Vec<S>> {
        let k = self.basis.len();
        let mut rows: Vec<Vec<S>> = (0..self.ambient)
            .map(|i| {
                let mut row: Vec<S> = self.basis.iter().map(|b| b[i].clone()).collect();
                row.push(v[i].clone());
                row
            })
            .collect();
        let pivots = rref(&mut rows, k + 1);
        if pivots.contains(&k) {
            return None;
        }
        Some((0..k).map(|j| rows[j][k].clone()).collect())
    }

    /// Matrix of `m` restricted to this subspace, which must be invariant.
    pub fn restrict(&self, m: &SquareMatrix<S>) -> Option<SquareMatrix<S>> {
        let k = self.dim();
        let mut cols = Vec::with_capacity(k);
        for b in &self.basis {
            cols.push(self.coords(&m.mul_vec(b))?);
        }
        Some(SquareMatrix::from_fn(k, m.ctx(), |i, j| cols[j][i].clone()))
    }

    /// The subspace spanned by `basis * c` for each coordinate vector `c`.
    pub fn span_coords(&self, coords: &[Vec<S>], ctx: &S::Ctx) -> Self {
        let basis = coords
            .iter()
            .map(|c| {
                (0..self.ambient)
                    .map(|i| {
                        self.basis
                            .iter()
                            .zip(c)
                            .fold(S::zero_in(ctx), |acc, (b, x)| acc.add(&b[i].mul(x)))
                    })
                    .collect()
            })
            .collect();
        Subspace { ambient: self.ambient, basis }
    }

    /// `ker (m|_W - lambda)^e` inside this subspace.
    pub fn generalized_eigenspace(&self, m: &SquareMatrix<S>, lambda: &S, e: u64) -> Option<Self> {
        let r = self.restrict(m)?;
        let shifted = r.sub(&SquareMatrix::identity(r.dim(), r.ctx()).scale(lambda)).pow(e);
        Some(self.span_coords(&kernel(&shifted), m.ctx()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn m(rows: &[&[i64]]) -> SquareMatrix<Rational> {
        SquareMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rational::from_i64(&(), x)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn determinant_matches_cofactors() {
        assert_eq!(determinant(&m(&[&[0, 1], &[1, 0]])), Rational::from_i64(&(), -1));
        assert_eq!(determinant(&m(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]])), Rational::from_i64(&(), 6));
        assert_eq!(determinant(&m(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 1]])), Rational::from_i64(&(), 0));
    }

    #[test]
    fn kernels_and_restriction() {
        let a = m(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 2]]);
        let ctx = ();
        let full = Subspace::full(3, &ctx);
        let e1 = full.generalized_eigenspace(&a, &Rational::from_i64(&(), 1), 1).unwrap();
        assert_eq!(e1.dim(), 1);
        let g1 = full.generalized_eigenspace(&a, &Rational::from_i64(&(), 1), 3).unwrap();
        assert_eq!(g1.dim(), 2);
        let r = g1.restrict(&a).unwrap();
        assert!(r.is_unipotent());
        assert!(g1.coords(&[Rational::from_i64(&(), 0), Rational::from_i64(&(), 0), Rational::from_i64(&(), 1)]).is_none());
    }
}
