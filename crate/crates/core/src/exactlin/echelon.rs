//! Incremental sparse semi-echelon form.
//!
//! Vectors are sorted `(index, value)` lists without zeros. Each stored pivot
//! row is normalised to a leading 1, and a new vector is reduced only at its
//! leading coordinate until that coordinate has no pivot. This is enough to
//! decide linear independence and to count rank, and keeps fill-in local.

use super::field::Field;

pub type SparseVec<E> = Vec<(usize, E)>;

const NO_PIVOT: u32 = u32::MAX;

pub struct Echelon<'f, F: Field> {
    field: &'f F,
    pivot_of: Vec<u32>,
    rows: Vec<SparseVec<F::Elem>>,
}

impl<'f, F: Field> Echelon<'f, F> {
    /// An empty echelon over coordinates `0..dim`.
    pub fn new(field: &'f F, dim: usize) -> Self {
        Echelon {
            field,
            pivot_of: vec![NO_PIVOT; dim],
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored pivots. Returns the residual, which is
    /// empty iff `v` lies in the current span.
    pub fn reduce(&self, mut v: SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        let f = self.field;
        loop {
            let Some((lead, coef)) = v.first().cloned() else {
                return v;
            };
            let p = self.pivot_of[lead];
            if p == NO_PIVOT {
                return v;
            }
            v = axpy(f, &v, &f.neg(&coef), &self.rows[p as usize]);
        }
    }

    /// Inserts `v`; returns `true` when it was independent of the span.
    pub fn insert(&mut self, v: SparseVec<F::Elem>) -> bool {
        let r = self.reduce(v);
        match r.first() {
            None => false,
            Some((lead, coef)) => {
                let lead = *lead;
                let inv = self.field.inv(coef);
                let row = r
                    .into_iter()
                    .map(|(i, x)| (i, self.field.mul(&x, &inv)))
                    .collect();
                self.pivot_of[lead] = self.rows.len() as u32;
                self.rows.push(row);
                true
            }
        }
    }
}

/// `x + a * y` for sorted sparse vectors.
pub fn axpy<F: Field>(
    f: &F,
    x: &[(usize, F::Elem)],
    a: &F::Elem,
    y: &[(usize, F::Elem)],
) -> SparseVec<F::Elem> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        let (xi, xv) = &x[i];
        let (yj, yv) = &y[j];
        if xi < yj {
            out.push((*xi, xv.clone()));
            i += 1;
        } else if yj < xi {
            out.push((*yj, f.mul(a, yv)));
            j += 1;
        } else {
            let s = f.add(xv, &f.mul(a, yv));
            if !f.is_zero(&s) {
                out.push((*xi, s));
            }
            i += 1;
            j += 1;
        }
    }
    out.extend(x[i..].iter().cloned());
    out.extend(y[j..].iter().map(|(k, v)| (*k, f.mul(a, v))));
    out
}

/// Rank of a family of vectors in a space of dimension `dim`.
///
/// Vectors are processed sparsest first, which keeps fill-in low on the
/// signed-incidence matrices this crate produces.
pub fn rank_of<F: Field>(f: &F, dim: usize, mut vecs: Vec<SparseVec<F::Elem>>) -> usize {
    vecs.sort_by_key(|v| v.len());
    let mut ech = Echelon::new(f, dim);
    let mut rank = 0;
    for v in vecs {
        if ech.insert(v) {
            rank += 1;
            if rank == dim {
                break;
            }
        }
    }
    rank
}

/// Basis of the kernel of the linear map whose `j`-th column is `cols[j]`
/// (a vector in a space of dimension `n_rows`).
///
/// Each column is augmented with a tag coordinate `n_rows + j`; whenever the
/// real part reduces to zero the remaining tags are a kernel vector. The
/// returned vectors are indexed by column and are independent.
pub fn kernel_basis<F: Field>(
    f: &F,
    n_rows: usize,
    cols: &[SparseVec<F::Elem>],
) -> Vec<SparseVec<F::Elem>> {
    let mut ech = Echelon::new(f, n_rows + cols.len());
    let mut kernel = Vec::new();
    for (j, c) in cols.iter().enumerate() {
        let mut aug = c.clone();
        aug.push((n_rows + j, f.one()));
        let r = ech.reduce(aug);
        match r.first() {
            Some((lead, _)) if *lead < n_rows => {
                ech.insert(r);
            }
            Some(_) => {
                kernel.push(r.into_iter().map(|(i, x)| (i - n_rows, x)).collect());
            }
            None => unreachable!("tag coordinate cannot cancel"),
        }
    }
    kernel
}

#[cfg(test)]
mod tests {
    use super::super::field::{PrimeField, RationalField};
    use super::*;

    #[test]
    fn axpy_cancels() {
        let f = PrimeField::new_unchecked(7);
        let x = vec![(0, 1), (2, 3)];
        let y = vec![(0, 1), (1, 5)];
        let r = axpy(&f, &x, &6, &y);
        assert_eq!(r, vec![(1, 2), (2, 3)]);
    }

    #[test]
    fn kernel_of_all_ones_row() {
        let f = RationalField;
        let cols: Vec<_> = (0..3).map(|_| vec![(0, f.one())]).collect();
        let k = kernel_basis(&f, 1, &cols);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s = v.iter().fold(f.zero(), |acc, (_, x)| f.add(&acc, x));
            assert!(f.is_zero(&s));
        }
    }

    #[test]
    fn rank_of_dependent_family() {
        let f = PrimeField::new_unchecked(32003);
        let vecs = vec![vec![(0, 1), (1, 2)], vec![(0, 2), (1, 4)], vec![(2, 1)]];
        assert_eq!(rank_of(&f, 3, vecs), 2);
    }
}
