use std::collections::HashMap;

use super::wedge::{binomial, colex_rank, colex_subsets};
use crate::sections::{MonomialSystem, Point};
use crate::{Error, Result, SparseMatrix};

/// Matrix of `H^0(B + qL) ⊗ ∧^p H^0(L) → H^0(B + (q+1)L) ⊗ ∧^{p-1} H^0(L)`,
///
/// `s ⊗ e_{i_1} ∧ ... ∧ e_{i_p} ↦ Σ_k (-1)^{k-1} (s·e_{i_k}) ⊗ (omit i_k)`.
///
/// Rows and columns are ordered summand-major, then by lex monomial, then by
/// colex wedge rank. Negative twists and out-of-range exterior powers give
/// empty spaces, so the matrix may have zero rows or columns.
pub fn build_differential(sys: &MonomialSystem, p: usize, q: i64) -> Result<SparseMatrix> {
    let h0 = sys.h0_l();
    let dom_wedge = binomial(h0 as u64, p as u64) as usize;
    let cod_wedge = if p >= 1 {
        binomial(h0 as u64, p as u64 - 1) as usize
    } else {
        0
    };
    let subsets = colex_subsets(h0, p);
    let l_pts = sys.l_points();

    let mut entries = Vec::new();
    let (mut row_off, mut col_off) = (0usize, 0usize);
    for s in 0..sys.num_summands() {
        let dom = sys.basis(s, q)?;
        let cod = sys.basis(s, q + 1)?;
        if cod_wedge > 0 {
            let index: HashMap<&Point, usize> = cod.iter().enumerate().map(|(i, x)| (x, i)).collect();
            let mut target: Point = Vec::new();
            let mut rest: Vec<usize> = Vec::with_capacity(p);
            for (si, x) in dom.iter().enumerate() {
                for (wr, subset) in subsets.iter().enumerate() {
                    let col = col_off + si * dom_wedge + wr;
                    for k in 0..p {
                        target.clear();
                        target.extend(x.iter().zip(&l_pts[subset[k]]).map(|(a, b)| a + b));
                        let Some(&ti) = index.get(&target) else {
                            return Err(Error::Integrity(format!(
                                "{x:?} + {:?} is not in the basis of twist {}",
                                l_pts[subset[k]],
                                q + 1
                            )));
                        };
                        rest.clear();
                        rest.extend(subset.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, v)| *v));
                        let row = row_off + ti * cod_wedge + colex_rank(&rest);
                        let sign = if k % 2 == 0 { 1 } else { -1 };
                        entries.push((row, col, sign));
                    }
                }
            }
        }
        row_off += cod.len() * cod_wedge;
        col_off += dom.len() * dom_wedge;
    }
    SparseMatrix::new(row_off, col_off, entries)
}
