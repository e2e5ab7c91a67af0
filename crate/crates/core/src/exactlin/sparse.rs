use std::collections::BTreeMap;

use crate::{Error, Result};

/// Integer sparse matrix in coordinate form.
///
/// Entries are sorted by `(row, col)`, unique, and nonzero. All matrices the
/// engines build have small integer entries; field reduction happens when a
/// rank is requested.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(usize, usize, i64)>,
}

impl SparseMatrix {
    /// Validates and canonicalises a triplet list. Zero values are dropped;
    /// duplicate positions and out-of-range indices are rejected.
    pub fn new(n_rows: usize, n_cols: usize, mut entries: Vec<(usize, usize, i64)>) -> Result<Self> {
        entries.retain(|e| e.2 != 0);
        entries.sort_unstable_by_key(|e| (e.0, e.1));
        for w in entries.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(Error::Config(format!(
                    "duplicate matrix entry at ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        if let Some(&(r, c, _)) = entries.iter().find(|e| e.0 >= n_rows || e.1 >= n_cols) {
            return Err(Error::Config(format!(
                "entry ({r}, {c}) outside a {n_rows}x{n_cols} matrix"
            )));
        }
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            entries,
        })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            entries: (0..n).map(|i| (i, i, 1)).collect(),
        }
    }

    /// Builds from dense rows; handy in tests.
    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n_cols, "ragged dense matrix");
            for (j, &v) in r.iter().enumerate() {
                if v != 0 {
                    entries.push((i, j, v));
                }
            }
        }
        SparseMatrix {
            n_rows: rows.len(),
            n_cols,
            entries,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, i64)] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.entries
            .binary_search_by_key(&(row, col), |e| (e.0, e.1))
            .map_or(0, |i| self.entries[i].2)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.n_cols]; self.n_rows];
        for &(r, c, v) in &self.entries {
            d[r][c] = v;
        }
        d
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut entries: Vec<_> = self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect();
        entries.sort_unstable_by_key(|e| (e.0, e.1));
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            entries,
        }
    }

    /// Integer product `self * rhs`. Panics on an overflowing entry.
    pub fn mul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        if self.n_cols != rhs.n_rows {
            return Err(Error::Config(format!(
                "cannot multiply {}x{} by {}x{}",
                self.n_rows, self.n_cols, rhs.n_rows, rhs.n_cols
            )));
        }
        let rhs_rows = rhs.row_slices();
        let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for &(i, k, a) in &self.entries {
            for &(_, j, b) in rhs_rows[k] {
                let e = acc.entry((i, j)).or_insert(0);
                *e = e
                    .checked_add(a.checked_mul(b).expect("entry overflow"))
                    .expect("entry overflow");
            }
        }
        let entries = acc.into_iter().map(|((i, j), v)| (i, j, v)).collect();
        SparseMatrix::new(self.n_rows, rhs.n_cols, entries)
    }

    /// `self * c`.
    pub fn scale(&self, c: i64) -> SparseMatrix {
        let entries = self
            .entries
            .iter()
            .map(|&(r, col, v)| (r, col, v * c))
            .filter(|e| e.2 != 0)
            .collect();
        SparseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries,
        }
    }

    pub(crate) fn row_slices(&self) -> Vec<&[(usize, usize, i64)]> {
        let mut out = vec![&self.entries[0..0]; self.n_rows];
        let mut start = 0;
        while start < self.entries.len() {
            let r = self.entries[start].0;
            let mut end = start;
            while end < self.entries.len() && self.entries[end].0 == r {
                end += 1;
            }
            out[r] = &self.entries[start..end];
            start = end;
        }
        out
    }

    /// Splits the matrix into blocks with disjoint row and column supports:
    /// the connected components of its bipartite row/column graph. Empty
    /// rows and columns belong to no block. Blocks are ordered by their
    /// smallest column.
    pub fn blocks(&self) -> Vec<Block> {
        let mut uf = UnionFind::new(self.n_cols);
        for row in self.row_slices() {
            if let Some(first) = row.first() {
                for e in &row[1..] {
                    uf.union(first.1, e.1);
                }
            }
        }
        let mut block_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut col_block = vec![usize::MAX; self.n_cols];
        let mut blocks: Vec<Block> = Vec::new();
        let mut touched = vec![false; self.n_cols];
        for &(_, c, _) in &self.entries {
            touched[c] = true;
        }
        for c in 0..self.n_cols {
            if !touched[c] {
                continue;
            }
            let root = uf.find(c);
            let b = *block_of_root.entry(root).or_insert_with(|| {
                blocks.push(Block::default());
                blocks.len() - 1
            });
            col_block[c] = b;
            blocks[b].cols.push(c);
        }
        for (r, row) in self.row_slices().into_iter().enumerate() {
            if let Some(first) = row.first() {
                let b = col_block[first.1];
                blocks[b].rows.push(r);
            }
        }
        blocks
    }
}

/// Row and column index sets of one connected block.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Block {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}
