//! Exact sparse linear algebra over prime fields and the rationals.
//!
//! Ranks are computed block by block: a matrix is first split into the
//! connected components of its row/column incidence graph (for the graded
//! differentials in this crate these are the multidegree blocks), and each
//! block is eliminated independently. Blocks run concurrently under
//! [`Exec::Parallel`]; the rank is a sum, so the result does not depend on the
//! schedule.

mod echelon;
mod field;
mod sparse;

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

pub use echelon::{axpy, kernel_basis, rank_of, Echelon, SparseVec};
pub use field::{fmt_rational, is_prime, Field, PrimeField, RationalField};
pub use sparse::{Block, SparseMatrix};

use crate::{par, Error, Result};

pub const DEFAULT_PRIME: u64 = 32003;
pub const SECOND_PRIME: u64 = 65537;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Prime(u64),
    Rationals,
}

impl FieldSpec {
    /// Checked constructor for `F_p`.
    pub fn prime(p: u64) -> Result<Self> {
        let spec = FieldSpec::Prime(p);
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FieldSpec::Prime(p) if !is_prime(p) => {
                Err(Error::Config(format!("modulus {p} is not prime")))
            }
            FieldSpec::Prime(p) if p >= 1 << 32 => Err(Error::Config(format!(
                "modulus {p} does not fit in 32 bits"
            ))),
            _ => Ok(()),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Prime(p) => *p,
            FieldSpec::Rationals => 0,
        }
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Prime(DEFAULT_PRIME)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "F_{p}"),
            FieldSpec::Rationals => write!(f, "Q"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Concurrent when built with the `parallel` feature, sequential otherwise.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if par::parallel_available() {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Rank computed over two primes, with rational escalation on disagreement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertifiedRank {
    pub rank: usize,
    pub residues: [(u64, usize); 2],
    pub escalated: bool,
}

/// Arithmetic configuration shared by all engines.
///
/// With `certify` set, every rank goes through [`rank_certified_with`] using
/// `primes` and the `field` setting is ignored.
#[derive(Debug)]
pub struct LinAlg {
    pub field: FieldSpec,
    pub certify: bool,
    pub primes: (u64, u64),
    pub exec: Exec,
    escalations: AtomicUsize,
}

impl Clone for LinAlg {
    fn clone(&self) -> Self {
        LinAlg {
            field: self.field,
            certify: self.certify,
            primes: self.primes,
            exec: self.exec,
            escalations: AtomicUsize::new(self.escalations()),
        }
    }
}

impl Default for LinAlg {
    fn default() -> Self {
        LinAlg::new(FieldSpec::default())
    }
}

impl LinAlg {
    pub fn new(field: FieldSpec) -> Self {
        LinAlg {
            field,
            certify: false,
            primes: (DEFAULT_PRIME, SECOND_PRIME),
            exec: Exec::default(),
            escalations: AtomicUsize::new(0),
        }
    }

    /// Two-prime certified mode with the default primes.
    pub fn certified() -> Self {
        LinAlg {
            certify: true,
            ..LinAlg::new(FieldSpec::default())
        }
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_certify(mut self, certify: bool) -> Self {
        self.certify = certify;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.field.validate()?;
        if self.certify {
            FieldSpec::prime(self.primes.0)?;
            FieldSpec::prime(self.primes.1)?;
            if self.primes.0 == self.primes.1 {
                return Err(Error::Config("certification needs two distinct primes".into()));
            }
        }
        Ok(())
    }

    pub fn rank(&self, m: &SparseMatrix) -> Result<usize> {
        if self.certify {
            let c = rank_certified_with(m, self.primes.0, self.primes.1, self.exec)?;
            if c.escalated {
                self.record_escalation();
            }
            Ok(c.rank)
        } else {
            rank_with(m, self.field, self.exec)
        }
    }

    pub fn kernel_dim(&self, m: &SparseMatrix) -> Result<usize> {
        Ok(m.n_cols() - self.rank(m)?)
    }

    pub(crate) fn record_escalation(&self) {
        self.escalations.fetch_add(1, Ordering::Relaxed);
    }

    /// Number of certified ranks that needed rational escalation so far.
    pub fn escalations(&self) -> usize {
        self.escalations.load(Ordering::Relaxed)
    }

    /// Human-readable field description for reports.
    pub fn describe(&self) -> String {
        if self.certify {
            format!(
                "certified(F_{}, F_{}; Q on disagreement)",
                self.primes.0, self.primes.1
            )
        } else {
            self.field.to_string()
        }
    }
}

pub fn rank(m: &SparseMatrix, f: FieldSpec) -> Result<usize> {
    rank_with(m, f, Exec::default())
}

pub fn kernel_dim(m: &SparseMatrix, f: FieldSpec) -> Result<usize> {
    Ok(m.n_cols() - rank(m, f)?)
}

pub fn rank_with(m: &SparseMatrix, f: FieldSpec, exec: Exec) -> Result<usize> {
    f.validate()?;
    Ok(match f {
        FieldSpec::Prime(p) => rank_in(&PrimeField::new_unchecked(p), m, exec),
        FieldSpec::Rationals => rank_in(&RationalField, m, exec),
    })
}

/// Rank over `F_32003` and `F_65537`, escalating to `Q` if they differ.
pub fn rank_certified(m: &SparseMatrix) -> CertifiedRank {
    rank_certified_with(m, DEFAULT_PRIME, SECOND_PRIME, Exec::default())
        .expect("default primes are valid")
}

pub fn rank_certified_with(
    m: &SparseMatrix,
    p1: u64,
    p2: u64,
    exec: Exec,
) -> Result<CertifiedRank> {
    let r1 = rank_with(m, FieldSpec::prime(p1)?, exec)?;
    let r2 = rank_with(m, FieldSpec::prime(p2)?, exec)?;
    let (rank, escalated) = if r1 == r2 {
        (r1, false)
    } else {
        (rank_in(&RationalField, m, exec), true)
    };
    Ok(CertifiedRank {
        rank,
        residues: [(p1, r1), (p2, r2)],
        escalated,
    })
}

/// Block-decomposed rank over an arbitrary field.
pub fn rank_in<F: Field>(f: &F, m: &SparseMatrix, exec: Exec) -> usize {
    if m.is_zero() {
        return 0;
    }
    let blocks = m.blocks();
    let rows = m.row_slices();
    par::map(exec, &blocks, |b| block_rank(f, &rows, b)).into_iter().sum()
}

fn block_rank<F: Field>(f: &F, rows: &[&[(usize, usize, i64)]], b: &Block) -> usize {
    // local column numbering; eliminate along the shorter side
    let mut local = std::collections::HashMap::with_capacity(b.cols.len());
    for (i, &c) in b.cols.iter().enumerate() {
        local.insert(c, i);
    }
    let row_vecs = || -> Vec<SparseVec<F::Elem>> {
        b.rows
            .iter()
            .map(|&r| {
                let mut v: Vec<(usize, F::Elem)> = rows[r]
                    .iter()
                    .map(|&(_, c, x)| (local[&c], f.embed(x)))
                    .filter(|(_, x)| !f.is_zero(x))
                    .collect();
                v.sort_unstable_by_key(|e| e.0);
                v
            })
            .collect()
    };
    if b.rows.len() <= b.cols.len() {
        rank_of(f, b.cols.len(), row_vecs())
    } else {
        let mut cols: Vec<SparseVec<F::Elem>> = vec![Vec::new(); b.cols.len()];
        for (i, v) in row_vecs().into_iter().enumerate() {
            for (c, x) in v {
                cols[c].push((i, x));
            }
        }
        rank_of(f, b.rows.len(), cols)
    }
}
